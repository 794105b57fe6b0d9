//! The operator algebra on tuples, tables and single markers.
//!
//! Every binary operation works over Γ1 ∪ Γ2. Set operations pad both sides
//! with ∅-entries first; joins and concatenation keep one-sided attributes as
//! they are and combine shared attributes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::marker::{Attr, AttrSet, GammaTable, GammaTuple, Marker};

/// ∪, ∩ or ∖.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

impl SetOp {
    pub fn on_bools(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Union => a || b,
            SetOp::Intersection => a && b,
            SetOp::Difference => a && !b,
        }
    }

    pub fn on_sets<T: Ord + Clone>(self, a: &BTreeSet<T>, b: &BTreeSet<T>) -> BTreeSet<T> {
        match self {
            SetOp::Union => a.union(b).cloned().collect(),
            SetOp::Intersection => a.intersection(b).cloned().collect(),
            SetOp::Difference => a.difference(b).cloned().collect(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SetOp::Union => "u",
            SetOp::Intersection => "i",
            SetOp::Difference => "d",
        }
    }

    pub fn from_symbol(s: &str) -> Option<SetOp> {
        match s {
            "u" | "union" | "∪" => Some(SetOp::Union),
            "i" | "inter" | "intersection" | "∩" => Some(SetOp::Intersection),
            "d" | "diff" | "difference" | "∖" | "\\" => Some(SetOp::Difference),
            _ => None,
        }
    }
}

/// ⋈, ⋈∪, ⋈∩ and ⋈∖.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JoinKind {
    Natural,
    Union,
    Intersection,
    Difference,
}

impl JoinKind {
    /// The set operation applied to shared attributes. The natural join
    /// behaves like ⋈∪ once the shared attributes agree.
    pub fn combine(self) -> SetOp {
        match self {
            JoinKind::Natural | JoinKind::Union => SetOp::Union,
            JoinKind::Intersection => SetOp::Intersection,
            JoinKind::Difference => SetOp::Difference,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            JoinKind::Natural => "n",
            JoinKind::Union => "u",
            JoinKind::Intersection => "i",
            JoinKind::Difference => "d",
        }
    }

    pub fn from_symbol(s: &str) -> Option<JoinKind> {
        match s {
            "n" | "natural" => Some(JoinKind::Natural),
            _ => SetOp::from_symbol(s).map(|op| match op {
                SetOp::Union => JoinKind::Union,
                SetOp::Intersection => JoinKind::Intersection,
                SetOp::Difference => JoinKind::Difference,
            }),
        }
    }

    pub const ALL: [JoinKind; 4] = [
        JoinKind::Natural,
        JoinKind::Union,
        JoinKind::Intersection,
        JoinKind::Difference,
    ];
}

/// Projection, merge and renaming.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    /// π_{Γ'}: keep only the attributes of Γ'.
    Project(AttrSet),
    /// ⋎_{keep,drop,op}: `keep := keep op drop`, then `drop` is removed.
    Merge { keep: Attr, drop: Attr, op: SetOp },
    /// ρ_{from→to}.
    Rename { from: Attr, to: Attr },
}

impl UnaryOp {
    pub fn project(names: &[&str]) -> Self {
        UnaryOp::Project(crate::marker::attrs(names.iter()))
    }

    pub fn merge(keep: &str, drop: &str, op: SetOp) -> Self {
        UnaryOp::Merge {
            keep: Attr::new(keep),
            drop: Attr::new(drop),
            op,
        }
    }

    pub fn rename(from: &str, to: &str) -> Self {
        UnaryOp::Rename {
            from: Attr::new(from),
            to: Attr::new(to),
        }
    }

    /// Checks the side conditions against Γ and returns the output attribute
    /// set.
    pub fn output_gamma(&self, gamma: &AttrSet) -> Result<AttrSet> {
        match self {
            UnaryOp::Project(keep) => {
                if let Some(a) = keep.iter().find(|a| !gamma.contains(*a)) {
                    return Err(Error::contract(format!(
                        "projection attribute '{a}' is not in {}",
                        fmt_attrs(gamma)
                    )));
                }
                Ok(keep.clone())
            }
            UnaryOp::Merge { keep, drop, .. } => {
                if keep == drop {
                    return Err(Error::contract(format!(
                        "merge needs two distinct attributes, got '{keep}' twice"
                    )));
                }
                for a in [keep, drop] {
                    if !gamma.contains(a) {
                        return Err(Error::contract(format!(
                            "merge attribute '{a}' is not in {}",
                            fmt_attrs(gamma)
                        )));
                    }
                }
                let mut out = gamma.clone();
                out.remove(drop);
                Ok(out)
            }
            UnaryOp::Rename { from, to } => {
                if !gamma.contains(from) {
                    return Err(Error::contract(format!(
                        "renamed attribute '{from}' is not in {}",
                        fmt_attrs(gamma)
                    )));
                }
                if gamma.contains(to) {
                    return Err(Error::contract(format!(
                        "rename target '{to}' is already in {}",
                        fmt_attrs(gamma)
                    )));
                }
                let mut out = gamma.clone();
                out.remove(from);
                out.insert(to.clone());
                Ok(out)
            }
        }
    }

    /// The marker-level version of the operation.
    pub fn apply_marker(&self, m: &Marker) -> Marker {
        let attrs = match self {
            UnaryOp::Project(keep) => m.attrs.intersection(keep).cloned().collect(),
            UnaryOp::Merge { keep, drop, op } => {
                let mut a = m.attrs.clone();
                let has = op.on_bools(a.contains(keep), a.contains(drop));
                a.remove(drop);
                if has {
                    a.insert(keep.clone());
                } else {
                    a.remove(keep);
                }
                a
            }
            UnaryOp::Rename { from, to } => {
                let mut a = m.attrs.clone();
                if a.remove(from) {
                    a.insert(to.clone());
                }
                a
            }
        };
        Marker::new(m.sign, attrs)
    }

    /// The tuple-level version. The tuple must be over a Γ satisfying the
    /// side conditions.
    pub fn apply_tuple(&self, t: &GammaTuple) -> Result<GammaTuple> {
        self.output_gamma(&t.gamma())?;
        Ok(self.apply_tuple_unchecked(t))
    }

    fn apply_tuple_unchecked(&self, t: &GammaTuple) -> GammaTuple {
        let mut e = t.entries().clone();
        match self {
            UnaryOp::Project(keep) => e.retain(|a, _| keep.contains(a)),
            UnaryOp::Merge { keep, drop, op } => {
                let d = e.remove(drop).unwrap_or_default();
                let k = e.entry(keep.clone()).or_default();
                *k = op.on_sets(k, &d);
            }
            UnaryOp::Rename { from, to } => {
                let v = e.remove(from).unwrap_or_default();
                e.insert(to.clone(), v);
            }
        }
        GammaTuple::from_parts(t.doc_len(), e)
    }
}

impl fmt::Display for UnaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnaryOp::Project(keep) => {
                f.write_str("pi{")?;
                for (i, a) in keep.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("}")
            }
            UnaryOp::Merge { keep, drop, op } => {
                write!(f, "merge({keep},{drop},{})", op.symbol())
            }
            UnaryOp::Rename { from, to } => write!(f, "rho({from}->{to})"),
        }
    }
}

pub(crate) fn fmt_attrs(g: &AttrSet) -> String {
    let names: Vec<&str> = g.iter().map(Attr::as_str).collect();
    format!("{{{}}}", names.join(","))
}

/// X_b ⋈⊙ Y_b for markers over Γ1 and Γ2. `None` when the signs differ, or
/// for the natural join when the shared attributes disagree.
pub fn join_markers(
    x: &Marker,
    gamma1: &AttrSet,
    y: &Marker,
    gamma2: &AttrSet,
    kind: JoinKind,
) -> Option<Marker> {
    if x.sign != y.sign {
        return None;
    }
    let op = kind.combine();
    let mut z = AttrSet::new();
    for a in &x.attrs {
        if !gamma2.contains(a) {
            z.insert(a.clone());
        }
    }
    for a in &y.attrs {
        if !gamma1.contains(a) {
            z.insert(a.clone());
        }
    }
    for a in gamma1.intersection(gamma2) {
        let (in_x, in_y) = (x.attrs.contains(a), y.attrs.contains(a));
        if kind == JoinKind::Natural && in_x != in_y {
            return None;
        }
        if op.on_bools(in_x, in_y) {
            z.insert(a.clone());
        }
    }
    Some(Marker::new(x.sign, z))
}

/// t1 ⋈⊙ t2. `Ok(None)` is the undefined natural join.
pub fn join_tuples(t1: &GammaTuple, t2: &GammaTuple, kind: JoinKind) -> Result<Option<GammaTuple>> {
    if t1.doc_len() != t2.doc_len() {
        return Err(Error::contract(format!(
            "cannot join tuples for lengths {} and {}",
            t1.doc_len(),
            t2.doc_len()
        )));
    }
    let op = kind.combine();
    let mut out: BTreeMap<Attr, BTreeSet<usize>> = BTreeMap::new();
    for (a, s1) in t1.entries() {
        match t2.get(a.as_str()) {
            None => {
                out.insert(a.clone(), s1.clone());
            }
            Some(s2) => {
                if kind == JoinKind::Natural && s1 != s2 {
                    return Ok(None);
                }
                out.insert(a.clone(), op.on_sets(s1, s2));
            }
        }
    }
    for (a, s2) in t2.entries() {
        out.entry(a.clone()).or_insert_with(|| s2.clone());
    }
    Ok(Some(GammaTuple::from_parts(t1.doc_len(), out)))
}

/// T1 ⋈⊙ T2, dropping undefined natural-join results.
pub fn join_tables(t1: &GammaTable, t2: &GammaTable, kind: JoinKind) -> Result<GammaTable> {
    check_same_len(t1, t2)?;
    let gamma: AttrSet = t1.gamma().union(t2.gamma()).cloned().collect();
    let mut out = GammaTable::new(gamma, t1.doc_len());
    for a in t1.rows() {
        for b in t2.rows() {
            if let Some(r) = join_tuples(a, b, kind)? {
                out.insert_unchecked(r);
            }
        }
    }
    Ok(out)
}

/// T1 ⊙ T2 after padding both to Γ1 ∪ Γ2.
pub fn set_op_tables(t1: &GammaTable, t2: &GammaTable, op: SetOp) -> Result<GammaTable> {
    check_same_len(t1, t2)?;
    let gamma: AttrSet = t1.gamma().union(t2.gamma()).cloned().collect();
    let p1 = t1.pad(&gamma)?;
    let p2 = t2.pad(&gamma)?;
    let rows = op.on_sets(p1.row_set(), p2.row_set());
    let mut out = GammaTable::new(gamma, t1.doc_len());
    for r in rows {
        out.insert_unchecked(r);
    }
    Ok(out)
}

/// t1 · t2: t2 shifted by the length of t1's document, then combined as ⋈∪.
pub fn concat_tuples(t1: &GammaTuple, t2: &GammaTuple) -> GammaTuple {
    let shift = t1.doc_len();
    let mut out = t1.entries().clone();
    for (a, s2) in t2.entries() {
        out.entry(a.clone())
            .or_default()
            .extend(s2.iter().map(|p| p + shift));
    }
    GammaTuple::from_parts(t1.doc_len() + t2.doc_len(), out)
}

/// T1 · T2 = {t1 · t2}.
pub fn concat_tables(t1: &GammaTable, t2: &GammaTable) -> GammaTable {
    let gamma: AttrSet = t1.gamma().union(t2.gamma()).cloned().collect();
    let mut out = GammaTable::new(gamma, t1.doc_len() + t2.doc_len());
    for a in t1.rows() {
        for b in t2.rows() {
            out.insert_unchecked(concat_tuples(a, b));
        }
    }
    out
}

/// f(T) = {f(t)}.
pub fn apply_unary(t: &GammaTable, f: &UnaryOp) -> Result<GammaTable> {
    let gamma = f.output_gamma(t.gamma())?;
    let mut out = GammaTable::new(gamma, t.doc_len());
    for r in t.rows() {
        out.insert_unchecked(f.apply_tuple_unchecked(r));
    }
    Ok(out)
}

fn check_same_len(t1: &GammaTable, t2: &GammaTable) -> Result<()> {
    if t1.doc_len() != t2.doc_len() {
        return Err(Error::contract(format!(
            "tables are for lengths {} and {}",
            t1.doc_len(),
            t2.doc_len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::{attrs, encode_tuple, MarkerString};

    fn tup(len: usize, e: &[(&str, &[usize])]) -> GammaTuple {
        GammaTuple::from_entries(len, e).unwrap()
    }

    fn table(names: &[&str], len: usize, rows: &[&[&[usize]]]) -> GammaTable {
        let g = attrs(names.iter());
        GammaTable::from_rows(
            g,
            len,
            rows.iter().map(|r| {
                let e: Vec<(&str, &[usize])> =
                    names.iter().copied().zip(r.iter().copied()).collect();
                tup(len, &e)
            }),
        )
        .unwrap()
    }

    fn t1() -> GammaTable {
        table(&["x", "y"], 7, &[&[&[1, 2], &[4]], &[&[], &[1]]])
    }

    fn t2() -> GammaTable {
        table(&["x", "z"], 7, &[&[&[2, 3], &[3, 7]], &[&[4], &[1, 3]]])
    }

    #[test]
    fn union_join_rows() {
        let got = join_tables(&t1(), &t2(), JoinKind::Union).unwrap();
        let want = table(
            &["x", "y", "z"],
            7,
            &[
                &[&[1, 2, 3], &[4], &[3, 7]],
                &[&[1, 2, 4], &[4], &[1, 3]],
                &[&[2, 3], &[1], &[3, 7]],
                &[&[4], &[1], &[1, 3]],
            ],
        );
        assert_eq!(got, want);
    }

    #[test]
    fn difference_join_is_not_commutative() {
        let a = join_tables(&t1(), &t2(), JoinKind::Difference).unwrap();
        let b = join_tables(&t2(), &t1(), JoinKind::Difference).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn natural_join_undefined_pair() {
        let a = tup(7, &[("u", &[1, 4]), ("v", &[2, 3]), ("w", &[7])]);
        let b = tup(7, &[("u", &[5]), ("v", &[2]), ("x", &[])]);
        assert_eq!(join_tuples(&a, &b, JoinKind::Natural).unwrap(), None);
    }

    #[test]
    fn join_with_empty_table() {
        let empty = GammaTable::new(attrs(["x", "z"]), 7);
        assert!(join_tables(&t1(), &empty, JoinKind::Union)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn length_mismatch_is_contract_error() {
        let a = GammaTable::new(attrs(["x"]), 2);
        let b = GammaTable::new(attrs(["x"]), 3);
        assert!(join_tables(&a, &b, JoinKind::Union).is_err());
        assert!(set_op_tables(&a, &b, SetOp::Union).is_err());
    }

    #[test]
    fn set_ops() {
        let t = t1();
        assert!(set_op_tables(&t, &t, SetOp::Difference).unwrap().is_empty());
        let a = table(&["x"], 2, &[&[&[1]]]);
        let b = table(&["x"], 2, &[&[&[2]]]);
        assert!(set_op_tables(&a, &b, SetOp::Intersection)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn concat_example() {
        let a = tup(3, &[("u", &[1]), ("v", &[1, 2]), ("w", &[])]);
        let b = tup(4, &[("u", &[1, 3]), ("v", &[2]), ("x", &[4])]);
        assert_eq!(
            concat_tuples(&a, &b),
            tup(
                7,
                &[
                    ("u", &[1, 4, 6]),
                    ("v", &[1, 2, 5]),
                    ("w", &[]),
                    ("x", &[7])
                ]
            )
        );
        let e = GammaTuple::empty(&attrs(["u", "v", "x"]), 0);
        assert_eq!(concat_tuples(&e, &b), b);
    }

    #[test]
    fn concat_tables_neutral_and_absorbing() {
        let g = attrs(["x", "y"]);
        let unit = GammaTable::from_rows(g.clone(), 0, [GammaTuple::empty(&g, 0)]).unwrap();
        assert_eq!(concat_tables(&unit, &t1()), t1());
        assert!(concat_tables(&GammaTable::new(g, 0), &t1()).is_empty());
    }

    #[test]
    fn concat_matches_marker_concat() {
        let g = attrs(["x", "y"]);
        let w1: MarkerString = "{x}:a {}:b".parse().unwrap();
        let w2: MarkerString = "{x,y}:a".parse().unwrap();
        let (s1, a) = w1.decode(&g).unwrap();
        let (s2, b) = w2.decode(&g).unwrap();
        let joined = encode_tuple(&format!("{s1}{s2}"), &concat_tuples(&a, &b)).unwrap();
        assert_eq!(joined, w1.concat(&w2));
    }

    #[test]
    fn unary_examples() {
        let t = t1();
        let p = apply_unary(&t, &UnaryOp::project(&["x"])).unwrap();
        assert_eq!(p, table(&["x"], 7, &[&[&[1, 2]], &[&[]]]));

        let one = table(&["x", "y"], 7, &[&[&[1, 2], &[4]]]);
        let m = apply_unary(&one, &UnaryOp::merge("x", "y", SetOp::Union)).unwrap();
        assert_eq!(m, table(&["x"], 7, &[&[&[1, 2, 4]]]));

        let r = apply_unary(&one, &UnaryOp::rename("x", "q")).unwrap();
        assert_eq!(r, table(&["q", "y"], 7, &[&[&[1, 2], &[4]]]));
    }

    #[test]
    fn unary_side_conditions() {
        let g = attrs(["x", "y"]);
        assert!(UnaryOp::project(&["z"]).output_gamma(&g).is_err());
        assert!(UnaryOp::merge("x", "x", SetOp::Union)
            .output_gamma(&g)
            .is_err());
        assert!(UnaryOp::merge("x", "z", SetOp::Union)
            .output_gamma(&g)
            .is_err());
        assert!(UnaryOp::rename("x", "y").output_gamma(&g).is_err());
        assert!(UnaryOp::rename("z", "q").output_gamma(&g).is_err());
    }

    #[test]
    fn merge_intersection_on_markers() {
        let f = UnaryOp::merge("x", "y", SetOp::Intersection);
        assert_eq!(
            f.apply_marker(&Marker::of('a', &["x", "y"])),
            Marker::of('a', &["x"])
        );
        assert_eq!(f.apply_marker(&Marker::of('a', &["x"])), Marker::bare('a'));
        assert_eq!(f.apply_marker(&Marker::of('a', &["y"])), Marker::bare('a'));
    }

    #[test]
    fn marker_join_matches_tuple_join() {
        let g1 = attrs(["x", "y"]);
        let g2 = attrs(["x", "z"]);
        let w1: MarkerString = "{x,y}:a {}:a {x}:b".parse().unwrap();
        let w2: MarkerString = "{z}:a {x}:a {x,z}:b".parse().unwrap();
        for kind in JoinKind::ALL {
            let joined: Option<Vec<Marker>> = w1
                .markers()
                .iter()
                .zip(w2.markers())
                .map(|(a, b)| join_markers(a, &g1, b, &g2, kind))
                .collect();
            let (_, a) = w1.decode(&g1).unwrap();
            let (_, b) = w2.decode(&g2).unwrap();
            let tj = join_tuples(&a, &b, kind).unwrap();
            match (joined, tj) {
                (Some(ms), Some(t)) => {
                    let all: AttrSet = g1.union(&g2).cloned().collect();
                    assert_eq!(MarkerString::new(ms).decode(&all).unwrap().1, t);
                }
                (None, None) => {}
                other => panic!("{kind:?}: {other:?}"),
            }
        }
    }
}
