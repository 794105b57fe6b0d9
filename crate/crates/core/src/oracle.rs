//! Reference semantics by brute force: E(w) is computed by testing the
//! encoding of every Γ-tuple for membership. Exponential in |w|·|Γ| and
//! guarded accordingly; used as ground truth in tests and by `verify`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extractor::{Extractor, Operator};
use crate::marker::{encode_tuple, Alphabets, Attr, AttrSet, GammaTable, GammaTuple, MarkerString};
use crate::table::{apply_unary, concat_tables, join_tables, set_op_tables};
use crate::Limits;

/// Largest |w|·|Γ| for which the universe is enumerated.
pub const UNIVERSE_GUARD: usize = 24;

/// All 2^{|w||Γ|} Γ-tuples for documents of length `len`, in a fixed order.
pub fn universe(len: usize, gamma: &AttrSet) -> Result<impl Iterator<Item = GammaTuple>> {
    let bits = len * gamma.len();
    if bits > UNIVERSE_GUARD {
        return Err(Error::Resource {
            what: "universe bits (|w|·|Γ|)",
            count: bits,
            limit: UNIVERSE_GUARD,
        });
    }
    let attrs: Vec<Attr> = gamma.iter().cloned().collect();
    Ok((0u64..1 << bits).map(move |mask| {
        let mut entries: BTreeMap<Attr, BTreeSet<usize>> = BTreeMap::new();
        for (k, a) in attrs.iter().enumerate() {
            let set = (0..len)
                .filter(|p| mask >> (k * len + p) & 1 == 1)
                .map(|p| p + 1)
                .collect();
            entries.insert(a.clone(), set);
        }
        GammaTuple::from_parts(len, entries)
    }))
}

/// An extractor known only through a membership test on marker strings.
#[derive(Clone)]
pub struct OracleExtractor {
    pub alphabets: Alphabets,
    membership: Arc<dyn Fn(&MarkerString) -> bool + Send + Sync>,
}

impl OracleExtractor {
    pub fn new(
        alphabets: Alphabets,
        membership: impl Fn(&MarkerString) -> bool + Send + Sync + 'static,
    ) -> Self {
        OracleExtractor {
            alphabets,
            membership: Arc::new(membership),
        }
    }

    pub fn accepts(&self, w: &MarkerString) -> bool {
        (self.membership)(w)
    }
}

impl From<&Extractor> for OracleExtractor {
    fn from(e: &Extractor) -> Self {
        let e = e.clone();
        OracleExtractor::new(e.alphabets().clone(), move |w| e.accepts(w))
    }
}

impl fmt::Debug for OracleExtractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleExtractor")
            .field("alphabets", &self.alphabets)
            .finish_non_exhaustive()
    }
}

/// {t ∈ universe | W_{w,t} ∈ L}.
pub fn oracle_eval(e: &OracleExtractor, w: &str) -> Result<GammaTable> {
    let len = w.chars().count();
    let gamma = e.alphabets.gamma.clone();
    let mut out = GammaTable::new(gamma.clone(), len);
    for t in universe(len, &gamma)? {
        if e.accepts(&encode_tuple(w, &t)?) {
            out.insert(t)?;
        }
    }
    Ok(out)
}

fn eval(e: &Extractor, w: &str) -> Result<GammaTable> {
    oracle_eval(&OracleExtractor::from(e), w)
}

/// The table `op` should produce on `w`, computed from the operands' oracle
/// tables by the table-level definitions.
pub fn expected_table(op: &Operator, operands: &[&Extractor], w: &str) -> Result<GammaTable> {
    if operands.len() != op.arity() {
        return Err(Error::contract(format!(
            "{op} takes {} operand(s)",
            op.arity()
        )));
    }
    let len = w.chars().count();
    match op {
        Operator::Set(s) => set_op_tables(&eval(operands[0], w)?, &eval(operands[1], w)?, *s),
        Operator::Join(k) => join_tables(&eval(operands[0], w)?, &eval(operands[1], w)?, *k),
        Operator::Unary(f) => apply_unary(&eval(operands[0], w)?, f),
        Operator::Complement => {
            let alph = operands[0].alphabets();
            let inside = eval(operands[0], w)?;
            let mut out = GammaTable::new(alph.gamma.clone(), len);
            if w.chars().all(|c| alph.sigma.contains(&c)) {
                for t in universe(len, &alph.gamma)? {
                    if !inside.contains(&t) {
                        out.insert(t)?;
                    }
                }
            }
            Ok(out)
        }
        Operator::Concat => {
            let chars: Vec<char> = w.chars().collect();
            let gamma: AttrSet = operands[0]
                .alphabets()
                .gamma
                .union(&operands[1].alphabets().gamma)
                .cloned()
                .collect();
            let mut out = GammaTable::new(gamma.clone(), len);
            for k in 0..=len {
                let (u, v): (String, String) =
                    (chars[..k].iter().collect(), chars[k..].iter().collect());
                let part =
                    concat_tables(&eval(operands[0], &u)?, &eval(operands[1], &v)?).pad(&gamma)?;
                for r in part.rows() {
                    out.insert(r.clone())?;
                }
            }
            Ok(out)
        }
        Operator::Star => {
            // S(v) for every suffix v: S(ε) = {t^∅}, S(v) = ⋃ E(u)·S(v') over
            // v = u·v' with u non-empty.
            let chars: Vec<char> = w.chars().collect();
            let gamma = operands[0].alphabets().gamma.clone();
            let mut suffix: Vec<GammaTable> = vec![GammaTable::new(gamma.clone(), 0); len + 1];
            suffix[len].insert(GammaTuple::empty(&gamma, 0))?;
            for i in (0..len).rev() {
                let mut t = GammaTable::new(gamma.clone(), len - i);
                for j in i + 1..=len {
                    let u: String = chars[i..j].iter().collect();
                    for r in concat_tables(&eval(operands[0], &u)?, &suffix[j]).rows() {
                        t.insert(r.clone())?;
                    }
                }
                suffix[i] = t;
            }
            Ok(suffix.swap_remove(0))
        }
    }
}

/// Whether the engine's construction for `op` agrees with the table-level
/// definition on `w`. Both the slice evaluation of the constructed extractor
/// and its oracle table are compared against the expected table.
pub fn oracle_op_check(
    op: &Operator,
    operands: &[&Extractor],
    w: &str,
    limits: &Limits,
) -> Result<bool> {
    let expected = expected_table(op, operands, w)?;
    let built = op.apply(operands, limits)?;
    let engine = built.evaluate(w, limits)?.pad(expected.gamma())?;
    let by_definition = eval(&built, w)?.pad(expected.gamma())?;
    Ok(engine == expected && by_definition == expected)
}

/// Whether the engine's E(w) equals the oracle table.
pub fn oracle_eval_check(e: &Extractor, w: &str, limits: &Limits) -> Result<bool> {
    Ok(e.evaluate(w, limits)? == eval(e, w)?)
}
