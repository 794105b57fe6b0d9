//! Instance generators for the hardness reductions: 3-CNF satisfiability to
//! regular table containment, and bounded PCP to context-free table
//! disjointness.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::str::FromStr;

use crate::automaton::{AutomatonBuilder, ExtractorAutomaton};
use crate::error::{Error, Result};
use crate::grammar::{ExtractorGrammar, GrammarBuilder, Symbol};
use crate::marker::{Alphabets, Attr, AttrSet, Marker, MarkerString};

/// A 3-CNF formula over variables 1..=vars. Literal `k` is v_k, `-k` is ¬v_k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    pub fn new(vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > vars {
                    return Err(Error::contract(format!(
                        "literal {l} is outside 1..={vars}"
                    )));
                }
            }
        }
        Ok(CnfFormula { vars, clauses })
    }

    /// Whether the assignment (`true` = v_i is 1) satisfies every clause.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// DIMACS-like text: `c` comment lines, a `p cnf <vars> <clauses>` header,
/// then clauses of three literals terminated by `0`.
impl FromStr for CnfFormula {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut vars = None;
        let mut lits: Vec<(i32, usize)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    ["cnf", n, _] => {
                        vars = Some(n.parse::<usize>().map_err(|_| {
                            Error::parse(ln, 1, format!("bad variable count '{n}'"))
                        })?)
                    }
                    _ => return Err(Error::parse(ln, 1, "expected 'p cnf <vars> <clauses>'")),
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok
                    .parse()
                    .map_err(|_| Error::parse(ln, 1, format!("bad literal '{tok}'")))?;
                lits.push((l, ln));
            }
        }
        let vars = vars.ok_or_else(|| Error::parse(1, 1, "missing 'p cnf' header"))?;
        let mut clauses = Vec::new();
        let mut cur: Vec<i32> = Vec::new();
        for (l, ln) in lits {
            if l != 0 {
                cur.push(l);
                continue;
            }
            let c: [i32; 3] = cur.as_slice().try_into().map_err(|_| {
                Error::parse(
                    ln,
                    1,
                    format!("clause has {} literals, expected 3", cur.len()),
                )
            })?;
            clauses.push(c);
            cur.clear();
        }
        if !cur.is_empty() {
            return Err(Error::parse(1, 1, "last clause is not terminated by 0"));
        }
        CnfFormula::new(vars, clauses)
    }
}

/// M1, M2 and the document a^n.
#[derive(Debug, Clone)]
pub struct SatReduction {
    pub m1: ExtractorAutomaton,
    pub m2: ExtractorAutomaton,
    pub document: String,
}

fn sat_context() -> Alphabets {
    Alphabets::of("a", &["t", "f"])
}

fn truth(v: bool) -> Marker {
    Marker::of('a', &[if v { "t" } else { "f" }])
}

/// M1 (a DFA) accepts every encoding of an assignment, M2 the encodings of
/// assignments falsifying some clause, one branch per clause. The first
/// table is contained in the second iff F is unsatisfiable.
pub fn sat_to_containment(f: &CnfFormula) -> SatReduction {
    let n = f.vars;
    let mut b = AutomatonBuilder::new(sat_context());
    let chain = b.add_states(n + 1);
    for i in 0..n {
        for v in [true, false] {
            b.add_transition(chain.start + i, truth(v), chain.start + i + 1)
                .expect("marker in context");
        }
    }
    b.set_initial(chain.start).expect("state exists");
    b.set_final(chain.end - 1).expect("state exists");
    let m1 = b.build().expect("valid automaton");

    let mut b = AutomatonBuilder::new(sat_context());
    let q0 = b.add_state();
    b.set_initial(q0).expect("state exists");
    for c in &f.clauses {
        // The falsifying value of each variable in the clause.
        let mut forced: Vec<Option<bool>> = vec![None; n];
        let mut tautology = false;
        for &l in c {
            let v = l.unsigned_abs() as usize - 1;
            let want = l < 0;
            match forced[v] {
                Some(x) if x != want => tautology = true,
                _ => forced[v] = Some(want),
            }
        }
        if tautology {
            continue;
        }
        let mut prev = q0;
        for fv in &forced {
            let next = b.add_state();
            match fv {
                Some(v) => b.add_transition(prev, truth(*v), next),
                None => b
                    .add_transition(prev, truth(true), next)
                    .and_then(|_| b.add_transition(prev, truth(false), next)),
            }
            .expect("marker in context");
            prev = next;
        }
        b.set_final(prev).expect("state exists");
    }
    let m2 = b.build().expect("valid automaton");
    SatReduction {
        m1,
        m2,
        document: "a".repeat(n),
    }
}

/// Reads an assignment back from a marker string of M1.
pub fn decode_assignment(w: &MarkerString) -> Option<Vec<bool>> {
    w.markers()
        .iter()
        .map(|m| match (m.contains("t"), m.contains("f")) {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        })
        .collect()
}

/// Pairs (u_i, v_i) over single-character letters and a bound κ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcpInstance {
    pub pairs: Vec<(String, String)>,
    pub bound: usize,
}

impl PcpInstance {
    pub fn new(pairs: Vec<(String, String)>, bound: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::contract("a PCP instance needs at least one pair"));
        }
        if bound == 0 {
            return Err(Error::contract("the bound must be at least 1"));
        }
        if pairs.iter().any(|(u, v)| u.is_empty() || v.is_empty()) {
            return Err(Error::contract("pair strings must be non-empty"));
        }
        Ok(PcpInstance { pairs, bound })
    }

    /// max |u_i|, |v_i|.
    pub fn p_max(&self) -> usize {
        self.pairs
            .iter()
            .map(|(u, v)| u.chars().count().max(v.chars().count()))
            .max()
            .unwrap_or(0)
    }

    /// The letters used in the pairs.
    pub fn letters(&self) -> BTreeSet<char> {
        self.pairs
            .iter()
            .flat_map(|(u, v)| u.chars().chain(v.chars()))
            .collect()
    }

    /// Whether i_1 … i_q (1-based, q ≥ 1) is a solution.
    pub fn is_solution(&self, seq: &[usize]) -> bool {
        if seq.is_empty() || seq.len() > self.bound {
            return false;
        }
        let u: String = seq.iter().map(|&i| self.pairs[i - 1].0.as_str()).collect();
        let v: String = seq.iter().map(|&i| self.pairs[i - 1].1.as_str()).collect();
        u == v
    }
}

/// Text format: a `bound: κ` line and one `u v` line per pair.
impl FromStr for PcpInstance {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut bound = None;
        let mut pairs = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = crate::parse::strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(v) = crate::parse::header(line, "bound") {
                bound = Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::parse(ln, 1, format!("bad bound '{v}'")))?,
                );
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                [u, v] => pairs.push((u.to_string(), v.to_string())),
                _ => return Err(Error::parse(ln, 1, "expected 'u v' or 'bound: k'")),
            }
        }
        let bound = bound.ok_or_else(|| Error::parse(1, 1, "missing 'bound:' line"))?;
        PcpInstance::new(pairs, bound).map_err(|e| match e {
            Error::Contract(m) => Error::parse(1, 1, m),
            other => other,
        })
    }
}

/// G1, G2 and the document a^κ # a^{κ·p_max}.
#[derive(Debug, Clone)]
pub struct PcpReduction {
    pub g1: ExtractorGrammar,
    pub g2: ExtractorGrammar,
    pub document: String,
}

/// Index attribute for pair i.
pub fn index_attr(i: usize) -> String {
    format!("i{i}")
}

/// The tables of G1 and G2 on the document intersect iff the instance has a
/// solution of length at most κ.
pub fn pcp_to_disjointness(p: &PcpInstance) -> PcpReduction {
    let kappa = p.bound;
    let pm = p.p_max();
    let mut gamma: AttrSet = (1..=p.pairs.len())
        .map(|i| Attr::new(&index_attr(i)))
        .collect();
    gamma.extend(p.letters().into_iter().map(|c| Attr::new(&c.to_string())));
    let alph = Alphabets {
        sigma: ['a', '#'].into_iter().collect(),
        gamma,
    };
    let side = |pick: &dyn Fn(&(String, String)) -> &str| -> ExtractorGrammar {
        let words: Vec<Vec<Marker>> = p
            .pairs
            .iter()
            .map(|pair| {
                pick(pair)
                    .chars()
                    .map(|c| Marker::of('a', &[&c.to_string()]))
                    .collect()
            })
            .collect();
        let idx = |i: usize| Symbol::Terminal(Marker::of('a', &[&index_attr(i + 1)]));
        let mut b = GrammarBuilder::new(alph.clone());
        let s = b.nonterminal("S");
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut queue = VecDeque::new();
        let nt = |b: &mut GrammarBuilder, q: usize, r: usize| b.nonterminal(&format!("B_{q}_{r}"));
        for (i, u) in words.iter().enumerate() {
            let target = nt(&mut b, 1, u.len());
            let mut body = vec![idx(i), Symbol::Nonterminal(target)];
            body.extend(u.iter().rev().cloned().map(Symbol::Terminal));
            b.add_rule(s, body).expect("symbols in context");
            if seen.insert((1, u.len())) {
                queue.push_back((1, u.len()));
            }
        }
        while let Some((q, r)) = queue.pop_front() {
            let head = nt(&mut b, q, r);
            if q < kappa {
                for (i, u) in words.iter().enumerate() {
                    let target = nt(&mut b, q + 1, r + u.len());
                    let mut body = vec![idx(i), Symbol::Nonterminal(target)];
                    body.extend(u.iter().rev().cloned().map(Symbol::Terminal));
                    b.add_rule(head, body).expect("symbols in context");
                    if seen.insert((q + 1, r + u.len())) {
                        queue.push_back((q + 1, r + u.len()));
                    }
                }
            }
            let mut close = vec![Symbol::Terminal(Marker::bare('a')); kappa - q];
            close.push(Symbol::Terminal(Marker::bare('#')));
            close.extend(vec![Symbol::Terminal(Marker::bare('a')); kappa * pm - r]);
            b.add_rule(head, close).expect("symbols in context");
        }
        b.build("S").expect("start has rules")
    };
    PcpReduction {
        g1: side(&|pair| pair.0.as_str()),
        g2: side(&|pair| pair.1.as_str()),
        document: format!("{}#{}", "a".repeat(kappa), "a".repeat(kappa * pm)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{table_contains, table_disjoint, table_equiv};
    use crate::{Extractor, Limits};

    #[test]
    fn parses_dimacs() {
        let f: CnfFormula = "c demo\np cnf 3 2\n1 -2 3 0\n-1 2 2 0\n".parse().unwrap();
        assert_eq!(f.vars, 3);
        assert_eq!(f.clauses, vec![[1, -2, 3], [-1, 2, 2]]);
        assert!("p cnf 2 1\n1 2 0\n".parse::<CnfFormula>().is_err());
        assert!("p cnf 2 1\n1 2 3 0\n".parse::<CnfFormula>().is_err());
    }

    #[test]
    fn sat_examples() {
        let l = Limits::default();
        let unsat = CnfFormula::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap();
        let r = sat_to_containment(&unsat);
        assert!(r.m1.is_deterministic());
        let (e1, e2) = (Extractor::from(r.m1), Extractor::from(r.m2));
        assert!(table_contains(&e1, &e2, &r.document, &l).unwrap().verdict);
        assert!(table_equiv(&e1, &e2, &r.document, &l).unwrap().verdict);

        let sat = CnfFormula::new(3, vec![[1, 2, 3]]).unwrap();
        let r = sat_to_containment(&sat);
        let (e1, e2) = (Extractor::from(r.m1), Extractor::from(r.m2));
        let ans = table_contains(&e1, &e2, &r.document, &l).unwrap();
        assert!(!ans.verdict);
        let a = decode_assignment(ans.witness.as_ref().unwrap()).unwrap();
        assert!(sat.satisfied_by(&a));
    }

    #[test]
    fn parses_pcp() {
        let p: PcpInstance = "bound: 2\na ab\nba a\n".parse().unwrap();
        assert_eq!(p.pairs.len(), 2);
        assert_eq!(p.p_max(), 2);
        assert!("a b\n".parse::<PcpInstance>().is_err());
        assert!("bound: 0\na b\n".parse::<PcpInstance>().is_err());
    }

    #[test]
    fn pcp_examples() {
        let l = Limits::default();
        let yes = PcpInstance::new(vec![("a".into(), "a".into())], 1).unwrap();
        let r = pcp_to_disjointness(&yes);
        assert_eq!(r.document, "a#a");
        let (g1, g2) = (Extractor::from(r.g1), Extractor::from(r.g2));
        assert!(!table_disjoint(&g1, &g2, &r.document, &l).unwrap().verdict);

        let no = PcpInstance::new(vec![("a".into(), "aa".into())], 2).unwrap();
        let r = pcp_to_disjointness(&no);
        assert_eq!(r.document, "aa#aaaa");
        let (g1, g2) = (Extractor::from(r.g1), Extractor::from(r.g2));
        assert!(table_disjoint(&g1, &g2, &r.document, &l).unwrap().verdict);
    }
}
