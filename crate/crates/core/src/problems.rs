//! Decision problems on one document: table emptiness, disjointness,
//! containment and equivalence.
//!
//! Tables of extractors with different attribute sets are compared after
//! padding both to the union. Since padding adds only ∅-entries, which the
//! encoding does not mark, this amounts to comparing the slices as sets of
//! marker strings.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use crate::automaton::ExtractorAutomaton;
use crate::error::{Error, Result};
use crate::grammar::{ExtractorGrammar, LineAutomaton, MarkerNfa, SliceAutomaton, TripleProduct};
use crate::marker::{AttrSet, GammaTuple, Marker, MarkerString};
use crate::slice::SliceDag;
use crate::{Extractor, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Empty,
    Disjoint,
    Contains,
    Equivalent,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Empty => "empty",
            Problem::Disjoint => "disjoint",
            Problem::Contains => "contains",
            Problem::Equivalent => "equiv",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Work counters. `nodes` and `arcs` count slice-DAG or search-graph
/// elements, `steps` counts grammar work (CYK checks or triple
/// combinations).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cost {
    pub nodes: u64,
    pub arcs: u64,
    pub steps: u64,
    pub elapsed_micros: u64,
}

impl Cost {
    /// nodes + arcs + steps.
    pub fn total(&self) -> u64 {
        self.nodes + self.arcs + self.steps
    }

    fn add(&mut self, other: Cost) {
        self.nodes += other.nodes;
        self.arcs += other.arcs;
        self.steps += other.steps;
    }
}

/// The answer to one problem. `verdict` is true when the table is empty, the
/// tables are disjoint, the first table is contained in the second, or the
/// tables are equal. A witness, when present, is a marker string of sign w
/// whose tuple refutes the opposite claim: a row of the table, a shared row,
/// or a row of one table missing from the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemAnswer {
    pub problem: Problem,
    pub verdict: bool,
    pub witness: Option<MarkerString>,
    pub gamma: AttrSet,
    pub cost: Cost,
}

impl ProblemAnswer {
    /// The witness decoded over the combined attribute set.
    pub fn witness_tuple(&self) -> Option<GammaTuple> {
        let w = self.witness.as_ref()?;
        w.decode(&self.gamma).ok().map(|(_, t)| t)
    }
}

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Timer(Instant::now())
    }

    fn finish(
        self,
        problem: Problem,
        verdict: bool,
        witness: Option<MarkerString>,
        gamma: AttrSet,
        mut cost: Cost,
    ) -> ProblemAnswer {
        cost.elapsed_micros = self.0.elapsed().as_micros() as u64;
        ProblemAnswer {
            problem,
            verdict,
            witness,
            gamma,
            cost,
        }
    }
}

fn dag_cost(d: &SliceDag) -> Cost {
    Cost {
        nodes: d.node_count() as u64,
        arcs: d.arc_count() as u64,
        ..Cost::default()
    }
}

fn joint_gamma(e1: &Extractor, e2: &Extractor) -> AttrSet {
    e1.alphabets()
        .gamma
        .union(&e2.alphabets().gamma)
        .cloned()
        .collect()
}

/// Whether E(w) = ∅. For automata this is sink reachability in the slice
/// DAG, O(|M||w|); for grammars one CYK run of the sign-erased grammar on
/// ∅_{w1}…∅_{wn}, O(|G||w|³), followed by a witness search only when the
/// table is non-empty.
pub fn table_empty(e: &Extractor, w: &str) -> Result<ProblemAnswer> {
    let timer = Timer::start();
    let gamma = e.alphabets().gamma.clone();
    match e {
        Extractor::Regular(m) => {
            let d = m.slice_dag(w);
            let witness = d.witness();
            Ok(timer.finish(
                Problem::Empty,
                witness.is_none(),
                witness,
                gamma,
                dag_cost(&d),
            ))
        }
        Extractor::ContextFree(g) => {
            let erased = g.erase_to_sign();
            let bare = MarkerString::new(w.chars().map(Marker::bare).collect());
            let cnf = erased.cnf();
            let run = match cnf.ids_of(&bare) {
                Some(ids) => cnf.cyk(&ids),
                None => crate::grammar::CykRun {
                    accepted: false,
                    steps: 0,
                },
            };
            let mut cost = Cost {
                steps: run.steps,
                ..Cost::default()
            };
            let witness = if run.accepted {
                let line = LineAutomaton::new(w, &g.alphabets().gamma);
                let tp = TripleProduct::new(g.cnf(), &line, false);
                cost.steps += tp.steps();
                tp.witness(g.cnf())
            } else {
                None
            };
            Ok(timer.finish(Problem::Empty, !run.accepted, witness, gamma, cost))
        }
    }
}

/// Whether E1(w) ∩ E2(w) = ∅.
///
/// Two automata: sink reachability in the product DAG, O(|M1||M2||w|). A
/// grammar and an automaton: emptiness of the grammar intersected with the
/// automaton's slice. Two grammars: the slice of the smaller grammar is
/// enumerated under the row budget and each string probed in the other,
/// failing with a resource error when the budget runs out.
pub fn table_disjoint(
    e1: &Extractor,
    e2: &Extractor,
    w: &str,
    limits: &Limits,
) -> Result<ProblemAnswer> {
    let timer = Timer::start();
    let gamma = joint_gamma(e1, e2);
    match (e1, e2) {
        (Extractor::Regular(m1), Extractor::Regular(m2)) => {
            let d = SliceDag::product(m1, m2, w);
            let witness = d.witness();
            Ok(timer.finish(
                Problem::Disjoint,
                witness.is_none(),
                witness,
                gamma,
                dag_cost(&d),
            ))
        }
        (Extractor::ContextFree(g), Extractor::Regular(m))
        | (Extractor::Regular(m), Extractor::ContextFree(g)) => {
            let tp = TripleProduct::new(g.cnf(), &SliceAutomaton::new(m, w), false);
            let witness = tp.witness(g.cnf());
            let cost = Cost {
                nodes: tp.triple_count() as u64,
                steps: tp.steps(),
                ..Cost::default()
            };
            Ok(timer.finish(Problem::Disjoint, witness.is_none(), witness, gamma, cost))
        }
        (Extractor::ContextFree(g1), Extractor::ContextFree(g2)) => {
            let (small, other) = if g1.size() <= g2.size() {
                (g1, g2)
            } else {
                (g2, g1)
            };
            let (witness, cost) = probe(small, w, limits, |s| other.accepts(s))?;
            Ok(timer.finish(Problem::Disjoint, witness.is_none(), witness, gamma, cost))
        }
    }
}

/// The first string of slice_w(L(G)) satisfying `hit`.
fn probe(
    g: &ExtractorGrammar,
    w: &str,
    limits: &Limits,
    hit: impl Fn(&MarkerString) -> bool,
) -> Result<(Option<MarkerString>, Cost)> {
    let strings = g.slice_strings(w, None, limits)?;
    let cost = Cost {
        nodes: strings.len() as u64,
        ..Cost::default()
    };
    Ok((strings.into_iter().find(|s| hit(s)), cost))
}

/// Whether E1(w) ⊆ E2(w).
///
/// With E2 regular, E2 is determinized on the fly along the document: the
/// search runs over pairs (state of E1, set of states of E2), which for a
/// deterministic E2 keeps it within O(|E1||E2||w|) and otherwise is bounded
/// by `limits.max_states` per layer. A context-free E1 is intersected with
/// the resulting complement automaton. With E2 context-free, the slice of E1
/// is enumerated under the row budget and probed in E2.
pub fn table_contains(
    e1: &Extractor,
    e2: &Extractor,
    w: &str,
    limits: &Limits,
) -> Result<ProblemAnswer> {
    let timer = Timer::start();
    let gamma = joint_gamma(e1, e2);
    let (witness, cost) = match (e1, e2) {
        (Extractor::Regular(m1), Extractor::Regular(m2)) => regular_subset(m1, m2, w, limits)?,
        (Extractor::ContextFree(g1), Extractor::Regular(m2)) => {
            let c = ComplementSlice::new(g1.cnf().markers(), m2, w, limits)?;
            let tp = TripleProduct::new(g1.cnf(), &c, false);
            let cost = Cost {
                nodes: (c.state_count() + tp.triple_count()) as u64,
                arcs: c.arc_count() as u64,
                steps: tp.steps(),
                ..Cost::default()
            };
            (tp.witness(g1.cnf()), cost)
        }
        (_, Extractor::ContextFree(g2)) => {
            let strings = e1.slice_strings(w, None, limits)?;
            let cost = Cost {
                nodes: strings.len() as u64,
                ..Cost::default()
            };
            (strings.into_iter().find(|s| !g2.accepts(s)), cost)
        }
    };
    Ok(timer.finish(Problem::Contains, witness.is_none(), witness, gamma, cost))
}

/// Whether E1(w) = E2(w): containment both ways.
pub fn table_equiv(
    e1: &Extractor,
    e2: &Extractor,
    w: &str,
    limits: &Limits,
) -> Result<ProblemAnswer> {
    let timer = Timer::start();
    let a = table_contains(e1, e2, w, limits)?;
    let mut cost = a.cost;
    let (verdict, witness) = if a.verdict {
        let b = table_contains(e2, e1, w, limits)?;
        cost.add(b.cost);
        (b.verdict, b.witness)
    } else {
        (false, a.witness)
    };
    Ok(timer.finish(Problem::Equivalent, verdict, witness, a.gamma, cost))
}

/// Whether t ∈ E(w).
pub fn tuple_member(e: &Extractor, w: &str, t: &GammaTuple) -> Result<bool> {
    e.tuple_member(w, t)
}

/// Layered search for a string of slice_w(L1) outside L2.
fn regular_subset(
    m1: &ExtractorAutomaton,
    m2: &ExtractorAutomaton,
    w: &str,
    limits: &Limits,
) -> Result<(Option<MarkerString>, Cost)> {
    let doc: Vec<char> = w.chars().collect();
    let id_map: Vec<Option<u32>> = m1.markers().iter().map(|m| m2.marker_id(m)).collect();
    let mut cost = Cost::default();
    // Per layer: nodes (p1, S2) with a parent pointer (node, marker id).
    let mut layers: Vec<Vec<(u32, Vec<u32>)>> =
        vec![vec![(m1.initial() as u32, vec![m2.initial() as u32])]];
    let mut parents: Vec<Vec<(u32, u32)>> = vec![vec![(u32::MAX, u32::MAX)]];
    cost.nodes = 1;
    for &c in &doc {
        let cur = layers.last().expect("layer 0 exists");
        let mut index: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let mut next = Vec::new();
        let mut parent = Vec::new();
        for (k, (p1, s2)) in cur.iter().enumerate() {
            for &(label, t1) in m1.transitions_with_sign(*p1 as usize, c) {
                cost.arcs += 1;
                let s = match id_map[label as usize] {
                    Some(id) => m2.step_set(s2, id),
                    None => Vec::new(),
                };
                let key = (t1, s);
                if !index.contains_key(&key) {
                    limits.check_states(next.len() + 1)?;
                    index.insert(key.clone(), next.len() as u32);
                    next.push(key);
                    parent.push((k as u32, label));
                }
            }
        }
        cost.nodes += next.len() as u64;
        layers.push(next);
        parents.push(parent);
    }
    let last = layers.last().expect("layer 0 exists");
    let bad = last
        .iter()
        .position(|(p1, s2)| m1.is_final(*p1 as usize) && !m2.set_accepts(s2));
    let witness = bad.map(|mut node| {
        let mut out = Vec::with_capacity(doc.len());
        for i in (1..layers.len()).rev() {
            let (prev, label) = parents[i][node];
            out.push(m1.markers()[label as usize].clone());
            node = prev as usize;
        }
        out.reverse();
        MarkerString::new(out)
    });
    Ok((witness, cost))
}

/// A deterministic automaton for the strings of sign w, over a fixed
/// marker list, that the automaton `m` rejects. State `(i, S)` records the
/// position and the set of states of `m` reached.
struct ComplementSlice {
    markers: Vec<Marker>,
    finals: Vec<bool>,
    trans: Vec<Vec<(u32, u32)>>,
}

impl ComplementSlice {
    fn new(markers: &[Marker], m: &ExtractorAutomaton, w: &str, limits: &Limits) -> Result<Self> {
        let doc: Vec<char> = w.chars().collect();
        let id_map: Vec<Option<u32>> = markers.iter().map(|x| m.marker_id(x)).collect();
        let mut trans: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
        let mut layer: Vec<(u32, Vec<u32>)> = vec![(0, vec![m.initial() as u32])];
        let mut total = 1;
        for &c in &doc {
            let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next: Vec<(u32, Vec<u32>)> = Vec::new();
            for (q, set) in &layer {
                for (k, x) in markers.iter().enumerate() {
                    if x.sign != c {
                        continue;
                    }
                    let s = match id_map[k] {
                        Some(id) => m.step_set(set, id),
                        None => Vec::new(),
                    };
                    let id = match index.get(&s) {
                        Some(&id) => id,
                        None => {
                            let id = (total + next.len()) as u32;
                            limits.check_states(id as usize + 1)?;
                            index.insert(s.clone(), id);
                            next.push((id, s));
                            trans.push(Vec::new());
                            id
                        }
                    };
                    trans[*q as usize].push((k as u32, id));
                }
            }
            total += next.len();
            layer = next;
        }
        let mut finals = vec![false; total];
        for (q, set) in &layer {
            finals[*q as usize] = !m.set_accepts(set);
        }
        Ok(ComplementSlice {
            markers: markers.to_vec(),
            finals,
            trans,
        })
    }

    fn arc_count(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }
}

impl MarkerNfa for ComplementSlice {
    fn state_count(&self) -> usize {
        self.finals.len()
    }

    fn initial(&self) -> usize {
        0
    }

    fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    fn successors(&self, q: usize, m: &Marker, out: &mut Vec<usize>) {
        if let Ok(k) = self.markers.binary_search(m) {
            out.extend(
                self.trans[q]
                    .iter()
                    .filter(|(x, _)| *x == k as u32)
                    .map(|(_, t)| *t as usize),
            );
        }
    }
}

/// Maps a resource error to `None`, the "unknown" outcome.
pub fn or_unknown<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Resource { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}
