//! Regular extractors: finite automata over the marker alphabet Δ_{Σ,Γ}.
//!
//! Automata are always ε-free once built. Transitions are sparse: a missing
//! `(state, marker)` entry means there is no transition. Markers are interned
//! per automaton and transition lists are kept sorted, which makes lookups by
//! marker a pair of binary searches.

mod decide;
mod determinize;
pub mod expr;
mod ops;
pub(crate) mod text;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::marker::{Alphabets, Marker, MarkerString};

pub use expr::{Expression, ExtractorExpr};

/// An NFA (or DFA) over signed markers.
#[derive(Clone, Debug)]
pub struct ExtractorAutomaton {
    alphabets: Alphabets,
    markers: Vec<Marker>,
    trans: Vec<Vec<(u32, u32)>>,
    initial: usize,
    finals: Vec<bool>,
    deterministic: bool,
}

/// Incremental construction, with optional ε-transitions that are removed by
/// [`AutomatonBuilder::build`].
#[derive(Clone, Debug)]
pub struct AutomatonBuilder {
    alphabets: Alphabets,
    edges: Vec<Vec<(Marker, usize)>>,
    eps: Vec<Vec<usize>>,
    initial: usize,
    finals: BTreeSet<usize>,
}

impl AutomatonBuilder {
    pub fn new(alphabets: Alphabets) -> Self {
        AutomatonBuilder {
            alphabets,
            edges: Vec::new(),
            eps: Vec::new(),
            initial: 0,
            finals: BTreeSet::new(),
        }
    }

    pub fn add_state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.eps.push(Vec::new());
        self.edges.len() - 1
    }

    pub fn add_states(&mut self, n: usize) -> std::ops::Range<usize> {
        let start = self.edges.len();
        for _ in 0..n {
            self.add_state();
        }
        start..self.edges.len()
    }

    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q >= self.edges.len() {
            return Err(Error::contract(format!("state {q} does not exist")));
        }
        Ok(())
    }

    pub fn add_transition(&mut self, from: usize, marker: Marker, to: usize) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        self.alphabets.check_marker(&marker)?;
        self.edges[from].push((marker, to));
        Ok(())
    }

    pub fn add_epsilon(&mut self, from: usize, to: usize) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        self.eps[from].push(to);
        Ok(())
    }

    pub fn set_initial(&mut self, q: usize) -> Result<()> {
        self.check_state(q)?;
        self.initial = q;
        Ok(())
    }

    pub fn set_final(&mut self, q: usize) -> Result<()> {
        self.check_state(q)?;
        self.finals.insert(q);
        Ok(())
    }

    /// Eliminates ε-transitions and drops useless states.
    pub fn build(self) -> Result<ExtractorAutomaton> {
        if self.edges.is_empty() {
            return Ok(ExtractorAutomaton::empty_language(self.alphabets));
        }
        let n = self.edges.len();
        let mut edges: Vec<Vec<(Marker, usize)>> = vec![Vec::new(); n];
        let mut finals = vec![false; n];
        for q in 0..n {
            let closure = eps_closure(&self.eps, q);
            for &p in &closure {
                if self.finals.contains(&p) {
                    finals[q] = true;
                }
                edges[q].extend(self.edges[p].iter().cloned());
            }
        }
        Ok(ExtractorAutomaton::from_edges(
            self.alphabets,
            edges,
            self.initial,
            finals,
            true,
        ))
    }
}

fn eps_closure(eps: &[Vec<usize>], q: usize) -> Vec<usize> {
    let mut seen = vec![false; eps.len()];
    let mut stack = vec![q];
    seen[q] = true;
    let mut out = Vec::new();
    while let Some(p) = stack.pop() {
        out.push(p);
        for &r in &eps[p] {
            if !seen[r] {
                seen[r] = true;
                stack.push(r);
            }
        }
    }
    out
}

impl ExtractorAutomaton {
    pub fn builder(alphabets: Alphabets) -> AutomatonBuilder {
        AutomatonBuilder::new(alphabets)
    }

    /// Assembles an ε-free automaton from labelled edges. With `trim`, only
    /// states that are reachable and co-reachable survive (plus the initial
    /// state).
    pub(crate) fn from_edges(
        alphabets: Alphabets,
        edges: Vec<Vec<(Marker, usize)>>,
        initial: usize,
        finals: Vec<bool>,
        trim: bool,
    ) -> ExtractorAutomaton {
        let n = edges.len();
        let (keep, map) = if trim {
            let useful = useful_states(&edges, initial, &finals);
            let mut map = vec![usize::MAX; n];
            let mut keep = Vec::new();
            for q in 0..n {
                if useful[q] || q == initial {
                    map[q] = keep.len();
                    keep.push(q);
                }
            }
            (keep, map)
        } else {
            ((0..n).collect(), (0..n).collect())
        };

        let mut markers: Vec<Marker> = keep
            .iter()
            .flat_map(|&q| edges[q].iter())
            .filter(|(_, t)| map[*t] != usize::MAX)
            .map(|(m, _)| m.clone())
            .collect();
        markers.sort();
        markers.dedup();

        let mut trans = Vec::with_capacity(keep.len());
        let mut new_finals = Vec::with_capacity(keep.len());
        for &q in &keep {
            let mut row: Vec<(u32, u32)> = edges[q]
                .iter()
                .filter(|(_, t)| map[*t] != usize::MAX)
                .map(|(m, t)| {
                    let id = markers.binary_search(m).expect("interned marker");
                    (id as u32, map[*t] as u32)
                })
                .collect();
            row.sort_unstable();
            row.dedup();
            trans.push(row);
            new_finals.push(finals[q]);
        }
        let mut a = ExtractorAutomaton {
            alphabets,
            markers,
            trans,
            initial: map[initial],
            finals: new_finals,
            deterministic: false,
        };
        a.deterministic = a.compute_deterministic();
        a
    }

    fn compute_deterministic(&self) -> bool {
        self.trans
            .iter()
            .all(|row| row.windows(2).all(|w| w[0].0 != w[1].0))
    }

    /// The automaton accepting nothing: E(w) = ∅ for every w.
    pub fn empty_language(alphabets: Alphabets) -> Self {
        ExtractorAutomaton {
            alphabets,
            markers: Vec::new(),
            trans: vec![Vec::new()],
            initial: 0,
            finals: vec![false],
            deterministic: true,
        }
    }

    /// The empty extractor E^∅_Γ: {t^∅} on ε and ∅ elsewhere.
    pub fn epsilon(alphabets: Alphabets) -> Self {
        ExtractorAutomaton {
            alphabets,
            markers: Vec::new(),
            trans: vec![Vec::new()],
            initial: 0,
            finals: vec![true],
            deterministic: true,
        }
    }

    /// The atomic extractor E_{X,b} = ⟦{X_b}⟧.
    pub fn atomic(alphabets: Alphabets, marker: Marker) -> Result<Self> {
        alphabets.check_marker(&marker)?;
        Ok(ExtractorAutomaton {
            alphabets,
            markers: vec![marker],
            trans: vec![vec![(0, 1)], Vec::new()],
            initial: 0,
            finals: vec![false, true],
            deterministic: true,
        })
    }

    /// Δ*: every marker string over the context.
    pub fn universal(alphabets: Alphabets) -> Self {
        let markers = alphabets.all_markers();
        let row = (0..markers.len() as u32).map(|i| (i, 0)).collect();
        ExtractorAutomaton {
            alphabets,
            markers,
            trans: vec![row],
            initial: 0,
            finals: vec![true],
            deterministic: true,
        }
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn transition_count(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    /// |Q| + |δ|.
    pub fn size(&self) -> usize {
        self.state_count() + self.transition_count()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter(|(_, f)| **f)
            .map(|(q, _)| q)
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// The distinct markers used on transitions.
    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    /// Outgoing transitions of `q` as `(marker, target)`.
    pub fn transitions(&self, q: usize) -> impl Iterator<Item = (&Marker, usize)> + '_ {
        self.trans[q]
            .iter()
            .map(move |&(m, t)| (&self.markers[m as usize], t as usize))
    }

    pub(crate) fn raw_transitions(&self, q: usize) -> &[(u32, u32)] {
        &self.trans[q]
    }

    pub(crate) fn marker_id(&self, m: &Marker) -> Option<u32> {
        self.markers.binary_search(m).ok().map(|i| i as u32)
    }

    /// Targets of `q` on the interned marker `id`.
    pub(crate) fn successors_by_id(&self, q: usize, id: u32) -> impl Iterator<Item = usize> + '_ {
        let row = &self.trans[q];
        let lo = row.partition_point(|&(m, _)| m < id);
        let hi = row.partition_point(|&(m, _)| m <= id);
        row[lo..hi].iter().map(|&(_, t)| t as usize)
    }

    /// Targets of `q` on `m`.
    pub fn successors<'a>(&'a self, q: usize, m: &Marker) -> impl Iterator<Item = usize> + 'a {
        let id = self.marker_id(m);
        let row: &[(u32, u32)] = match id {
            Some(id) => {
                let row = &self.trans[q];
                let lo = row.partition_point(|&(x, _)| x < id);
                let hi = row.partition_point(|&(x, _)| x <= id);
                &row[lo..hi]
            }
            None => &[],
        };
        row.iter().map(|&(_, t)| t as usize)
    }

    /// Transitions of `q` whose marker has sign `b`.
    pub(crate) fn transitions_with_sign(&self, q: usize, b: char) -> &[(u32, u32)] {
        let row = &self.trans[q];
        let lo = row.partition_point(|&(m, _)| self.markers[m as usize].sign < b);
        let hi = row.partition_point(|&(m, _)| self.markers[m as usize].sign <= b);
        &row[lo..hi]
    }

    /// Whether W ∈ L(M).
    pub fn accepts(&self, w: &MarkerString) -> bool {
        let n = self.state_count();
        let mut cur = vec![false; n];
        cur[self.initial] = true;
        for m in w.markers() {
            let Some(id) = self.marker_id(m) else {
                return false;
            };
            let mut next = vec![false; n];
            let mut any = false;
            for q in (0..n).filter(|&q| cur[q]) {
                for t in self.successors_by_id(q, id) {
                    next[t] = true;
                    any = true;
                }
            }
            if !any {
                return false;
            }
            cur = next;
        }
        (0..n).any(|q| cur[q] && self.finals[q])
    }

    /// The same automaton, read over a larger context.
    pub fn with_alphabets(&self, alphabets: Alphabets) -> Result<Self> {
        for m in &self.markers {
            alphabets.check_marker(m)?;
        }
        let mut a = self.clone();
        a.alphabets = alphabets;
        Ok(a)
    }

    /// Edges in builder form.
    pub(crate) fn edges(&self) -> Vec<Vec<(Marker, usize)>> {
        (0..self.state_count())
            .map(|q| self.transitions(q).map(|(m, t)| (m.clone(), t)).collect())
            .collect()
    }

    /// Copies this automaton into a builder at an offset; returns the offset.
    pub(crate) fn copy_into(&self, b: &mut AutomatonBuilder) -> usize {
        let off = b.state_count();
        b.add_states(self.state_count());
        for q in 0..self.state_count() {
            for (m, t) in self.transitions(q) {
                b.edges[off + q].push((m.clone(), off + t));
            }
            if self.finals[q] {
                b.finals.insert(off + q);
            }
        }
        off
    }
}

fn useful_states(edges: &[Vec<(Marker, usize)>], initial: usize, finals: &[bool]) -> Vec<bool> {
    let n = edges.len();
    let mut fwd = vec![false; n];
    let mut stack = vec![initial];
    fwd[initial] = true;
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    while let Some(q) = stack.pop() {
        for (_, t) in &edges[q] {
            if !fwd[*t] {
                fwd[*t] = true;
                stack.push(*t);
            }
        }
    }
    for (q, row) in edges.iter().enumerate() {
        for (_, t) in row {
            rev[*t].push(q);
        }
    }
    let mut bwd = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&q| finals[q]).collect();
    for &q in &stack {
        bwd[q] = true;
    }
    while let Some(q) = stack.pop() {
        for &p in &rev[q] {
            if !bwd[p] {
                bwd[p] = true;
                stack.push(p);
            }
        }
    }
    (0..n).map(|q| fwd[q] && bwd[q]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabets {
        Alphabets::of("ab", &["x"])
    }

    #[test]
    fn atomic_accepts_single_marker() {
        let m = ExtractorAutomaton::atomic(ab(), Marker::of('a', &["x"])).unwrap();
        assert!(m.accepts(&"{x}:a".parse().unwrap()));
        assert!(!m.accepts(&"{}:a".parse().unwrap()));
        assert!(!m.accepts(&MarkerString::default()));
        assert!(m.is_deterministic());
    }

    #[test]
    fn atomic_rejects_foreign_symbols() {
        assert!(ExtractorAutomaton::atomic(ab(), Marker::bare('c')).is_err());
        assert!(ExtractorAutomaton::atomic(ab(), Marker::of('a', &["q"])).is_err());
    }

    #[test]
    fn epsilon_elimination() {
        let mut b = ExtractorAutomaton::builder(ab());
        let s = b.add_states(3);
        b.add_epsilon(s.start, 1).unwrap();
        b.add_transition(1, Marker::bare('a'), 2).unwrap();
        b.add_epsilon(2, 1).unwrap();
        b.set_final(2).unwrap();
        let m = b.build().unwrap();
        assert!(m.accepts(&"{}:a {}:a".parse().unwrap()));
        assert!(!m.accepts(&MarkerString::default()));
    }

    #[test]
    fn trimming_keeps_language() {
        let mut b = ExtractorAutomaton::builder(ab());
        b.add_states(4);
        b.add_transition(0, Marker::bare('a'), 1).unwrap();
        b.add_transition(0, Marker::bare('b'), 2).unwrap();
        b.add_transition(3, Marker::bare('b'), 1).unwrap();
        b.set_final(1).unwrap();
        let m = b.build().unwrap();
        assert_eq!(m.state_count(), 2);
        assert!(m.accepts(&"{}:a".parse().unwrap()));
        assert!(!m.accepts(&"{}:b".parse().unwrap()));
    }

    #[test]
    fn universal_accepts_everything() {
        let u = ExtractorAutomaton::universal(ab());
        assert!(u.accepts(&"{x}:a {}:b {x}:b".parse().unwrap()));
        assert_eq!(u.markers().len(), 4);
    }
}
