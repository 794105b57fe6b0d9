//! Grammar × automaton products over triples (p, A, q), where A derives a
//! marker string that leads the automaton from p to q.
//!
//! Only productive triples are ever built, by a worklist fixpoint over the
//! normal form of the grammar. The same product answers emptiness of
//! L(G) ∩ L(M), yields a witness from back-pointers, and, when M is acyclic
//! (a slice of one document), enumerates the finite intersection.

use std::collections::{BTreeSet, HashMap};

use super::cnf::CnfGrammar;
use super::{ExtractorGrammar, GrammarBuilder, Rule, Symbol};
use crate::automaton::ExtractorAutomaton;
use crate::error::{Error, Result};
use crate::marker::{Alphabets, AttrSet, GammaTable, Marker, MarkerString};
use crate::slice::decode_all;
use crate::Limits;

/// An ε-free automaton over markers, queried one marker at a time.
pub trait MarkerNfa {
    fn state_count(&self) -> usize;
    fn initial(&self) -> usize;
    fn is_final(&self, q: usize) -> bool;
    /// Appends δ(q, m) to `out`.
    fn successors(&self, q: usize, m: &Marker, out: &mut Vec<usize>);
}

impl MarkerNfa for ExtractorAutomaton {
    fn state_count(&self) -> usize {
        ExtractorAutomaton::state_count(self)
    }

    fn initial(&self) -> usize {
        ExtractorAutomaton::initial(self)
    }

    fn is_final(&self, q: usize) -> bool {
        ExtractorAutomaton::is_final(self, q)
    }

    fn successors(&self, q: usize, m: &Marker, out: &mut Vec<usize>) {
        out.extend(ExtractorAutomaton::successors(self, q, m));
    }
}

/// The |w|+1-state automaton accepting every Γ-marker string of sign w.
#[derive(Debug, Clone)]
pub struct LineAutomaton {
    doc: Vec<char>,
    gamma: AttrSet,
}

impl LineAutomaton {
    pub fn new(w: &str, gamma: &AttrSet) -> Self {
        LineAutomaton {
            doc: w.chars().collect(),
            gamma: gamma.clone(),
        }
    }
}

impl MarkerNfa for LineAutomaton {
    fn state_count(&self) -> usize {
        self.doc.len() + 1
    }

    fn initial(&self) -> usize {
        0
    }

    fn is_final(&self, q: usize) -> bool {
        q == self.doc.len()
    }

    fn successors(&self, q: usize, m: &Marker, out: &mut Vec<usize>) {
        if q < self.doc.len() && self.doc[q] == m.sign && m.attrs.is_subset(&self.gamma) {
            out.push(q + 1);
        }
    }
}

/// An automaton restricted to marker strings of sign w: state `(p, i)` is
/// numbered `i·|Q| + p`.
#[derive(Debug, Clone)]
pub struct SliceAutomaton<'a> {
    m: &'a ExtractorAutomaton,
    doc: Vec<char>,
}

impl<'a> SliceAutomaton<'a> {
    pub fn new(m: &'a ExtractorAutomaton, w: &str) -> Self {
        SliceAutomaton {
            m,
            doc: w.chars().collect(),
        }
    }
}

impl MarkerNfa for SliceAutomaton<'_> {
    fn state_count(&self) -> usize {
        self.m.state_count() * (self.doc.len() + 1)
    }

    fn initial(&self) -> usize {
        self.m.initial()
    }

    fn is_final(&self, q: usize) -> bool {
        let k = self.m.state_count();
        q / k == self.doc.len() && self.m.is_final(q % k)
    }

    fn successors(&self, q: usize, m: &Marker, out: &mut Vec<usize>) {
        let k = self.m.state_count();
        let (p, i) = (q % k, q / k);
        if i < self.doc.len() && self.doc[i] == m.sign {
            out.extend(self.m.successors(p, m).map(|t| (i + 1) * k + t));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Back {
    Terminal(u32),
    Binary { left: u32, right: u32 },
}

/// The productive triples of G × M.
#[derive(Debug, Clone)]
pub struct TripleProduct {
    triples: Vec<(u32, u32, u32)>,
    index: HashMap<(u32, u32, u32), u32>,
    derivs: Vec<Vec<Back>>,
    roots: Vec<u32>,
    epsilon: bool,
    steps: u64,
}

impl TripleProduct {
    /// Runs the fixpoint. With `all_derivations`, every way of deriving each
    /// triple is kept (needed for enumeration and grammar output); otherwise
    /// only the first.
    pub fn new(cnf: &CnfGrammar, nfa: &impl MarkerNfa, all_derivations: bool) -> Self {
        let nt = cnf.nonterminals;
        let mut by_first: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nt];
        let mut by_second: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nt];
        for &(a, b, c) in &cnf.binary {
            by_first[b].push((a as u32, c as u32));
            by_second[c].push((a as u32, b as u32));
        }
        let mut tp = TripleProduct {
            triples: Vec::new(),
            index: HashMap::new(),
            derivs: Vec::new(),
            roots: Vec::new(),
            epsilon: cnf.nullable_start && nfa.is_final(nfa.initial()),
            steps: 0,
        };
        let mut work: Vec<u32> = Vec::new();
        let add = |tp: &mut TripleProduct,
                   key: (u32, u32, u32),
                   back: Back,
                   work: &mut Vec<u32>| {
            match tp.index.get(&key) {
                Some(&id) => {
                    if all_derivations {
                        tp.derivs[id as usize].push(back);
                    }
                }
                None => {
                    let id = tp.triples.len() as u32;
                    tp.triples.push(key);
                    tp.index.insert(key, id);
                    tp.derivs.push(vec![back]);
                    work.push(id);
                }
            }
        };

        let mut succ = Vec::new();
        for &(a, t) in &cnf.terminal {
            let m = &cnf.markers[t as usize];
            for p in 0..nfa.state_count() {
                succ.clear();
                nfa.successors(p, m, &mut succ);
                tp.steps += 1;
                for &q in &succ {
                    add(
                        &mut tp,
                        (p as u32, a as u32, q as u32),
                        Back::Terminal(t),
                        &mut work,
                    );
                }
            }
        }

        let mut starting: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        let mut ending: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        while let Some(x) = work.pop() {
            let (p, b, q) = tp.triples[x as usize];
            starting.entry((b, p)).or_default().push(x);
            ending.entry((b, q)).or_default().push(x);
            for &(a, c) in &by_first[b as usize] {
                if let Some(ys) = starting.get(&(c, q)) {
                    for &y in ys.clone().iter() {
                        tp.steps += 1;
                        let r = tp.triples[y as usize].2;
                        add(
                            &mut tp,
                            (p, a, r),
                            Back::Binary { left: x, right: y },
                            &mut work,
                        );
                    }
                }
            }
            for &(a, c) in &by_second[b as usize] {
                if let Some(ys) = ending.get(&(c, p)) {
                    for &y in ys.clone().iter() {
                        if y == x {
                            // A → B B over (p, B, p): already combined above.
                            continue;
                        }
                        tp.steps += 1;
                        let o = tp.triples[y as usize].0;
                        add(
                            &mut tp,
                            (o, a, q),
                            Back::Binary { left: y, right: x },
                            &mut work,
                        );
                    }
                }
            }
        }

        let init = nfa.initial() as u32;
        let s = cnf.start as u32;
        tp.roots = tp
            .triples
            .iter()
            .enumerate()
            .filter(|(_, &(p, a, q))| p == init && a == s && nfa.is_final(q as usize))
            .map(|(i, _)| i as u32)
            .collect();
        tp
    }

    /// Whether L(G) ∩ L(M) = ∅.
    pub fn is_empty(&self) -> bool {
        !self.epsilon && self.roots.is_empty()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    /// Elementary work performed: successor queries and combinations.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn expand(&self, cnf: &CnfGrammar, root: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            match self.derivs[x as usize][0] {
                Back::Terminal(t) => out.push(t),
                Back::Binary { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        let _ = cnf;
        out
    }

    /// Some marker string in L(G) ∩ L(M).
    pub fn witness(&self, cnf: &CnfGrammar) -> Option<MarkerString> {
        if self.epsilon {
            return Some(MarkerString::default());
        }
        let &root = self.roots.first()?;
        Some(MarkerString::new(
            self.expand(cnf, root)
                .into_iter()
                .map(|t| cnf.markers[t as usize].clone())
                .collect(),
        ))
    }

    /// Every marker string of L(G) ∩ L(M), sorted, for an acyclic M. Needs a
    /// product built with all derivations. With a `limit`, only the first
    /// strings are kept, which is exact when every triple spans strings of a
    /// single length (a layered M such as a document line).
    pub fn enumerate(
        &self,
        cnf: &CnfGrammar,
        limit: Option<usize>,
        limits: &Limits,
    ) -> Result<Vec<MarkerString>> {
        let cap = limit.unwrap_or(usize::MAX);
        // Post-order over triples reachable from the roots, rejecting cycles.
        let n = self.triples.len();
        let mut state = vec![0u8; n];
        let mut order = Vec::new();
        for &r in &self.roots {
            if state[r as usize] != 0 {
                continue;
            }
            let mut stack = vec![(r, 0usize)];
            state[r as usize] = 1;
            while let Some(&mut (x, ref mut k)) = stack.last_mut() {
                let children: Vec<u32> = self.derivs[x as usize]
                    .iter()
                    .flat_map(|b| match *b {
                        Back::Terminal(_) => vec![],
                        Back::Binary { left, right } => vec![left, right],
                    })
                    .collect();
                if *k < children.len() {
                    let c = children[*k];
                    *k += 1;
                    match state[c as usize] {
                        0 => {
                            state[c as usize] = 1;
                            stack.push((c, 0));
                        }
                        1 => {
                            return Err(Error::contract(
                                "intersection language is infinite; enumeration needs an acyclic automaton",
                            ))
                        }
                        _ => {}
                    }
                } else {
                    state[x as usize] = 2;
                    order.push(x);
                    stack.pop();
                }
            }
        }

        let mut sets: HashMap<u32, BTreeSet<Vec<u32>>> = HashMap::new();
        for &x in &order {
            let mut set = BTreeSet::new();
            for b in &self.derivs[x as usize] {
                match *b {
                    Back::Terminal(t) => {
                        set.insert(vec![t]);
                    }
                    Back::Binary { left, right } => {
                        let (l, r) = (&sets[&left], &sets[&right]);
                        let pairs = l.iter().flat_map(|a| r.iter().map(move |c| (a, c)));
                        for (a, c) in pairs.take(cap) {
                            let mut v = a.clone();
                            v.extend_from_slice(c);
                            set.insert(v);
                        }
                    }
                }
                while set.len() > cap {
                    set.pop_last();
                }
                limits.check_rows(set.len())?;
            }
            sets.insert(x, set);
        }
        let mut all: BTreeSet<Vec<u32>> = BTreeSet::new();
        if self.epsilon {
            all.insert(Vec::new());
        }
        for r in &self.roots {
            all.extend(sets[r].iter().cloned());
            while all.len() > cap {
                all.pop_last();
            }
            limits.check_rows(all.len())?;
        }
        all = all.into_iter().take(cap).collect();
        Ok(all
            .into_iter()
            .map(|v| {
                MarkerString::new(
                    v.into_iter()
                        .map(|t| cnf.markers[t as usize].clone())
                        .collect(),
                )
            })
            .collect())
    }

    /// The grammar with one nonterminal per productive triple. Needs a
    /// product built with all derivations.
    pub fn to_grammar(&self, cnf: &CnfGrammar, alphabets: Alphabets) -> ExtractorGrammar {
        let mut b = GrammarBuilder::new(alphabets);
        let s = b.nonterminal("S");
        let ids: Vec<usize> = self
            .triples
            .iter()
            .map(|&(p, a, q)| b.nonterminal(&format!("T{p}_{a}_{q}")))
            .collect();
        for (x, ds) in self.derivs.iter().enumerate() {
            for d in ds {
                let body = match *d {
                    Back::Terminal(t) => vec![Symbol::Terminal(cnf.markers[t as usize].clone())],
                    Back::Binary { left, right } => vec![
                        Symbol::Nonterminal(ids[left as usize]),
                        Symbol::Nonterminal(ids[right as usize]),
                    ],
                };
                b.rules.push(Rule { head: ids[x], body });
            }
        }
        for &r in &self.roots {
            b.rules.push(Rule {
                head: s,
                body: vec![Symbol::Nonterminal(ids[r as usize])],
            });
        }
        if self.epsilon {
            b.rules.push(Rule {
                head: s,
                body: Vec::new(),
            });
        }
        b.build_with(s).trimmed()
    }
}

impl ExtractorGrammar {
    /// A grammar for L(G) ∩ L(M).
    pub fn intersect_automaton(&self, m: &ExtractorAutomaton) -> ExtractorGrammar {
        let tp = TripleProduct::new(self.cnf(), m, true);
        tp.to_grammar(self.cnf(), self.alphabets.union(m.alphabets()))
    }

    /// The marker strings of L(G) with sign `w`, sorted, at most `limit` of
    /// them.
    pub fn slice_strings(
        &self,
        w: &str,
        limit: Option<usize>,
        limits: &Limits,
    ) -> Result<Vec<MarkerString>> {
        let line = LineAutomaton::new(w, &self.alphabets.gamma);
        TripleProduct::new(self.cnf(), &line, true).enumerate(self.cnf(), limit, limits)
    }

    /// E(w) = ⟦slice_w(L(G))⟧.
    pub fn evaluate(&self, w: &str, limits: &Limits) -> Result<GammaTable> {
        self.evaluate_limited(w, None, limits)
    }

    /// E(w), truncated to the first `limit` rows in marker-string order.
    pub fn evaluate_limited(
        &self,
        w: &str,
        limit: Option<usize>,
        limits: &Limits,
    ) -> Result<GammaTable> {
        let strings = self.slice_strings(w, limit, limits)?;
        decode_all(&strings, &self.alphabets.gamma, w.chars().count())
    }
}
