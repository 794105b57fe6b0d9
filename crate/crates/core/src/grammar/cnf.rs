//! Chomsky normal form: rules A → B C and A → m, plus S → ε when the
//! language contains ε. The start symbol never occurs on a right-hand side.

use std::collections::{BTreeSet, HashMap};

use super::{ExtractorGrammar, Symbol};
use crate::marker::{Marker, MarkerString};

#[derive(Debug, Clone)]
pub struct CnfGrammar {
    pub(crate) nonterminals: usize,
    pub(crate) start: usize,
    pub(crate) nullable_start: bool,
    pub(crate) markers: Vec<Marker>,
    pub(crate) terminal: Vec<(usize, u32)>,
    pub(crate) binary: Vec<(usize, usize, usize)>,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum S {
    N(usize),
    T(u32),
}

impl CnfGrammar {
    pub(crate) fn from_grammar(g: &ExtractorGrammar) -> CnfGrammar {
        let markers = g.markers();
        let mid = |m: &Marker| markers.binary_search(m).expect("marker interned") as u32;

        let mut n = g.names.len();
        let mut rules: Vec<(usize, Vec<S>)> = g
            .rules
            .iter()
            .map(|r| {
                let body = r
                    .body
                    .iter()
                    .map(|s| match s {
                        Symbol::Nonterminal(x) => S::N(*x),
                        Symbol::Terminal(m) => S::T(mid(m)),
                    })
                    .collect();
                (r.head, body)
            })
            .collect();

        // START
        let start = n;
        n += 1;
        rules.push((start, vec![S::N(g.start)]));

        // TERM
        let mut term_nt: HashMap<u32, usize> = HashMap::new();
        let mut extra = Vec::new();
        for (_, body) in rules.iter_mut() {
            if body.len() < 2 {
                continue;
            }
            for s in body.iter_mut() {
                if let S::T(t) = *s {
                    let nt = *term_nt.entry(t).or_insert_with(|| {
                        n += 1;
                        extra.push((n - 1, vec![S::T(t)]));
                        n - 1
                    });
                    *s = S::N(nt);
                }
            }
        }
        rules.extend(extra);

        // BIN
        let mut binned = Vec::with_capacity(rules.len());
        for (head, body) in rules {
            if body.len() <= 2 {
                binned.push((head, body));
                continue;
            }
            let mut h = head;
            let k = body.len();
            for s in body.iter().take(k - 2) {
                let next = n;
                n += 1;
                binned.push((h, vec![s.clone(), S::N(next)]));
                h = next;
            }
            binned.push((h, vec![body[k - 2].clone(), body[k - 1].clone()]));
        }

        // DEL
        let mut nullable = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for (h, b) in &binned {
                if !nullable[*h] && b.iter().all(|s| matches!(s, S::N(x) if nullable[*x])) {
                    nullable[*h] = true;
                    changed = true;
                }
            }
        }
        let mut deleted: BTreeSet<(usize, Vec<S>)> = BTreeSet::new();
        for (h, b) in &binned {
            let k = b.len();
            for mask in 0u32..(1 << k) {
                let mut ok = true;
                let mut body = Vec::new();
                for (i, s) in b.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        match s {
                            S::N(x) if nullable[*x] => {}
                            _ => ok = false,
                        }
                    } else {
                        body.push(s.clone());
                    }
                }
                if ok && !body.is_empty() {
                    deleted.insert((*h, body));
                }
            }
        }
        let nullable_start = nullable[start];

        // UNIT
        let mut terminal: BTreeSet<(usize, u32)> = BTreeSet::new();
        let mut binary: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        let mut by_head: Vec<Vec<&Vec<S>>> = vec![Vec::new(); n];
        for (h, b) in &deleted {
            by_head[*h].push(b);
        }
        for a in 0..n {
            let mut seen = vec![false; n];
            let mut stack = vec![a];
            seen[a] = true;
            while let Some(x) = stack.pop() {
                for b in &by_head[x] {
                    match b.as_slice() {
                        [S::T(t)] => {
                            terminal.insert((a, *t));
                        }
                        [S::N(y)] => {
                            if !seen[*y] {
                                seen[*y] = true;
                                stack.push(*y);
                            }
                        }
                        [S::N(p), S::N(q)] => {
                            binary.insert((a, *p, *q));
                        }
                        _ => unreachable!("TERM and BIN leave only these shapes"),
                    }
                }
            }
        }

        let mut cnf = CnfGrammar {
            nonterminals: n,
            start,
            nullable_start,
            markers,
            terminal: terminal.into_iter().collect(),
            binary: binary.into_iter().collect(),
        };
        cnf.reduce();
        cnf
    }

    /// Removes unproductive and unreachable nonterminals.
    fn reduce(&mut self) {
        let n = self.nonterminals;
        let mut prod = vec![false; n];
        for &(a, _) in &self.terminal {
            prod[a] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b, c) in &self.binary {
                if !prod[a] && prod[b] && prod[c] {
                    prod[a] = true;
                    changed = true;
                }
            }
        }
        self.binary
            .retain(|&(a, b, c)| prod[a] && prod[b] && prod[c]);
        let mut reach = vec![false; n];
        reach[self.start] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b, c) in &self.binary {
                if reach[a] {
                    for x in [b, c] {
                        if !reach[x] {
                            reach[x] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        let mut map = vec![usize::MAX; n];
        let mut k = 0;
        for a in 0..n {
            if reach[a] && (prod[a] || a == self.start) {
                map[a] = k;
                k += 1;
            }
        }
        self.terminal = self
            .terminal
            .iter()
            .filter(|(a, _)| map[*a] != usize::MAX)
            .map(|&(a, t)| (map[a], t))
            .collect();
        self.binary = self
            .binary
            .iter()
            .filter(|(a, _, _)| map[*a] != usize::MAX)
            .map(|&(a, b, c)| (map[a], map[b], map[c]))
            .collect();
        self.start = map[self.start];
        self.nonterminals = k;
    }

    pub fn nonterminal_count(&self) -> usize {
        self.nonterminals
    }

    pub fn rule_count(&self) -> usize {
        self.terminal.len() + self.binary.len() + usize::from(self.nullable_start)
    }

    pub fn derives_epsilon(&self) -> bool {
        self.nullable_start
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    pub(crate) fn marker_id(&self, m: &Marker) -> Option<u32> {
        self.markers.binary_search(m).ok().map(|i| i as u32)
    }

    pub(crate) fn ids_of(&self, w: &MarkerString) -> Option<Vec<u32>> {
        w.markers().iter().map(|m| self.marker_id(m)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Sym;
    use crate::marker::Alphabets;

    #[test]
    fn epsilon_only() {
        let g = ExtractorGrammar::epsilon(Alphabets::of("a", &[]));
        let c = g.cnf();
        assert!(c.derives_epsilon());
        assert_eq!(c.terminal.len() + c.binary.len(), 0);
    }

    #[test]
    fn long_bodies_and_units() {
        let a = Marker::bare('a');
        let mut b = ExtractorGrammar::builder(Alphabets::of("a", &[]));
        b.rule(
            "S",
            &[Sym::N("A"), Sym::T(a.clone()), Sym::N("A"), Sym::N("B")],
        )
        .unwrap();
        b.rule("A", &[Sym::N("B")]).unwrap();
        b.rule("B", &[Sym::T(a.clone())]).unwrap();
        b.rule("B", &[]).unwrap();
        let g = b.build("S").unwrap();
        let c = g.cnf();
        assert!(!c.derives_epsilon());
        // 4 body symbols: size stays linear.
        assert!(c.rule_count() <= 4 * g.size() * g.size());
        for k in 0..6 {
            let w = MarkerString::new(vec![a.clone(); k]);
            assert_eq!(g.accepts(&w), (1..=4).contains(&k), "a^{k}");
        }
    }
}
