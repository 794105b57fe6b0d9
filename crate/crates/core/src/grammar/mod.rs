//! Context-free extractors: grammars whose terminals are signed markers.

mod cnf;
mod cyk;
pub mod intersect;
mod text;

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::marker::{Alphabets, Marker, MarkerString};
use crate::table::UnaryOp;

pub use cnf::CnfGrammar;
pub use cyk::CykRun;
pub use intersect::{LineAutomaton, MarkerNfa, SliceAutomaton, TripleProduct};

/// A right-hand-side symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Nonterminal(usize),
    Terminal(Marker),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: usize,
    pub body: Vec<Symbol>,
}

/// G = (V, Δ, P, S). The normal form used by the parsing algorithms is
/// computed once on first use.
#[derive(Debug, Clone)]
pub struct ExtractorGrammar {
    alphabets: Alphabets,
    names: Vec<String>,
    rules: Vec<Rule>,
    start: usize,
    cnf: OnceLock<CnfGrammar>,
}

/// Builds grammars by nonterminal name.
#[derive(Debug, Clone)]
pub struct GrammarBuilder {
    alphabets: Alphabets,
    names: Vec<String>,
    ids: HashMap<String, usize>,
    rules: Vec<Rule>,
}

/// A body symbol for [`GrammarBuilder::rule`].
#[derive(Debug, Clone)]
pub enum Sym<'a> {
    N(&'a str),
    T(Marker),
}

impl GrammarBuilder {
    pub fn new(alphabets: Alphabets) -> Self {
        GrammarBuilder {
            alphabets,
            names: Vec::new(),
            ids: HashMap::new(),
            rules: Vec::new(),
        }
    }

    /// The id of `name`, creating it if needed.
    pub fn nonterminal(&mut self, name: &str) -> usize {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    /// A nonterminal with a name not used so far, derived from `base`.
    pub fn fresh(&mut self, base: &str) -> usize {
        let mut name = base.to_string();
        let mut k = 1;
        while self.ids.contains_key(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        self.nonterminal(&name)
    }

    pub fn add_rule(&mut self, head: usize, body: Vec<Symbol>) -> Result<()> {
        if head >= self.names.len() {
            return Err(Error::contract(format!(
                "nonterminal {head} does not exist"
            )));
        }
        for s in &body {
            match s {
                Symbol::Terminal(m) => self.alphabets.check_marker(m)?,
                Symbol::Nonterminal(n) if *n >= self.names.len() => {
                    return Err(Error::contract(format!("nonterminal {n} does not exist")))
                }
                Symbol::Nonterminal(_) => {}
            }
        }
        self.rules.push(Rule { head, body });
        Ok(())
    }

    /// `b.rule("S", &[Sym::T(m), Sym::N("S")])`.
    pub fn rule(&mut self, head: &str, body: &[Sym<'_>]) -> Result<()> {
        let h = self.nonterminal(head);
        let body = body
            .iter()
            .map(|s| match s {
                Sym::N(n) => Symbol::Nonterminal(self.nonterminal(n)),
                Sym::T(m) => Symbol::Terminal(m.clone()),
            })
            .collect();
        self.add_rule(h, body)
    }

    /// Copies `g` in with fresh names; returns the id map.
    fn absorb(&mut self, g: &ExtractorGrammar) -> Vec<usize> {
        let map: Vec<usize> = g.names.iter().map(|n| self.fresh(n)).collect();
        for r in &g.rules {
            let body = r
                .body
                .iter()
                .map(|s| match s {
                    Symbol::Nonterminal(n) => Symbol::Nonterminal(map[*n]),
                    t => t.clone(),
                })
                .collect();
            self.rules.push(Rule {
                head: map[r.head],
                body,
            });
        }
        map
    }

    pub fn build(self, start: &str) -> Result<ExtractorGrammar> {
        let start = *self
            .ids
            .get(start)
            .ok_or_else(|| Error::contract(format!("start symbol '{start}' has no rules")))?;
        Ok(self.build_with(start))
    }

    fn build_with(self, start: usize) -> ExtractorGrammar {
        ExtractorGrammar {
            alphabets: self.alphabets,
            names: self.names,
            rules: self.rules,
            start,
            cnf: OnceLock::new(),
        }
    }
}

impl ExtractorGrammar {
    pub fn builder(alphabets: Alphabets) -> GrammarBuilder {
        GrammarBuilder::new(alphabets)
    }

    /// A grammar generating nothing.
    pub fn empty_language(alphabets: Alphabets) -> Self {
        let mut b = GrammarBuilder::new(alphabets);
        let s = b.nonterminal("S");
        b.build_with(s)
    }

    /// The grammar S → ε, i.e. the empty extractor.
    pub fn epsilon(alphabets: Alphabets) -> Self {
        let mut b = GrammarBuilder::new(alphabets);
        let s = b.nonterminal("S");
        b.rules.push(Rule {
            head: s,
            body: Vec::new(),
        });
        b.build_with(s)
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Number of rules plus total body length.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| 1 + r.body.len()).sum()
    }

    /// The markers occurring in rule bodies.
    pub fn markers(&self) -> Vec<Marker> {
        let mut v: Vec<Marker> = self
            .rules
            .iter()
            .flat_map(|r| r.body.iter())
            .filter_map(|s| match s {
                Symbol::Terminal(m) => Some(m.clone()),
                Symbol::Nonterminal(_) => None,
            })
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// The normal form, computed once.
    pub fn cnf(&self) -> &CnfGrammar {
        self.cnf.get_or_init(|| CnfGrammar::from_grammar(self))
    }

    /// Whether W ∈ L(G).
    pub fn accepts(&self, w: &MarkerString) -> bool {
        self.cnf().accepts(w)
    }

    /// Whether L(G) = ∅.
    pub fn is_empty_language(&self) -> bool {
        !self.productive()[self.start]
    }

    pub(crate) fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.names.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for r in &self.rules {
                if !prod[r.head]
                    && r.body.iter().all(|s| match s {
                        Symbol::Terminal(_) => true,
                        Symbol::Nonterminal(n) => prod[*n],
                    })
                {
                    prod[r.head] = true;
                    changed = true;
                }
            }
        }
        prod
    }

    /// The same grammar read over a larger context.
    pub fn with_alphabets(&self, alphabets: Alphabets) -> Result<Self> {
        for m in self.markers() {
            alphabets.check_marker(&m)?;
        }
        let mut g = self.clone();
        g.alphabets = alphabets;
        Ok(g)
    }

    /// L(G1) ∪ L(G2).
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut b = GrammarBuilder::new(self.alphabets.union(&other.alphabets));
        let s = b.fresh("S");
        let m1 = b.absorb(self);
        let m2 = b.absorb(other);
        b.add_rule(s, vec![Symbol::Nonterminal(m1[self.start])])?;
        b.add_rule(s, vec![Symbol::Nonterminal(m2[other.start])])?;
        Ok(b.build_with(s))
    }

    /// L(G1) · L(G2).
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut b = GrammarBuilder::new(self.alphabets.union(&other.alphabets));
        let s = b.fresh("S");
        let m1 = b.absorb(self);
        let m2 = b.absorb(other);
        b.add_rule(
            s,
            vec![
                Symbol::Nonterminal(m1[self.start]),
                Symbol::Nonterminal(m2[other.start]),
            ],
        )?;
        Ok(b.build_with(s))
    }

    /// L(G)*: S → S S1 | ε.
    pub fn star(&self) -> Result<Self> {
        let mut b = GrammarBuilder::new(self.alphabets.clone());
        let s = b.fresh("S");
        let m = b.absorb(self);
        b.add_rule(
            s,
            vec![Symbol::Nonterminal(s), Symbol::Nonterminal(m[self.start])],
        )?;
        b.add_rule(s, Vec::new())?;
        Ok(b.build_with(s))
    }

    fn map_markers(&self, alphabets: Alphabets, f: impl Fn(&Marker) -> Marker) -> Self {
        let rules = self
            .rules
            .iter()
            .map(|r| Rule {
                head: r.head,
                body: r
                    .body
                    .iter()
                    .map(|s| match s {
                        Symbol::Terminal(m) => Symbol::Terminal(f(m)),
                        n => n.clone(),
                    })
                    .collect(),
            })
            .collect();
        ExtractorGrammar {
            alphabets,
            names: self.names.clone(),
            rules,
            start: self.start,
            cnf: OnceLock::new(),
        }
    }

    /// f(L(G)): every marker occurrence rewritten.
    pub fn apply_unary(&self, f: &UnaryOp) -> Result<Self> {
        let gamma = f.output_gamma(&self.alphabets.gamma)?;
        let alphabets = Alphabets {
            sigma: self.alphabets.sigma.clone(),
            gamma,
        };
        Ok(self.map_markers(alphabets, |m| f.apply_marker(m)))
    }

    /// Every marker X_a replaced by ∅_a.
    pub fn erase_to_sign(&self) -> Self {
        self.map_markers(self.alphabets.clone(), |m| Marker::bare(m.sign))
    }

    /// Drops unproductive and unreachable nonterminals and their rules.
    pub fn trimmed(&self) -> Self {
        let prod = self.productive();
        let mut reach = vec![false; self.names.len()];
        reach[self.start] = true;
        let mut stack = vec![self.start];
        while let Some(a) = stack.pop() {
            for r in self.rules.iter().filter(|r| r.head == a) {
                let ok = r.body.iter().all(|s| match s {
                    Symbol::Nonterminal(n) => prod[*n],
                    Symbol::Terminal(_) => true,
                });
                if !ok {
                    continue;
                }
                for s in &r.body {
                    if let Symbol::Nonterminal(n) = s {
                        if !reach[*n] {
                            reach[*n] = true;
                            stack.push(*n);
                        }
                    }
                }
            }
        }
        let mut b = GrammarBuilder::new(self.alphabets.clone());
        let mut map = vec![usize::MAX; self.names.len()];
        map[self.start] = b.nonterminal(&self.names[self.start]);
        for (i, n) in self.names.iter().enumerate() {
            if reach[i] && prod[i] && i != self.start {
                map[i] = b.nonterminal(n);
            }
        }
        let mut seen = HashSet::new();
        for r in &self.rules {
            if map[r.head] == usize::MAX || !prod[r.head] {
                continue;
            }
            let mut body = Vec::with_capacity(r.body.len());
            let mut ok = true;
            for s in &r.body {
                match s {
                    Symbol::Nonterminal(n) if map[*n] == usize::MAX || !prod[*n] => ok = false,
                    Symbol::Nonterminal(n) => body.push(Symbol::Nonterminal(map[*n])),
                    t => body.push(t.clone()),
                }
            }
            if ok && seen.insert((map[r.head], body.clone())) {
                b.rules.push(Rule {
                    head: map[r.head],
                    body,
                });
            }
        }
        let start = map[self.start];
        b.build_with(start)
    }
}
