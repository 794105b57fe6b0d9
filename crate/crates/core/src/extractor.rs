//! Extractors given either as automata or as grammars, with the operator
//! algebra applied at the language level.

use std::fmt;

use crate::automaton::{Expression, ExtractorAutomaton};
use crate::error::{Error, Result};
use crate::grammar::ExtractorGrammar;
use crate::marker::{encode_tuple, Alphabets, GammaTable, GammaTuple, MarkerString};
use crate::oracle::universe;
use crate::parse::strip_comment;
use crate::table::{join_tables, set_op_tables, JoinKind, SetOp, UnaryOp};
use crate::Limits;

/// A regular or context-free extractor.
#[derive(Debug, Clone)]
pub enum Extractor {
    Regular(ExtractorAutomaton),
    ContextFree(ExtractorGrammar),
}

/// An operator of the extractor algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operator {
    Set(SetOp),
    Complement,
    Concat,
    Star,
    Join(JoinKind),
    Unary(UnaryOp),
}

impl Operator {
    pub fn arity(&self) -> usize {
        match self {
            Operator::Set(_) | Operator::Concat | Operator::Join(_) => 2,
            Operator::Complement | Operator::Star | Operator::Unary(_) => 1,
        }
    }

    /// Applies the operator to `args`, which must have [`Operator::arity`]
    /// elements.
    pub fn apply(&self, args: &[&Extractor], limits: &Limits) -> Result<Extractor> {
        if args.len() != self.arity() {
            return Err(Error::contract(format!(
                "{self} takes {} operand(s), got {}",
                self.arity(),
                args.len()
            )));
        }
        match self {
            Operator::Set(op) => args[0].set_op(args[1], *op, limits),
            Operator::Complement => args[0].complement(limits),
            Operator::Concat => args[0].concat(args[1]),
            Operator::Star => args[0].star(),
            Operator::Join(kind) => args[0].join(args[1], *kind),
            Operator::Unary(f) => args[0].apply_unary(f),
        }
    }

    /// Whether [`Operator::apply`] can represent the result for these
    /// operands.
    pub fn is_closed_for(&self, args: &[&Extractor]) -> bool {
        let regular = |i: usize| args.get(i).is_some_and(|e| e.is_regular());
        match self {
            Operator::Set(SetOp::Union)
            | Operator::Concat
            | Operator::Star
            | Operator::Unary(_) => true,
            Operator::Set(SetOp::Intersection) => regular(0) || regular(1),
            Operator::Set(SetOp::Difference) => regular(1),
            Operator::Complement => regular(0),
            Operator::Join(_) => regular(0) && regular(1),
        }
    }

    /// The table of the operator's result on `w`. When no grammar represents
    /// the result, the operand tables are combined directly; a complement
    /// then materializes every row over the document, within the row budget.
    pub fn evaluate(&self, args: &[&Extractor], w: &str, limits: &Limits) -> Result<GammaTable> {
        if args.len() == self.arity() && !self.is_closed_for(args) {
            return match self {
                Operator::Set(op) => set_op_tables(
                    &args[0].evaluate(w, limits)?,
                    &args[1].evaluate(w, limits)?,
                    *op,
                ),
                Operator::Join(kind) => join_tables(
                    &args[0].evaluate(w, limits)?,
                    &args[1].evaluate(w, limits)?,
                    *kind,
                ),
                Operator::Complement => table_complement(args[0], w, limits),
                _ => unreachable!("union, concatenation, star and unary operators are closed"),
            };
        }
        self.apply(args, limits)?.evaluate(w, limits)
    }
}

fn table_complement(e: &Extractor, w: &str, limits: &Limits) -> Result<GammaTable> {
    let alph = e.alphabets();
    let len = w.chars().count();
    let mut out = GammaTable::new(alph.gamma.clone(), len);
    if !w.chars().all(|c| alph.sigma.contains(&c)) {
        return Ok(out);
    }
    let bits = len * alph.gamma.len();
    let rows = if bits >= usize::BITS as usize {
        usize::MAX
    } else {
        1usize << bits
    };
    limits.check_rows(rows)?;
    let inside = e.evaluate(w, limits)?;
    for t in universe(len, &alph.gamma)? {
        if !inside.contains(&t) {
            out.insert(t)?;
        }
    }
    Ok(out)
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Set(SetOp::Union) => f.write_str("union"),
            Operator::Set(SetOp::Intersection) => f.write_str("intersection"),
            Operator::Set(SetOp::Difference) => f.write_str("difference"),
            Operator::Complement => f.write_str("complement"),
            Operator::Concat => f.write_str("concat"),
            Operator::Star => f.write_str("star"),
            Operator::Join(k) => write!(f, "join[{}]", k.symbol()),
            Operator::Unary(u) => write!(f, "{u}"),
        }
    }
}

fn not_closed(what: &str) -> Error {
    Error::contract(format!(
        "{what} is not supported for context-free extractors: the result need not be context-free"
    ))
}

impl Extractor {
    /// Reads an automaton, grammar or expression. The first line (`automaton`,
    /// `grammar` or `expression`) selects the format; without it, a text with
    /// an `initial:` line is an automaton, one with `->` rules a grammar, and
    /// anything else an expression.
    pub fn parse(text: &str, limits: &Limits) -> Result<Extractor> {
        let lines: Vec<&str> = text
            .lines()
            .map(|l| strip_comment(l).trim())
            .filter(|l| !l.is_empty())
            .collect();
        let kind = match lines.first() {
            Some(&"automaton") => "automaton",
            Some(&"grammar") => "grammar",
            Some(&"expression") => "expression",
            _ if lines.iter().any(|l| l.starts_with("initial:")) => "automaton",
            _ if lines
                .iter()
                .any(|l| l.contains("->") && !l.contains("rho(")) =>
            {
                "grammar"
            }
            _ => "expression",
        };
        match kind {
            "automaton" => Ok(Extractor::Regular(text.parse()?)),
            "grammar" => Ok(Extractor::ContextFree(text.parse()?)),
            _ => Ok(Extractor::Regular(
                text.parse::<Expression>()?.compile(limits)?,
            )),
        }
    }

    pub fn alphabets(&self) -> &Alphabets {
        match self {
            Extractor::Regular(m) => m.alphabets(),
            Extractor::ContextFree(g) => g.alphabets(),
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(self, Extractor::Regular(_))
    }

    /// |M| (states plus transitions) or |G| (rules plus body symbols).
    pub fn size(&self) -> usize {
        match self {
            Extractor::Regular(m) => m.size(),
            Extractor::ContextFree(g) => g.size(),
        }
    }

    pub fn accepts(&self, w: &MarkerString) -> bool {
        match self {
            Extractor::Regular(m) => m.accepts(w),
            Extractor::ContextFree(g) => g.accepts(w),
        }
    }

    /// Whether `t` ∈ E(w).
    pub fn tuple_member(&self, w: &str, t: &GammaTuple) -> Result<bool> {
        Ok(self.accepts(&encode_tuple(w, t)?))
    }

    /// slice_w(L), sorted, at most `limit` strings.
    pub fn slice_strings(
        &self,
        w: &str,
        limit: Option<usize>,
        limits: &Limits,
    ) -> Result<Vec<MarkerString>> {
        match self {
            Extractor::Regular(m) => m.slice_dag(w).enumerate(limit, limits),
            Extractor::ContextFree(g) => g.slice_strings(w, limit, limits),
        }
    }

    /// E(w).
    pub fn evaluate(&self, w: &str, limits: &Limits) -> Result<GammaTable> {
        self.evaluate_limited(w, None, limits)
    }

    pub fn evaluate_limited(
        &self,
        w: &str,
        limit: Option<usize>,
        limits: &Limits,
    ) -> Result<GammaTable> {
        match self {
            Extractor::Regular(m) => m.evaluate_limited(w, limit, limits),
            Extractor::ContextFree(g) => g.evaluate_limited(w, limit, limits),
        }
    }

    /// The same extractor over a larger context.
    pub fn with_alphabets(&self, alphabets: Alphabets) -> Result<Extractor> {
        Ok(match self {
            Extractor::Regular(m) => Extractor::Regular(m.with_alphabets(alphabets)?),
            Extractor::ContextFree(g) => Extractor::ContextFree(g.with_alphabets(alphabets)?),
        })
    }

    /// E1 ∪ E2, E1 ∩ E2 or E1 ∖ E2. With a grammar operand, ∩ needs the
    /// other side regular and ∖ needs the right side regular.
    pub fn set_op(&self, other: &Extractor, op: SetOp, limits: &Limits) -> Result<Extractor> {
        use Extractor::*;
        match (self, other, op) {
            (Regular(a), Regular(b), SetOp::Union) => Ok(Regular(a.union(b)?)),
            (Regular(a), Regular(b), SetOp::Intersection) => Ok(Regular(a.intersection(b)?)),
            (Regular(a), Regular(b), SetOp::Difference) => Ok(Regular(a.difference(b, limits)?)),
            (_, _, SetOp::Union) => {
                let (a, b) = (to_grammar(self), to_grammar(other));
                Ok(ContextFree(a.union(&b)?))
            }
            (ContextFree(g), Regular(m), SetOp::Intersection)
            | (Regular(m), ContextFree(g), SetOp::Intersection) => {
                Ok(ContextFree(g.intersect_automaton(m)))
            }
            (ContextFree(g), Regular(m), SetOp::Difference) => {
                let ctx = g.alphabets().union(m.alphabets());
                let not_m = m.with_alphabets(ctx)?.complement(limits)?;
                Ok(ContextFree(g.intersect_automaton(&not_m)))
            }
            (_, _, SetOp::Intersection) => Err(not_closed("intersection of two grammars")),
            (_, _, SetOp::Difference) => Err(not_closed("difference with a grammar on the right")),
        }
    }

    /// ¬E over the extractor's own context.
    pub fn complement(&self, limits: &Limits) -> Result<Extractor> {
        match self {
            Extractor::Regular(m) => Ok(Extractor::Regular(m.complement(limits)?)),
            Extractor::ContextFree(_) => Err(not_closed("complement")),
        }
    }

    pub fn concat(&self, other: &Extractor) -> Result<Extractor> {
        match (self, other) {
            (Extractor::Regular(a), Extractor::Regular(b)) => Ok(Extractor::Regular(a.concat(b)?)),
            _ => Ok(Extractor::ContextFree(
                to_grammar(self).concat(&to_grammar(other))?,
            )),
        }
    }

    pub fn star(&self) -> Result<Extractor> {
        match self {
            Extractor::Regular(m) => Ok(Extractor::Regular(m.star()?)),
            Extractor::ContextFree(g) => Ok(Extractor::ContextFree(g.star()?)),
        }
    }

    pub fn join(&self, other: &Extractor, kind: JoinKind) -> Result<Extractor> {
        match (self, other) {
            (Extractor::Regular(a), Extractor::Regular(b)) => {
                Ok(Extractor::Regular(a.join(b, kind)?))
            }
            _ => Err(not_closed("join")),
        }
    }

    pub fn apply_unary(&self, f: &UnaryOp) -> Result<Extractor> {
        match self {
            Extractor::Regular(m) => Ok(Extractor::Regular(m.apply_unary(f)?)),
            Extractor::ContextFree(g) => Ok(Extractor::ContextFree(g.apply_unary(f)?)),
        }
    }
}

/// A grammar for the language of `e`: one nonterminal per automaton state.
fn to_grammar(e: &Extractor) -> ExtractorGrammar {
    match e {
        Extractor::Regular(m) => m.to_grammar(),
        Extractor::ContextFree(g) => g.clone(),
    }
}

impl ExtractorAutomaton {
    /// The right-linear grammar with rules p → m q and p → ε for final p.
    pub fn to_grammar(&self) -> ExtractorGrammar {
        use crate::grammar::Symbol;
        let mut b = ExtractorGrammar::builder(self.alphabets().clone());
        let ids: Vec<usize> = (0..self.state_count())
            .map(|q| b.nonterminal(&format!("Q{q}")))
            .collect();
        for p in 0..self.state_count() {
            for (m, q) in self.transitions(p) {
                b.add_rule(
                    ids[p],
                    vec![Symbol::Terminal(m.clone()), Symbol::Nonterminal(ids[q])],
                )
                .expect("markers come from the same context");
            }
            if self.is_final(p) {
                b.add_rule(ids[p], Vec::new()).expect("valid head");
            }
        }
        b.build(&format!("Q{}", self.initial()))
            .expect("initial state is named")
    }
}

impl From<ExtractorAutomaton> for Extractor {
    fn from(m: ExtractorAutomaton) -> Self {
        Extractor::Regular(m)
    }
}

impl From<ExtractorGrammar> for Extractor {
    fn from(g: ExtractorGrammar) -> Self {
        Extractor::ContextFree(g)
    }
}

impl fmt::Display for Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extractor::Regular(m) => write!(f, "{m}"),
            Extractor::ContextFree(g) => write!(f, "{g}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::Marker;

    fn ctx() -> Alphabets {
        Alphabets::of("ab", &["x"])
    }

    #[test]
    fn detects_formats() {
        let l = Limits::default();
        assert!(Extractor::parse("initial: p\nfinal: p\np -> p {}:a\n", &l)
            .unwrap()
            .is_regular());
        assert!(!Extractor::parse("S -> {}:a S | <eps>\n", &l)
            .unwrap()
            .is_regular());
        assert!(Extractor::parse("rho(x->y)({x}:a)\n", &l)
            .unwrap()
            .is_regular());
        assert!(Extractor::parse("expression\n{x}:a*\n", &l)
            .unwrap()
            .is_regular());
    }

    #[test]
    fn automaton_to_grammar() {
        let m = ExtractorAutomaton::atomic(ctx(), Marker::of('a', &["x"]))
            .unwrap()
            .star()
            .unwrap();
        let g = m.to_grammar();
        for s in ["", "{x}:a", "{x}:a {x}:a", "{}:a"] {
            let w: MarkerString = s.parse().unwrap();
            assert_eq!(g.accepts(&w), m.accepts(&w), "{s}");
        }
    }

    #[test]
    fn mixed_operators() {
        let l = Limits::default();
        let g = Extractor::parse("S -> {x}:a S {}:b | <eps>\n", &l).unwrap();
        let m = Extractor::parse("({x}:a | {}:b)*", &l).unwrap();
        let i = Operator::Set(SetOp::Intersection)
            .apply(&[&g, &m], &l)
            .unwrap();
        assert_eq!(i.evaluate("aabb", &l).unwrap().len(), 1);
        let pairs = Extractor::parse("({x}:a {}:b)*", &l).unwrap();
        let d = Operator::Set(SetOp::Difference)
            .apply(&[&g, &pairs], &l)
            .unwrap();
        assert_eq!(d.evaluate("aabb", &l).unwrap().len(), 1);
        assert!(d.evaluate("ab", &l).unwrap().is_empty());
        assert!(Operator::Complement.apply(&[&g], &l).is_err());
        assert!(Operator::Concat.apply(&[&g], &l).is_err());
        let c = Operator::Concat.apply(&[&m, &g], &l).unwrap();
        assert!(!c.is_regular());
        assert_eq!(c.evaluate("bab", &l).unwrap().len(), 1);
    }
}
