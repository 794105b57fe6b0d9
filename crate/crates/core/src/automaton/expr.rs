//! Algebraic expressions over atomic extractors, compiled bottom-up into
//! automata.
//!
//! ```text
//! expression
//! sigma: a b
//! gamma: x
//! ({}:a | {}:b)* {x}:a ({}:a | {}:b)*
//! ```
//!
//! From loosest to tightest binding: `|` (union), `\` (difference), `&`
//! (intersection), `join[n|u|i|d]`, juxtaposition (concatenation), prefix `!`
//! (complement), postfix `*`. Atoms are markers, `eps` (the empty extractor),
//! `none` (the extractor with empty tables), parenthesised expressions and
//! the unary forms `pi{x,y}(e)`, `merge(x,y,u|i|d)(e)` and `rho(x->y)(e)`.

use std::fmt;
use std::str::FromStr;

use super::text::{parse_gamma, parse_sigma, write_alphabets};
use super::ExtractorAutomaton;
use crate::error::{Error, Result};
use crate::marker::{Alphabets, Attr, AttrSet, Marker};
use crate::parse::{header, strip_comment, Cursor};
use crate::table::{JoinKind, SetOp, UnaryOp};
use crate::Limits;

/// An expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractorExpr {
    Atom(Marker),
    Epsilon,
    Nothing,
    Union(Box<ExtractorExpr>, Box<ExtractorExpr>),
    Intersection(Box<ExtractorExpr>, Box<ExtractorExpr>),
    Difference(Box<ExtractorExpr>, Box<ExtractorExpr>),
    Concat(Box<ExtractorExpr>, Box<ExtractorExpr>),
    Join(JoinKind, Box<ExtractorExpr>, Box<ExtractorExpr>),
    Complement(Box<ExtractorExpr>),
    Star(Box<ExtractorExpr>),
    Unary(UnaryOp, Box<ExtractorExpr>),
}

impl ExtractorExpr {
    pub fn atom(m: &str) -> Result<Self> {
        Ok(ExtractorExpr::Atom(m.parse()?))
    }

    pub fn union(a: Self, b: Self) -> Self {
        ExtractorExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Self, b: Self) -> Self {
        ExtractorExpr::Concat(Box::new(a), Box::new(b))
    }

    pub fn star(a: Self) -> Self {
        ExtractorExpr::Star(Box::new(a))
    }

    /// Compiles with every atom read as a (Σ, Γ)-extractor over `ctx`.
    pub fn compile(&self, ctx: &Alphabets, limits: &Limits) -> Result<ExtractorAutomaton> {
        use ExtractorExpr::*;
        Ok(match self {
            Atom(m) => ExtractorAutomaton::atomic(ctx.clone(), m.clone())?,
            Epsilon => ExtractorAutomaton::epsilon(ctx.clone()),
            Nothing => ExtractorAutomaton::empty_language(ctx.clone()),
            Union(a, b) => a.compile(ctx, limits)?.union(&b.compile(ctx, limits)?)?,
            Intersection(a, b) => a
                .compile(ctx, limits)?
                .intersection(&b.compile(ctx, limits)?)?,
            Difference(a, b) => a
                .compile(ctx, limits)?
                .difference(&b.compile(ctx, limits)?, limits)?,
            Concat(a, b) => a.compile(ctx, limits)?.concat(&b.compile(ctx, limits)?)?,
            Join(k, a, b) => a.compile(ctx, limits)?.join(&b.compile(ctx, limits)?, *k)?,
            Complement(a) => a.compile(ctx, limits)?.complement(limits)?,
            Star(a) => a.compile(ctx, limits)?.star()?,
            Unary(f, a) => a.compile(ctx, limits)?.apply_unary(f)?,
        })
    }

    fn collect_symbols(&self, out: &mut Alphabets) {
        use ExtractorExpr::*;
        match self {
            Atom(m) => {
                out.sigma.insert(m.sign);
                out.gamma.extend(m.attrs.iter().cloned());
            }
            Epsilon | Nothing => {}
            Union(a, b) | Intersection(a, b) | Difference(a, b) | Concat(a, b) | Join(_, a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Complement(a) | Star(a) => a.collect_symbols(out),
            Unary(f, a) => {
                a.collect_symbols(out);
                match f {
                    UnaryOp::Project(keep) => out.gamma.extend(keep.iter().cloned()),
                    UnaryOp::Merge { keep, drop, .. } => {
                        out.gamma.insert(keep.clone());
                        out.gamma.insert(drop.clone());
                    }
                    UnaryOp::Rename { from, .. } => {
                        out.gamma.insert(from.clone());
                    }
                }
            }
        }
    }
}

impl fmt::Display for ExtractorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ExtractorExpr::*;
        match self {
            Atom(m) => write!(f, "{m}"),
            Epsilon => f.write_str("eps"),
            Nothing => f.write_str("none"),
            Union(a, b) => write!(f, "({a} | {b})"),
            Intersection(a, b) => write!(f, "({a} & {b})"),
            Difference(a, b) => write!(f, "({a} \\ {b})"),
            Concat(a, b) => write!(f, "({a} {b})"),
            Join(k, a, b) => write!(f, "({a} join[{}] {b})", k.symbol()),
            Complement(a) => write!(f, "!{a}"),
            Star(a) => write!(f, "({a})*"),
            Unary(op, a) => write!(f, "{op}({a})"),
        }
    }
}

/// An expression together with the context of its atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expression {
    pub alphabets: Alphabets,
    pub expr: ExtractorExpr,
}

impl Expression {
    pub fn compile(&self, limits: &Limits) -> Result<ExtractorAutomaton> {
        self.expr.compile(&self.alphabets, limits)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expression\n")?;
        write_alphabets(f, &self.alphabets)?;
        writeln!(f, "{}", self.expr)
    }
}

impl FromStr for ExtractorExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            cur: Cursor::new(s, 1),
        };
        let e = p.union()?;
        p.cur.skip_ws();
        if !p.cur.at_end() {
            return Err(p.cur.error("unexpected input"));
        }
        Ok(e)
    }
}

impl FromStr for Expression {
    type Err = Error;

    /// Header lines (`expression`, `sigma:`, `gamma:`) come first; the rest
    /// of the text is the expression. Missing alphabets are inferred from
    /// the atoms.
    fn from_str(text: &str) -> Result<Self> {
        let mut sigma = None;
        let mut gamma = None;
        let mut body = String::new();
        let mut body_line = 0;
        let mut in_body = false;
        let mut first = true;
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = strip_comment(raw);
            let t = line.trim();
            if !in_body {
                if t.is_empty() {
                    continue;
                }
                if first && t == "expression" {
                    first = false;
                    continue;
                }
                first = false;
                if let Some(v) = header(t, "sigma") {
                    sigma = Some(parse_sigma(v, ln)?);
                    continue;
                }
                if let Some(v) = header(t, "gamma") {
                    gamma = Some(parse_gamma(v, ln)?);
                    continue;
                }
                in_body = true;
                body_line = ln;
            }
            body.push_str(line);
            body.push('\n');
        }
        if !in_body {
            return Err(Error::parse(1, 1, "missing expression"));
        }
        let mut p = Parser {
            cur: Cursor::new(&body, body_line),
        };
        let expr = p.union()?;
        p.cur.skip_ws();
        if !p.cur.at_end() {
            return Err(p.cur.error("unexpected input"));
        }
        let mut inferred = Alphabets::default();
        expr.collect_symbols(&mut inferred);
        let alphabets = Alphabets {
            sigma: sigma.unwrap_or(inferred.sigma),
            gamma: gamma.unwrap_or(inferred.gamma),
        };
        Ok(Expression { alphabets, expr })
    }
}

struct Parser<'a> {
    cur: Cursor<'a>,
}

impl Parser<'_> {
    fn union(&mut self) -> Result<ExtractorExpr> {
        let mut e = self.difference()?;
        loop {
            self.cur.skip_ws();
            if !self.cur.eat('|') {
                return Ok(e);
            }
            let r = self.difference()?;
            e = ExtractorExpr::Union(Box::new(e), Box::new(r));
        }
    }

    fn difference(&mut self) -> Result<ExtractorExpr> {
        let mut e = self.intersection()?;
        loop {
            self.cur.skip_ws();
            if !self.cur.eat('\\') {
                return Ok(e);
            }
            let r = self.intersection()?;
            e = ExtractorExpr::Difference(Box::new(e), Box::new(r));
        }
    }

    fn intersection(&mut self) -> Result<ExtractorExpr> {
        let mut e = self.join()?;
        loop {
            self.cur.skip_ws();
            if !self.cur.eat('&') {
                return Ok(e);
            }
            let r = self.join()?;
            e = ExtractorExpr::Intersection(Box::new(e), Box::new(r));
        }
    }

    fn join(&mut self) -> Result<ExtractorExpr> {
        let mut e = self.concat()?;
        loop {
            self.cur.skip_ws();
            if !self.cur.eat_str("join[") {
                return Ok(e);
            }
            let name = self.cur.ident()?;
            let kind = JoinKind::from_symbol(&name)
                .ok_or_else(|| self.cur.error(format!("unknown join kind '{name}'")))?;
            self.cur.expect(']')?;
            let r = self.concat()?;
            e = ExtractorExpr::Join(kind, Box::new(e), Box::new(r));
        }
    }

    fn starts_operand(&self) -> bool {
        match self.cur.peek() {
            Some('{') | Some('(') | Some('!') => true,
            _ => ["eps", "none", "pi{", "merge(", "rho("]
                .iter()
                .any(|k| self.cur.looking_at(k)),
        }
    }

    fn concat(&mut self) -> Result<ExtractorExpr> {
        let mut e = self.prefix()?;
        loop {
            self.cur.skip_ws();
            if !self.starts_operand() {
                return Ok(e);
            }
            let r = self.prefix()?;
            e = ExtractorExpr::Concat(Box::new(e), Box::new(r));
        }
    }

    fn prefix(&mut self) -> Result<ExtractorExpr> {
        self.cur.skip_ws();
        if self.cur.eat('!') {
            let e = self.prefix()?;
            return Ok(ExtractorExpr::Complement(Box::new(e)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<ExtractorExpr> {
        let mut e = self.primary()?;
        loop {
            self.cur.skip_ws();
            if !self.cur.eat('*') {
                return Ok(e);
            }
            e = ExtractorExpr::Star(Box::new(e));
        }
    }

    fn parenthesised(&mut self) -> Result<ExtractorExpr> {
        self.cur.skip_ws();
        self.cur.expect('(')?;
        let e = self.union()?;
        self.cur.skip_ws();
        self.cur.expect(')')?;
        Ok(e)
    }

    fn attr(&mut self) -> Result<Attr> {
        self.cur.skip_ws();
        Ok(Attr::from(self.cur.ident()?))
    }

    fn primary(&mut self) -> Result<ExtractorExpr> {
        self.cur.skip_ws();
        if self.cur.looking_at("(") {
            return self.parenthesised();
        }
        if self.cur.eat_str("pi{") {
            let mut keep = AttrSet::new();
            self.cur.skip_ws();
            if !self.cur.eat('}') {
                loop {
                    keep.insert(self.attr()?);
                    self.cur.skip_ws();
                    if self.cur.eat('}') {
                        break;
                    }
                    self.cur.expect(',')?;
                }
            }
            let e = self.parenthesised()?;
            return Ok(ExtractorExpr::Unary(UnaryOp::Project(keep), Box::new(e)));
        }
        if self.cur.eat_str("merge(") {
            let keep = self.attr()?;
            self.cur.skip_ws();
            self.cur.expect(',')?;
            let drop = self.attr()?;
            self.cur.skip_ws();
            self.cur.expect(',')?;
            self.cur.skip_ws();
            let name = self.cur.ident()?;
            let op = SetOp::from_symbol(&name)
                .ok_or_else(|| self.cur.error(format!("unknown set operation '{name}'")))?;
            self.cur.skip_ws();
            self.cur.expect(')')?;
            let e = self.parenthesised()?;
            return Ok(ExtractorExpr::Unary(
                UnaryOp::Merge { keep, drop, op },
                Box::new(e),
            ));
        }
        if self.cur.eat_str("rho(") {
            let from = self.attr()?;
            self.cur.skip_ws();
            if !self.cur.eat_str("->") {
                return Err(self.cur.error("expected '->'"));
            }
            let to = self.attr()?;
            self.cur.skip_ws();
            self.cur.expect(')')?;
            let e = self.parenthesised()?;
            return Ok(ExtractorExpr::Unary(
                UnaryOp::Rename { from, to },
                Box::new(e),
            ));
        }
        if self.cur.eat_str("eps") {
            return Ok(ExtractorExpr::Epsilon);
        }
        if self.cur.eat_str("none") {
            return Ok(ExtractorExpr::Nothing);
        }
        if self.cur.peek() == Some('{') {
            return Ok(ExtractorExpr::Atom(self.cur.marker()?));
        }
        Err(match self.cur.peek() {
            Some(c) => self
                .cur
                .error(format!("expected an expression, found '{c}'")),
            None => self.cur.error("expected an expression, found end of input"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::MarkerString;

    #[test]
    fn precedence() {
        let e: ExtractorExpr = "{}:a {}:b* | {x}:a & {x}:a".parse().unwrap();
        let want = ExtractorExpr::Union(
            Box::new(ExtractorExpr::concat(
                ExtractorExpr::atom("{}:a").unwrap(),
                ExtractorExpr::star(ExtractorExpr::atom("{}:b").unwrap()),
            )),
            Box::new(ExtractorExpr::Intersection(
                Box::new(ExtractorExpr::atom("{x}:a").unwrap()),
                Box::new(ExtractorExpr::atom("{x}:a").unwrap()),
            )),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "pi{x}(({x,y}:a)*) join[n] !{}:b",
            "merge(x, y, i)({x}:a | {y}:a) \\ none",
            "rho(x->z)(eps {x}:a)",
        ] {
            let e: ExtractorExpr = src.parse().unwrap();
            let again: ExtractorExpr = e.to_string().parse().unwrap();
            assert_eq!(e, again, "{src}");
        }
    }

    #[test]
    fn compiles_occurrence_extractor() {
        let ex: Expression = "({}:a | {}:b)* {x}:a ({}:a | {}:b)*".parse().unwrap();
        assert_eq!(ex.alphabets, Alphabets::of("ab", &["x"]));
        let m = ex.compile(&Limits::default()).unwrap();
        assert!(m.accepts(&"{}:b {x}:a {}:a".parse::<MarkerString>().unwrap()));
        assert!(!m.accepts(&"{x}:a {x}:a".parse::<MarkerString>().unwrap()));
    }

    #[test]
    fn parse_errors_have_positions() {
        let src = "expression\nsigma: a\n{}:a |\n  ) ";
        match src.parse::<Expression>() {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (4, 3)),
            other => panic!("{other:?}"),
        }
        assert!("join[q]".parse::<ExtractorExpr>().is_err());
        assert!("{}:a join[q] {}:a".parse::<ExtractorExpr>().is_err());
    }
}
