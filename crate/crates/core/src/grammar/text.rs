//! The grammar text format.
//!
//! ```text
//! grammar
//! sigma: a b
//! gamma: x y
//! start: S
//! S -> {x}:a S {y}:b | <eps>
//! ```
//!
//! A body is a sequence of nonterminal names and markers; `<eps>` is the
//! empty body. `start` defaults to the head of the first rule, `sigma` and
//! `gamma` to the symbols used in bodies. Lines starting with `#` are
//! comments.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{ExtractorGrammar, GrammarBuilder, Symbol};
use crate::automaton::text::{parse_gamma, parse_sigma, write_alphabets};
use crate::error::{Error, Result};
use crate::marker::{Alphabets, AttrSet, Marker};
use crate::parse::{header, strip_comment, Cursor};

enum Item {
    N(String),
    T(Marker),
}

struct Line {
    line: usize,
    head: String,
    bodies: Vec<Vec<Item>>,
}

impl FromStr for ExtractorGrammar {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut sigma: Option<BTreeSet<char>> = None;
        let mut gamma: Option<AttrSet> = None;
        let mut start: Option<(String, usize)> = None;
        let mut lines = Vec::new();
        let mut seen_content = false;

        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let body = strip_comment(raw).trim();
            if body.is_empty() {
                continue;
            }
            if !seen_content {
                seen_content = true;
                if body == "grammar" {
                    continue;
                }
            }
            if let Some(v) = header(body, "sigma") {
                sigma = Some(parse_sigma(v, ln)?);
            } else if let Some(v) = header(body, "gamma") {
                gamma = Some(parse_gamma(v, ln)?);
            } else if let Some(v) = header(body, "start") {
                let mut cur = Cursor::new(v, ln);
                let name = cur.ident()?;
                cur.skip_ws();
                if !cur.at_end() {
                    return Err(cur.error("exactly one start symbol expected"));
                }
                start = Some((name, ln));
            } else {
                lines.push(parse_rule(raw, ln)?);
            }
        }

        let used: Vec<&Marker> = lines
            .iter()
            .flat_map(|l| l.bodies.iter().flatten())
            .filter_map(|i| match i {
                Item::T(m) => Some(m),
                Item::N(_) => None,
            })
            .collect();
        let sigma = sigma.unwrap_or_else(|| used.iter().map(|m| m.sign).collect());
        let gamma =
            gamma.unwrap_or_else(|| used.iter().flat_map(|m| m.attrs.iter().cloned()).collect());
        let mut b = GrammarBuilder::new(Alphabets { sigma, gamma });

        let (start, start_line) = match start {
            Some(s) => s,
            None => {
                let first = lines
                    .first()
                    .ok_or_else(|| Error::parse(1, 1, "grammar has no rules"))?;
                (first.head.clone(), first.line)
            }
        };
        let s = b.nonterminal(&start);
        for l in &lines {
            let h = b.nonterminal(&l.head);
            for body in &l.bodies {
                let syms = body
                    .iter()
                    .map(|i| match i {
                        Item::N(n) => Symbol::Nonterminal(b.nonterminal(n)),
                        Item::T(m) => Symbol::Terminal(m.clone()),
                    })
                    .collect();
                b.add_rule(h, syms).map_err(|e| match e {
                    Error::Contract(msg) => Error::parse(l.line, 1, msg),
                    other => other,
                })?;
            }
        }
        if !lines.iter().any(|l| l.head == start) {
            return Err(Error::parse(
                start_line,
                1,
                format!("start symbol '{start}' has no rules"),
            ));
        }
        Ok(b.build_with(s))
    }
}

fn parse_rule(raw: &str, ln: usize) -> Result<Line> {
    let mut cur = Cursor::new(strip_comment(raw), ln);
    cur.skip_ws();
    let head = cur.ident()?;
    cur.skip_ws();
    if !cur.eat_str("->") {
        return Err(cur.error("expected '->' or a header line"));
    }
    let mut bodies = Vec::new();
    let mut body = Vec::new();
    let mut epsilon = false;
    loop {
        cur.skip_ws();
        match cur.peek() {
            None | Some('|') => {
                if body.is_empty() && !epsilon {
                    return Err(cur.error("empty alternative; write <eps>"));
                }
                bodies.push(std::mem::take(&mut body));
                epsilon = false;
                if cur.bump().is_none() {
                    break;
                }
            }
            Some('{') => {
                if epsilon {
                    return Err(cur.error("<eps> must stand alone"));
                }
                body.push(Item::T(cur.marker()?));
            }
            Some('<') => {
                if !cur.eat_str("<eps>") {
                    return Err(cur.error("expected <eps>"));
                }
                if epsilon || !body.is_empty() {
                    return Err(cur.error("<eps> must stand alone"));
                }
                epsilon = true;
            }
            Some(_) => {
                if epsilon {
                    return Err(cur.error("<eps> must stand alone"));
                }
                body.push(Item::N(cur.ident()?));
            }
        }
    }
    Ok(Line {
        line: ln,
        head,
        bodies,
    })
}

impl fmt::Display for ExtractorGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("grammar\n")?;
        write_alphabets(f, &self.alphabets)?;
        writeln!(f, "start: {}", self.names[self.start])?;
        let mut heads: Vec<usize> = Vec::new();
        for r in &self.rules {
            if !heads.contains(&r.head) {
                heads.push(r.head);
            }
        }
        for h in heads {
            write!(f, "{} ->", self.names[h])?;
            for (k, r) in self.rules.iter().filter(|r| r.head == h).enumerate() {
                if k > 0 {
                    f.write_str(" |")?;
                }
                if r.body.is_empty() {
                    f.write_str(" <eps>")?;
                }
                for s in &r.body {
                    match s {
                        Symbol::Nonterminal(n) => write!(f, " {}", self.names[*n])?,
                        Symbol::Terminal(m) => write!(f, " {m}")?,
                    }
                }
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::MarkerString;

    const SAMPLE: &str = "grammar
sigma: a b
gamma: x y
# nested pairs
S -> {x}:a S {y}:b | <eps>
";

    fn ms(s: &str) -> MarkerString {
        s.parse().unwrap()
    }

    #[test]
    fn parses_sample() {
        let g: ExtractorGrammar = SAMPLE.parse().unwrap();
        assert!(g.accepts(&ms("{x}:a {x}:a {y}:b {y}:b")));
        assert!(g.accepts(&MarkerString::default()));
        assert!(!g.accepts(&ms("{x}:a {y}:b {x}:a {y}:b")));
    }

    #[test]
    fn round_trips() {
        let g: ExtractorGrammar = "start: T\nS -> {}:a\nT -> S S | {x}:b T\n".parse().unwrap();
        let again: ExtractorGrammar = g.to_string().parse().unwrap();
        assert_eq!(again.names()[again.start()], "T");
        for s in ["{}:a {}:a", "{x}:b {}:a {}:a", "{}:a"] {
            assert_eq!(g.accepts(&ms(s)), again.accepts(&ms(s)), "{s}");
        }
        assert_eq!(g.alphabets(), again.alphabets());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            "S -> {x}:a |\n".parse::<ExtractorGrammar>(),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            "sigma: a\nS -> {}:b\n".parse::<ExtractorGrammar>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!("start: T\nS -> {}:a\n".parse::<ExtractorGrammar>().is_err());
        assert!("".parse::<ExtractorGrammar>().is_err());
        assert!("S -> <eps> {}:a\n".parse::<ExtractorGrammar>().is_err());
    }
}
