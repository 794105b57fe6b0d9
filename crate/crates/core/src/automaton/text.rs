//! The automaton text format.
//!
//! ```text
//! automaton
//! sigma: a b
//! gamma: x
//! initial: p
//! final: q
//! p -> p {}:a | {}:b
//! p -> q {x}:a
//! q -> q <eps>
//! ```
//!
//! `sigma` and `gamma` default to the symbols used on transitions. Lines
//! starting with `#` are comments.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use super::{AutomatonBuilder, ExtractorAutomaton};
use crate::error::{Error, Result};
use crate::marker::{Alphabets, Attr, AttrSet, Marker};
use crate::parse::{header, strip_comment, Cursor};

enum Label {
    Marker(Marker),
    Epsilon,
}

struct Line {
    line: usize,
    from: String,
    to: String,
    labels: Vec<Label>,
}

/// Parses sigma/gamma header values shared by all text formats.
pub(crate) fn parse_sigma(value: &str, line: usize) -> Result<BTreeSet<char>> {
    let mut out = BTreeSet::new();
    for tok in value.split_whitespace() {
        let mut cs = tok.chars();
        match (cs.next(), cs.next()) {
            (Some(c), None) => {
                out.insert(c);
            }
            _ => {
                return Err(Error::parse(
                    line,
                    1,
                    format!("terminal '{tok}' must be a single character"),
                ))
            }
        }
    }
    Ok(out)
}

pub(crate) fn parse_gamma(value: &str, line: usize) -> Result<AttrSet> {
    let mut out = AttrSet::new();
    for tok in value.split_whitespace() {
        if !tok.chars().all(crate::parse::is_ident_char) {
            return Err(Error::parse(line, 1, format!("bad attribute name '{tok}'")));
        }
        out.insert(Attr::new(tok));
    }
    Ok(out)
}

pub(crate) fn write_alphabets(f: &mut fmt::Formatter<'_>, a: &Alphabets) -> fmt::Result {
    f.write_str("sigma:")?;
    for c in &a.sigma {
        write!(f, " {c}")?;
    }
    f.write_str("\ngamma:")?;
    for x in &a.gamma {
        write!(f, " {x}")?;
    }
    f.write_str("\n")
}

impl FromStr for ExtractorAutomaton {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut sigma: Option<BTreeSet<char>> = None;
        let mut gamma: Option<AttrSet> = None;
        let mut initial: Option<(String, usize)> = None;
        let mut finals: Vec<(String, usize)> = Vec::new();
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
                if body == "automaton" {
                    continue;
                }
            }
            if let Some(v) = header(body, "sigma") {
                sigma = Some(parse_sigma(v, ln)?);
            } else if let Some(v) = header(body, "gamma") {
                gamma = Some(parse_gamma(v, ln)?);
            } else if let Some(v) = header(body, "initial") {
                let mut cur = Cursor::new(v, ln);
                let name = cur.ident()?;
                cur.skip_ws();
                if !cur.at_end() {
                    return Err(cur.error("exactly one initial state expected"));
                }
                initial = Some((name, ln));
            } else if let Some(v) = header(body, "final").or_else(|| header(body, "finals")) {
                for tok in v.split_whitespace() {
                    finals.push((tok.to_string(), ln));
                }
            } else {
                lines.push(parse_transition(raw, ln)?);
            }
        }

        let (initial, init_line) =
            initial.ok_or_else(|| Error::parse(1, 1, "missing 'initial:' line"))?;

        let used: Vec<&Marker> = lines
            .iter()
            .flat_map(|l| l.labels.iter())
            .filter_map(|l| match l {
                Label::Marker(m) => Some(m),
                Label::Epsilon => None,
            })
            .collect();
        let sigma = sigma.unwrap_or_else(|| used.iter().map(|m| m.sign).collect());
        let gamma =
            gamma.unwrap_or_else(|| used.iter().flat_map(|m| m.attrs.iter().cloned()).collect());
        let alphabets = Alphabets { sigma, gamma };

        let mut b = AutomatonBuilder::new(alphabets);
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut state = |b: &mut AutomatonBuilder, name: &str| -> usize {
            *ids.entry(name.to_string()).or_insert_with(|| b.add_state())
        };
        let q0 = state(&mut b, &initial);
        b.set_initial(q0).map_err(|e| at_line(e, init_line))?;
        for l in &lines {
            let p = state(&mut b, &l.from);
            let q = state(&mut b, &l.to);
            for label in &l.labels {
                match label {
                    Label::Marker(m) => b
                        .add_transition(p, m.clone(), q)
                        .map_err(|e| at_line(e, l.line))?,
                    Label::Epsilon => b.add_epsilon(p, q)?,
                }
            }
        }
        for (name, ln) in &finals {
            let q = state(&mut b, name);
            b.set_final(q).map_err(|e| at_line(e, *ln))?;
        }
        b.build()
    }
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Contract(msg) => Error::parse(line, 1, msg),
        other => other,
    }
}

fn parse_transition(raw: &str, ln: usize) -> Result<Line> {
    let body = strip_comment(raw);
    let mut cur = Cursor::new(body, ln);
    cur.skip_ws();
    let from = cur.ident()?;
    cur.skip_ws();
    if !cur.eat_str("->") {
        return Err(cur.error("expected '->' or a header line"));
    }
    cur.skip_ws();
    let to = cur.ident()?;
    let mut labels = Vec::new();
    loop {
        cur.skip_ws();
        if cur.eat_str("<eps>") {
            labels.push(Label::Epsilon);
        } else {
            labels.push(Label::Marker(cur.marker()?));
        }
        cur.skip_ws();
        if cur.at_end() {
            break;
        }
        cur.expect('|')?;
    }
    Ok(Line {
        line: ln,
        from,
        to,
        labels,
    })
}

impl fmt::Display for ExtractorAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("automaton\n")?;
        write_alphabets(f, &self.alphabets)?;
        writeln!(f, "initial: q{}", self.initial)?;
        f.write_str("final:")?;
        for q in self.finals() {
            write!(f, " q{q}")?;
        }
        f.write_str("\n")?;
        for p in 0..self.state_count() {
            let mut by_target: Vec<(usize, Vec<&Marker>)> = Vec::new();
            for (m, t) in self.transitions(p) {
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, v)) => v.push(m),
                    None => by_target.push((t, vec![m])),
                }
            }
            by_target.sort_by_key(|(t, _)| *t);
            for (t, ms) in by_target {
                write!(f, "q{p} -> q{t} ")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::MarkerString;
    use crate::Limits;

    const SAMPLE: &str = "automaton
sigma: a b
gamma: x
initial: p
final: q
# loop
p -> p {}:a | {}:b
p -> q {x}:a
q -> r <eps>
r -> q {}:b
";

    #[test]
    fn parses_sample() {
        let m: ExtractorAutomaton = SAMPLE.parse().unwrap();
        assert!(m.accepts(&"{}:b {x}:a".parse::<MarkerString>().unwrap()));
        assert!(m.accepts(&"{x}:a {}:b {}:b".parse::<MarkerString>().unwrap()));
        assert!(!m.accepts(&"{x}:b".parse::<MarkerString>().unwrap()));
    }

    #[test]
    fn round_trips() {
        let m: ExtractorAutomaton = SAMPLE.parse().unwrap();
        let again: ExtractorAutomaton = m.to_string().parse().unwrap();
        assert_eq!(
            m.language_equivalent(&again, &Limits::default()).unwrap(),
            None
        );
        assert_eq!(m.alphabets(), again.alphabets());
    }

    #[test]
    fn errors_carry_positions() {
        let bad = "automaton\ninitial: p\np -> q {x:a\n";
        match bad.parse::<ExtractorAutomaton>() {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 10);
            }
            other => panic!("{other:?}"),
        }
        let foreign = "sigma: a\ninitial: p\np -> q {}:b\n";
        assert!(matches!(
            foreign.parse::<ExtractorAutomaton>(),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!("p -> q {}:a".parse::<ExtractorAutomaton>().is_err());
    }
}
