//! A small character cursor shared by the text formats.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::marker::{Attr, Marker};

pub(crate) struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
            _src: src,
        }
    }

    /// An error at the current position. Newlines inside the source advance
    /// the reported line.
    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        let upto = &self.chars[..self.pos.min(self.chars.len())];
        let newlines = upto.iter().filter(|&&c| c == '\n').count();
        let col = match upto.iter().rposition(|&c| c == '\n') {
            Some(nl) => self.pos - nl,
            None => self.pos + 1,
        };
        Error::parse(self.line + newlines, col, message)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub(crate) fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    pub(crate) fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(match self.peek() {
                Some(f) => self.error(format!("expected '{c}', found '{f}'")),
                None => self.error(format!("expected '{c}', found end of input")),
            })
        }
    }

    pub(crate) fn looking_at(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(k, c)| self.peek_at(k) == Some(c))
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        if self.looking_at(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    /// A name made of alphanumerics, `_`, `'` and `.`.
    pub(crate) fn ident(&mut self) -> Result<String, Error> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_ident_char(c)) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.peek() {
                Some(c) => self.error(format!("expected a name, found '{c}'")),
                None => self.error("expected a name, found end of input"),
            });
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    /// `{x,y}:a`
    pub(crate) fn marker(&mut self) -> Result<Marker, Error> {
        self.expect('{')?;
        let mut attrs = BTreeSet::new();
        self.skip_ws();
        if !self.eat('}') {
            loop {
                self.skip_ws();
                let name = self.ident()?;
                attrs.insert(Attr::from(name));
                self.skip_ws();
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        self.expect(':')?;
        match self.bump() {
            Some(c) if !c.is_whitespace() => Ok(Marker::new(c, attrs)),
            _ => Err(self.error("expected a terminal after ':'")),
        }
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

/// Splits `key: value` header lines. Returns `None` for other lines.
pub(crate) fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let t = line.trim_start();
    let rest = t.strip_prefix(key)?;
    let rest = rest.trim_start();
    rest.strip_prefix(':').map(str::trim)
}

/// Blanks out a `#` comment line. `#` is also a valid document letter, so
/// comments only take whole lines.
pub(crate) fn strip_comment(line: &str) -> &str {
    if line.trim_start().starts_with('#') {
        ""
    } else {
        line
    }
}
