//! CYK membership on the normal form.

use super::cnf::CnfGrammar;
use crate::marker::MarkerString;

/// Outcome of one CYK run. `steps` counts (binary rule, split point) checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CykRun {
    pub accepted: bool,
    pub steps: u64,
}

impl CnfGrammar {
    pub fn accepts(&self, w: &MarkerString) -> bool {
        match self.ids_of(w) {
            Some(ids) => self.cyk(&ids).accepted,
            None => false,
        }
    }

    /// CYK over interned marker ids, O(|G|·|w|³).
    pub fn cyk(&self, w: &[u32]) -> CykRun {
        let n = w.len();
        if n == 0 {
            return CykRun {
                accepted: self.nullable_start,
                steps: 0,
            };
        }
        let nt = self.nonterminals;
        // table[(i * (n + 1) + len) * nt + a]: a derives w[i..i+len].
        let idx = |i: usize, len: usize, a: usize| (i * (n + 1) + len) * nt + a;
        let mut table = vec![false; n * (n + 1) * nt];
        for (i, &m) in w.iter().enumerate() {
            for &(a, t) in &self.terminal {
                if t == m {
                    table[idx(i, 1, a)] = true;
                }
            }
        }
        let mut steps = 0u64;
        for len in 2..=n {
            for i in 0..=n - len {
                for k in 1..len {
                    steps += self.binary.len() as u64;
                    for &(a, b, c) in &self.binary {
                        if table[idx(i, k, b)] && table[idx(i + k, len - k, c)] {
                            table[idx(i, len, a)] = true;
                        }
                    }
                }
            }
        }
        CykRun {
            accepted: table[idx(0, n, self.start)],
            steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::grammar::{ExtractorGrammar, Sym};
    use crate::marker::{Alphabets, Marker, MarkerString};

    #[test]
    fn steps_grow_cubically() {
        let a = Marker::bare('a');
        let mut b = ExtractorGrammar::builder(Alphabets::of("a", &[]));
        b.rule("S", &[Sym::N("S"), Sym::N("S")]).unwrap();
        b.rule("S", &[Sym::T(a.clone())]).unwrap();
        let g = b.build("S").unwrap();
        let run = |k: usize| {
            let ids = g
                .cnf()
                .ids_of(&MarkerString::new(vec![a.clone(); k]))
                .unwrap();
            g.cnf().cyk(&ids)
        };
        let (r8, r16) = (run(8), run(16));
        assert!(r8.accepted && r16.accepted);
        assert!(r16.steps <= 9 * r8.steps);
    }
}
