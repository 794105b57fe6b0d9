//! Subset construction, complete over Δ_{Σ,Γ}.

use std::collections::HashMap;

use super::ops::check_marker_alphabet;
use super::ExtractorAutomaton;
use crate::error::Result;
use crate::marker::Marker;
use crate::Limits;

impl ExtractorAutomaton {
    /// An equivalent complete DFA. Fails with a resource error once more than
    /// `limits.max_states` subsets are built.
    pub fn determinize(&self, limits: &Limits) -> Result<Self> {
        check_marker_alphabet(&self.alphabets, limits)?;
        let all = self.alphabets.all_markers();
        let ids: Vec<Option<u32>> = all.iter().map(|m| self.marker_id(m)).collect();

        let start = vec![self.initial as u32];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut sets = vec![start.clone()];
        index.insert(start, 0);
        let mut edges: Vec<Vec<(Marker, usize)>> = vec![Vec::new()];
        let mut k = 0;
        while k < sets.len() {
            let set = sets[k].clone();
            for (m, id) in all.iter().zip(&ids) {
                let next = match id {
                    Some(id) => self.step_set(&set, *id),
                    None => Vec::new(),
                };
                let t = match index.get(&next) {
                    Some(&t) => t,
                    None => {
                        limits.check_states(sets.len() + 1)?;
                        sets.push(next.clone());
                        edges.push(Vec::new());
                        index.insert(next, sets.len() - 1);
                        sets.len() - 1
                    }
                };
                edges[k].push((m.clone(), t));
            }
            k += 1;
        }
        let finals = sets.iter().map(|s| self.set_accepts(s)).collect();
        Ok(Self::from_edges(
            self.alphabets.clone(),
            edges,
            0,
            finals,
            false,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::marker::{Alphabets, MarkerString};

    #[test]
    fn determinized_is_complete_and_equivalent() {
        let ctx = Alphabets::of("a", &["x"]);
        let mut b = ExtractorAutomaton::builder(ctx.clone());
        b.add_states(3);
        b.add_transition(0, Marker::bare('a'), 0).unwrap();
        b.add_transition(0, Marker::bare('a'), 1).unwrap();
        b.add_transition(1, Marker::of('a', &["x"]), 2).unwrap();
        b.set_final(2).unwrap();
        let m = b.build().unwrap();
        assert!(!m.is_deterministic());
        let d = m.determinize(&Limits::default()).unwrap();
        assert!(d.is_deterministic());
        assert!(d.state_count() <= 1 << m.state_count());
        for q in 0..d.state_count() {
            assert_eq!(d.transitions(q).count(), 2);
        }
        for s in [
            "",
            "{}:a {x}:a",
            "{}:a {}:a {x}:a",
            "{x}:a",
            "{}:a {x}:a {x}:a",
        ] {
            let w: MarkerString = s.parse().unwrap();
            assert_eq!(m.accepts(&w), d.accepts(&w), "{s}");
        }
    }

    #[test]
    fn state_budget_is_reported() {
        let ctx = Alphabets::of("a", &[]);
        let mut b = ExtractorAutomaton::builder(ctx);
        b.add_states(6);
        for q in 0..5 {
            b.add_transition(q, Marker::bare('a'), q + 1).unwrap();
            b.add_transition(q, Marker::bare('a'), 0).unwrap();
        }
        b.set_final(5).unwrap();
        let m = b.build().unwrap();
        let tight = Limits {
            max_states: 2,
            ..Limits::default()
        };
        assert!(matches!(m.determinize(&tight), Err(Error::Resource { .. })));
    }
}
