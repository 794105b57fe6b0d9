//! Language-level decisions: L(M) = ∅, L1 ⊆ L2 and L1 = L2.
//!
//! Because ⟦·⟧ is injective on marker strings, ⟦L1⟧ ⊆ ⟦L2⟧ holds exactly when
//! L1 ⊆ L2, so extractor containment is language containment.

use std::collections::{HashMap, VecDeque};

use super::ExtractorAutomaton;
use crate::error::Result;
use crate::marker::{Marker, MarkerString};
use crate::Limits;

impl ExtractorAutomaton {
    /// A shortest accepted marker string, if any.
    pub fn shortest_member(&self) -> Option<MarkerString> {
        let n = self.state_count();
        let mut parent: Vec<Option<(usize, u32)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            if self.finals[q] {
                let mut out = Vec::new();
                let mut cur = q;
                while let Some((p, m)) = parent[cur] {
                    out.push(self.markers[m as usize].clone());
                    cur = p;
                }
                out.reverse();
                return Some(MarkerString::new(out));
            }
            for &(m, t) in self.raw_transitions(q) {
                let t = t as usize;
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((q, m));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Whether L(M) = ∅, i.e. the extractor maps every document to ∅.
    pub fn is_empty_language(&self) -> bool {
        self.shortest_member().is_none()
    }

    /// `None` if L(self) ⊆ L(other); otherwise a marker string in
    /// L(self) ∖ L(other).
    pub fn language_subset(&self, other: &Self, limits: &Limits) -> Result<Option<MarkerString>> {
        let id_map: Vec<Option<u32>> = self.markers.iter().map(|m| other.marker_id(m)).collect();
        let start = (self.initial, vec![other.initial as u32]);
        let mut index: HashMap<(usize, Vec<u32>), usize> = HashMap::new();
        let mut states = vec![start.clone()];
        let mut parent: Vec<Option<(usize, u32)>> = vec![None];
        index.insert(start, 0);
        let mut k = 0;
        while k < states.len() {
            let (p, set) = states[k].clone();
            if self.finals[p] && !other.set_accepts(&set) {
                let mut out: Vec<Marker> = Vec::new();
                let mut cur = k;
                while let Some((prev, m)) = parent[cur] {
                    out.push(self.markers[m as usize].clone());
                    cur = prev;
                }
                out.reverse();
                return Ok(Some(MarkerString::new(out)));
            }
            for &(m, t) in self.raw_transitions(p) {
                let next = match id_map[m as usize] {
                    Some(m2) => other.step_set(&set, m2),
                    None => Vec::new(),
                };
                let key = (t as usize, next);
                if !index.contains_key(&key) {
                    limits.check_states(states.len() + 1)?;
                    index.insert(key.clone(), states.len());
                    states.push(key);
                    parent.push(Some((k, m)));
                }
            }
            k += 1;
        }
        Ok(None)
    }

    /// `None` if L(self) = L(other); otherwise a string in exactly one of
    /// them.
    pub fn language_equivalent(
        &self,
        other: &Self,
        limits: &Limits,
    ) -> Result<Option<MarkerString>> {
        if let Some(w) = self.language_subset(other, limits)? {
            return Ok(Some(w));
        }
        other.language_subset(self, limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::Alphabets;

    fn ctx() -> Alphabets {
        Alphabets::of("a", &["x"])
    }

    #[test]
    fn epsilon_language_is_non_empty() {
        let e = ExtractorAutomaton::epsilon(ctx());
        assert_eq!(e.shortest_member(), Some(MarkerString::default()));
        assert!(ExtractorAutomaton::empty_language(ctx()).is_empty_language());
    }

    #[test]
    fn reflexive_containment() {
        let a = ExtractorAutomaton::atomic(ctx(), Marker::of('a', &["x"]))
            .unwrap()
            .star()
            .unwrap();
        assert_eq!(a.language_subset(&a, &Limits::default()).unwrap(), None);
    }

    #[test]
    fn two_automata_for_one_atom() {
        let a = ExtractorAutomaton::atomic(ctx(), Marker::of('a', &["x"])).unwrap();
        let mut b = ExtractorAutomaton::builder(ctx());
        b.add_states(4);
        b.add_transition(0, Marker::of('a', &["x"]), 1).unwrap();
        b.add_transition(0, Marker::of('a', &["x"]), 2).unwrap();
        b.add_transition(3, Marker::bare('a'), 2).unwrap();
        b.set_final(1).unwrap();
        b.set_final(2).unwrap();
        let b = b.build().unwrap();
        assert_eq!(a.language_equivalent(&b, &Limits::default()).unwrap(), None);
    }

    #[test]
    fn counterexample_is_in_difference() {
        let a = ExtractorAutomaton::atomic(ctx(), Marker::of('a', &["x"])).unwrap();
        let b = ExtractorAutomaton::atomic(ctx(), Marker::bare('a')).unwrap();
        let w = a.language_subset(&b, &Limits::default()).unwrap().unwrap();
        assert!(a.accepts(&w) && !b.accepts(&w));
    }
}
