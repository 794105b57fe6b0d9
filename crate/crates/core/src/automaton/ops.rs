//! Closure constructions for regular extractors.

use std::collections::{HashMap, VecDeque};

use super::ExtractorAutomaton;
use crate::error::{Error, Result};
use crate::marker::{Alphabets, Marker};
use crate::table::{join_markers, JoinKind, UnaryOp};
use crate::Limits;

impl ExtractorAutomaton {
    /// L1 ∪ L2 over the unified context.
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut b = Self::builder(self.alphabets.union(&other.alphabets));
        let s = b.add_state();
        let o1 = self.copy_into(&mut b);
        let o2 = other.copy_into(&mut b);
        b.add_epsilon(s, o1 + self.initial)?;
        b.add_epsilon(s, o2 + other.initial)?;
        b.set_initial(s)?;
        b.build()
    }

    /// L1 ∩ L2: product on equal markers.
    pub fn intersection(&self, other: &Self) -> Result<Self> {
        let alphabets = self.alphabets.union(&other.alphabets);
        let id_map: Vec<Option<u32>> = self.markers.iter().map(|m| other.marker_id(m)).collect();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        index.insert((self.initial, other.initial), 0);
        let mut edges: Vec<Vec<(Marker, usize)>> = vec![Vec::new()];
        let mut k = 0;
        while k < pairs.len() {
            let (p1, p2) = pairs[k];
            for &(m, t1) in self.raw_transitions(p1) {
                let Some(m2) = id_map[m as usize] else {
                    continue;
                };
                for t2 in other.successors_by_id(p2, m2) {
                    let key = (t1 as usize, t2);
                    let id = *index.entry(key).or_insert_with(|| {
                        pairs.push(key);
                        edges.push(Vec::new());
                        pairs.len() - 1
                    });
                    edges[k].push((self.markers[m as usize].clone(), id));
                }
            }
            k += 1;
        }
        let finals = pairs
            .iter()
            .map(|&(p, q)| self.finals[p] && other.finals[q])
            .collect();
        Ok(Self::from_edges(alphabets, edges, 0, finals, true))
    }

    /// L1 ∖ L2, determinizing L2 on the fly.
    pub fn difference(&self, other: &Self, limits: &Limits) -> Result<Self> {
        let alphabets = self.alphabets.union(&other.alphabets);
        let id_map: Vec<Option<u32>> = self.markers.iter().map(|m| other.marker_id(m)).collect();
        let mut index: HashMap<(usize, Vec<u32>), usize> = HashMap::new();
        let start = (self.initial, vec![other.initial as u32]);
        let mut states = vec![start.clone()];
        index.insert(start, 0);
        let mut edges: Vec<Vec<(Marker, usize)>> = vec![Vec::new()];
        let mut k = 0;
        while k < states.len() {
            let (p, set) = states[k].clone();
            for &(m, t) in self.raw_transitions(p) {
                let next = match id_map[m as usize] {
                    Some(m2) => other.step_set(&set, m2),
                    None => Vec::new(),
                };
                let key = (t as usize, next);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        limits.check_states(states.len() + 1)?;
                        states.push(key.clone());
                        edges.push(Vec::new());
                        index.insert(key, states.len() - 1);
                        states.len() - 1
                    }
                };
                edges[k].push((self.markers[m as usize].clone(), id));
            }
            k += 1;
        }
        let finals = states
            .iter()
            .map(|(p, set)| self.finals[*p] && !set.iter().any(|&q| other.finals[q as usize]))
            .collect();
        Ok(Self::from_edges(alphabets, edges, 0, finals, true))
    }

    /// The complement relative to all marker strings over this automaton's
    /// own context.
    pub fn complement(&self, limits: &Limits) -> Result<Self> {
        let mut d = self.determinize(limits)?;
        for f in d.finals.iter_mut() {
            *f = !*f;
        }
        let edges = d.edges();
        Ok(Self::from_edges(
            d.alphabets.clone(),
            edges,
            d.initial,
            d.finals,
            true,
        ))
    }

    /// L1 · L2.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut b = Self::builder(self.alphabets.union(&other.alphabets));
        let o1 = self.copy_into(&mut b);
        let o2 = other.copy_into(&mut b);
        b.finals.retain(|&q| q >= o2);
        for f in self.finals() {
            b.add_epsilon(o1 + f, o2 + other.initial)?;
        }
        b.set_initial(o1 + self.initial)?;
        b.build()
    }

    /// L*, through a fresh initial and accepting state.
    pub fn star(&self) -> Result<Self> {
        let mut b = Self::builder(self.alphabets.clone());
        let s = b.add_state();
        let o = self.copy_into(&mut b);
        b.add_epsilon(s, o + self.initial)?;
        for f in self.finals() {
            b.add_epsilon(o + f, s)?;
        }
        b.set_initial(s)?;
        b.set_final(s)?;
        b.build()
    }

    /// L1 ⋈⊙ L2: the product on Q1 × Q2 whose labels are joined markers.
    pub fn join(&self, other: &Self, kind: JoinKind) -> Result<Self> {
        let alphabets = self.alphabets.union(&other.alphabets);
        let (g1, g2) = (&self.alphabets.gamma, &other.alphabets.gamma);
        let mut label_cache: HashMap<(u32, u32), Option<Marker>> = HashMap::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        index.insert((self.initial, other.initial), 0);
        let mut edges: Vec<Vec<(Marker, usize)>> = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            let (p1, p2) = pairs[k];
            for &(m1, t1) in self.raw_transitions(p1) {
                let sign = self.markers[m1 as usize].sign;
                for &(m2, t2) in other.transitions_with_sign(p2, sign) {
                    let label = label_cache
                        .entry((m1, m2))
                        .or_insert_with(|| {
                            join_markers(
                                &self.markers[m1 as usize],
                                g1,
                                &other.markers[m2 as usize],
                                g2,
                                kind,
                            )
                        })
                        .clone();
                    let Some(label) = label else { continue };
                    let key = (t1 as usize, t2 as usize);
                    let id = match index.get(&key) {
                        Some(&id) => id,
                        None => {
                            pairs.push(key);
                            edges.push(Vec::new());
                            index.insert(key, pairs.len() - 1);
                            queue.push_back(pairs.len() - 1);
                            pairs.len() - 1
                        }
                    };
                    edges[k].push((label, id));
                }
            }
        }
        let finals = pairs
            .iter()
            .map(|&(p, q)| self.finals[p] && other.finals[q])
            .collect();
        Ok(Self::from_edges(alphabets, edges, 0, finals, true))
    }

    /// f(L): every transition label rewritten by the marker-level operation.
    pub fn apply_unary(&self, f: &UnaryOp) -> Result<Self> {
        let gamma = f.output_gamma(&self.alphabets.gamma)?;
        let alphabets = Alphabets {
            sigma: self.alphabets.sigma.clone(),
            gamma,
        };
        let edges = (0..self.state_count())
            .map(|q| {
                self.transitions(q)
                    .map(|(m, t)| (f.apply_marker(m), t))
                    .collect()
            })
            .collect();
        Ok(Self::from_edges(
            alphabets,
            edges,
            self.initial,
            self.finals.clone(),
            true,
        ))
    }

    /// δ(S, m) for a sorted state set.
    pub(crate) fn step_set(&self, set: &[u32], id: u32) -> Vec<u32> {
        let mut out: Vec<u32> = set
            .iter()
            .flat_map(|&q| self.successors_by_id(q as usize, id))
            .map(|t| t as u32)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub(crate) fn set_accepts(&self, set: &[u32]) -> bool {
        set.iter().any(|&q| self.finals[q as usize])
    }
}

pub(crate) fn check_marker_alphabet(alphabets: &Alphabets, limits: &Limits) -> Result<()> {
    let size = alphabets.marker_alphabet_size();
    if size > limits.max_states {
        return Err(Error::Resource {
            what: "marker alphabet size",
            count: size,
            limit: limits.max_states,
        });
    }
    Ok(())
}
