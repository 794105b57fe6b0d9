//! Slice DAGs: the runs of one automaton, or of two automata in lockstep, on
//! the marker strings whose sign is a fixed document.
//!
//! Layer `i` holds the states reachable after reading `i` markers, arcs go
//! from layer `i` to layer `i + 1` and carry a marker with sign `w[i+1]`.
//! Only forward-reachable nodes are built, so the work is bounded by
//! |Q|·(|w|+1) nodes (|Q1|·|Q2|·(|w|+1) for the product).

use std::collections::{BTreeMap, BTreeSet};

use crate::automaton::ExtractorAutomaton;
use crate::error::Result;
use crate::marker::{AttrSet, GammaTable, Marker, MarkerString};
use crate::Limits;

const NONE: u32 = u32::MAX;

/// A node's automaton state: `(state, NONE)` for a single automaton,
/// `(p1, p2)` for a product.
pub type NodeKey = (u32, u32);

#[derive(Debug, Clone)]
pub struct SliceDag {
    labels: Vec<Marker>,
    layers: Vec<Vec<NodeKey>>,
    arcs: Vec<Vec<(u32, u32, u32)>>,
    parent: Vec<Vec<(u32, u32)>>,
    sinks: Vec<u32>,
}

struct LayerIndex {
    slots: Vec<u32>,
    width: usize,
    touched: Vec<usize>,
}

impl LayerIndex {
    fn new(rows: usize, width: usize) -> Self {
        LayerIndex {
            slots: vec![NONE; rows * width],
            width,
            touched: Vec::new(),
        }
    }

    fn slot(&self, key: NodeKey) -> usize {
        let second = if key.1 == NONE { 0 } else { key.1 as usize };
        key.0 as usize * self.width + second
    }

    fn get_or_insert(&mut self, key: NodeKey, layer: &mut Vec<NodeKey>) -> (u32, bool) {
        let s = self.slot(key);
        if self.slots[s] == NONE {
            self.slots[s] = layer.len() as u32;
            self.touched.push(s);
            layer.push(key);
            (self.slots[s], true)
        } else {
            (self.slots[s], false)
        }
    }

    fn reset(&mut self) {
        for s in self.touched.drain(..) {
            self.slots[s] = NONE;
        }
    }
}

impl SliceDag {
    /// The slice DAG G_{M,w}: arcs for every marker of sign `w[i]`.
    pub fn single(m: &ExtractorAutomaton, w: &str) -> SliceDag {
        let doc: Vec<char> = w.chars().collect();
        let mut index = LayerIndex::new(m.state_count(), 1);
        let mut dag = SliceDag::start(m, (m.initial() as u32, NONE), doc.len());
        for (i, &c) in doc.iter().enumerate() {
            let mut next = Vec::new();
            let mut arcs = Vec::new();
            let mut parent = Vec::new();
            for (k, &(p, _)) in dag.layers[i].iter().enumerate() {
                for &(label, t) in m.transitions_with_sign(p as usize, c) {
                    let (to, fresh) = index.get_or_insert((t, NONE), &mut next);
                    if fresh {
                        parent.push((k as u32, label));
                    }
                    arcs.push((k as u32, label, to));
                }
            }
            index.reset();
            dag.push_layer(next, arcs, parent);
        }
        dag.finish(|(p, _)| m.is_final(p as usize));
        dag
    }

    /// The product DAG G_{M1,M2,w}: arcs only where both automata read the
    /// same marker.
    pub fn product(m1: &ExtractorAutomaton, m2: &ExtractorAutomaton, w: &str) -> SliceDag {
        let doc: Vec<char> = w.chars().collect();
        let id_map: Vec<u32> = m1
            .markers()
            .iter()
            .map(|x| m2.marker_id(x).unwrap_or(NONE))
            .collect();
        let mut index = LayerIndex::new(m1.state_count(), m2.state_count());
        let mut dag = SliceDag::start(m1, (m1.initial() as u32, m2.initial() as u32), doc.len());
        for (i, &c) in doc.iter().enumerate() {
            let mut next = Vec::new();
            let mut arcs = Vec::new();
            let mut parent = Vec::new();
            for (k, &(p1, p2)) in dag.layers[i].iter().enumerate() {
                for &(label, t1) in m1.transitions_with_sign(p1 as usize, c) {
                    let id2 = id_map[label as usize];
                    if id2 == NONE {
                        continue;
                    }
                    for t2 in m2.successors_by_id(p2 as usize, id2) {
                        let (to, fresh) = index.get_or_insert((t1, t2 as u32), &mut next);
                        if fresh {
                            parent.push((k as u32, label));
                        }
                        arcs.push((k as u32, label, to));
                    }
                }
            }
            index.reset();
            dag.push_layer(next, arcs, parent);
        }
        dag.finish(|(p1, p2)| m1.is_final(p1 as usize) && m2.is_final(p2 as usize));
        dag
    }

    fn start(m: &ExtractorAutomaton, source: NodeKey, n: usize) -> SliceDag {
        let mut layers = Vec::with_capacity(n + 1);
        layers.push(vec![source]);
        let mut parent = Vec::with_capacity(n + 1);
        parent.push(vec![(NONE, NONE)]);
        SliceDag {
            labels: m.markers().to_vec(),
            layers,
            arcs: Vec::with_capacity(n),
            parent,
            sinks: Vec::new(),
        }
    }

    fn push_layer(
        &mut self,
        nodes: Vec<NodeKey>,
        arcs: Vec<(u32, u32, u32)>,
        parent: Vec<(u32, u32)>,
    ) {
        self.layers.push(nodes);
        self.arcs.push(arcs);
        self.parent.push(parent);
    }

    fn finish(&mut self, is_final: impl Fn(NodeKey) -> bool) {
        let last = self.layers.last().expect("layer 0 exists");
        self.sinks = last
            .iter()
            .enumerate()
            .filter(|(_, &k)| is_final(k))
            .map(|(i, _)| i as u32)
            .collect();
    }

    /// |w|.
    pub fn document_len(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    pub fn layer(&self, i: usize) -> &[NodeKey] {
        &self.layers[i]
    }

    /// Arcs from layer `i` to layer `i + 1` as `(from, marker, to)` node
    /// indices.
    pub fn arcs(&self, i: usize) -> impl Iterator<Item = (usize, &Marker, usize)> + '_ {
        self.arcs[i]
            .iter()
            .map(|&(f, l, t)| (f as usize, &self.labels[l as usize], t as usize))
    }

    /// Indices of accepting nodes in the last layer.
    pub fn sinks(&self) -> &[u32] {
        &self.sinks
    }

    /// Whether some source-to-sink path exists.
    pub fn has_sink(&self) -> bool {
        !self.sinks.is_empty()
    }

    /// The labels of one source-to-sink path.
    pub fn witness(&self) -> Option<MarkerString> {
        let &sink = self.sinks.first()?;
        let mut out = Vec::with_capacity(self.document_len());
        let mut node = sink;
        for i in (1..self.layers.len()).rev() {
            let (prev, label) = self.parent[i][node as usize];
            out.push(self.labels[label as usize].clone());
            node = prev;
        }
        out.reverse();
        Some(MarkerString::new(out))
    }

    fn co_reachable(&self) -> Vec<Vec<bool>> {
        let n = self.document_len();
        let mut live: Vec<Vec<bool>> = self.layers.iter().map(|l| vec![false; l.len()]).collect();
        for &s in &self.sinks {
            live[n][s as usize] = true;
        }
        for i in (0..n).rev() {
            for &(f, _, t) in &self.arcs[i] {
                if live[i + 1][t as usize] {
                    live[i][f as usize] = true;
                }
            }
        }
        live
    }

    /// The distinct marker strings spelled by source-to-sink paths, in
    /// lexicographic order. Stops after `limit` strings; fails with a
    /// resource error if more than `limits.max_rows` would be produced.
    pub fn enumerate(&self, limit: Option<usize>, limits: &Limits) -> Result<Vec<MarkerString>> {
        let n = self.document_len();
        let live = self.co_reachable();
        let mut out = Vec::new();
        if !live[0][0] || limit == Some(0) {
            return Ok(out);
        }
        // Per layer: outgoing live arcs of each node, sorted by label.
        let adj: Vec<Vec<Vec<(u32, u32)>>> = (0..n)
            .map(|i| {
                let mut a: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.layers[i].len()];
                for &(f, l, t) in &self.arcs[i] {
                    if live[i + 1][t as usize] {
                        a[f as usize].push((l, t));
                    }
                }
                a
            })
            .collect();

        struct Frame {
            groups: Vec<(u32, Vec<u32>)>,
            next: usize,
        }
        let frame = |i: usize, set: &[u32]| -> Frame {
            if i == n {
                return Frame {
                    groups: Vec::new(),
                    next: 0,
                };
            }
            let mut g: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
            for &v in set {
                for &(l, t) in &adj[i][v as usize] {
                    g.entry(l).or_default().insert(t);
                }
            }
            Frame {
                groups: g
                    .into_iter()
                    .map(|(l, s)| (l, s.into_iter().collect()))
                    .collect(),
                next: 0,
            }
        };

        let mut frames = vec![frame(0, &[0])];
        let mut path: Vec<u32> = Vec::with_capacity(n);
        while !frames.is_empty() {
            let depth = frames.len() - 1;
            let top = frames.last_mut().expect("non-empty");
            if depth == n {
                out.push(MarkerString::new(
                    path.iter()
                        .map(|&l| self.labels[l as usize].clone())
                        .collect(),
                ));
                if Some(out.len()) == limit {
                    return Ok(out);
                }
                limits.check_rows(out.len())?;
                frames.pop();
                path.pop();
                continue;
            }
            if top.next == top.groups.len() {
                frames.pop();
                if depth > 0 {
                    path.pop();
                }
                continue;
            }
            let (label, set) = top.groups[top.next].clone();
            top.next += 1;
            path.push(label);
            frames.push(frame(depth + 1, &set));
        }
        Ok(out)
    }
}

impl ExtractorAutomaton {
    /// G_{M,w}.
    pub fn slice_dag(&self, w: &str) -> SliceDag {
        SliceDag::single(self, w)
    }

    /// E(w) = ⟦slice_w(L(M))⟧.
    pub fn evaluate(&self, w: &str, limits: &Limits) -> Result<GammaTable> {
        self.evaluate_limited(w, None, limits)
    }

    /// At most `limit` rows of E(w), taken in lexicographic marker-string
    /// order.
    pub fn evaluate_limited(
        &self,
        w: &str,
        limit: Option<usize>,
        limits: &Limits,
    ) -> Result<GammaTable> {
        let strings = self.slice_dag(w).enumerate(limit, limits)?;
        decode_all(&strings, &self.alphabets().gamma, w.chars().count())
    }
}

pub(crate) fn decode_all(
    strings: &[MarkerString],
    gamma: &AttrSet,
    len: usize,
) -> Result<GammaTable> {
    let mut t = GammaTable::new(gamma.clone(), len);
    for s in strings {
        let (_, row) = s.decode(gamma)?;
        t.insert_unchecked(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::{Alphabets, GammaTuple};

    fn ctx() -> Alphabets {
        Alphabets::of("ab", &["x"])
    }

    #[test]
    fn atomic_dag_shape() {
        let m = ExtractorAutomaton::atomic(ctx(), Marker::of('a', &["x"])).unwrap();
        let d = m.slice_dag("a");
        assert_eq!(d.layer(0).len(), 1);
        assert_eq!(d.sinks().len(), 1);
        let arcs: Vec<_> = d.arcs(0).collect();
        assert_eq!(arcs.len(), 1);
        assert_eq!(arcs[0].1, &Marker::of('a', &["x"]));
        let t = m.evaluate("a", &Limits::default()).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.contains(&GammaTuple::from_entries(1, &[("x", &[1])]).unwrap()));
        assert!(m.evaluate("b", &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn empty_document() {
        let e = ExtractorAutomaton::epsilon(ctx());
        let d = e.slice_dag("");
        assert!(d.has_sink());
        assert_eq!(d.witness(), Some(MarkerString::default()));
        assert_eq!(e.evaluate("", &Limits::default()).unwrap().len(), 1);
        let a = ExtractorAutomaton::atomic(ctx(), Marker::bare('a')).unwrap();
        assert!(!a.slice_dag("").has_sink());
    }

    #[test]
    fn ambiguity_does_not_duplicate_rows() {
        let mut b = ExtractorAutomaton::builder(ctx());
        b.add_states(3);
        b.add_transition(0, Marker::bare('a'), 1).unwrap();
        b.add_transition(0, Marker::bare('a'), 2).unwrap();
        b.set_final(1).unwrap();
        b.set_final(2).unwrap();
        let m = b.build().unwrap();
        let strings = m
            .slice_dag("a")
            .enumerate(None, &Limits::default())
            .unwrap();
        assert_eq!(strings.len(), 1);
    }

    #[test]
    fn row_budget() {
        let any = ExtractorAutomaton::universal(ctx());
        let tight = Limits {
            max_rows: 10,
            ..Limits::default()
        };
        assert!(any.evaluate("aaaa", &tight).unwrap_err().is_resource());
        assert_eq!(
            any.evaluate_limited("aaaa", Some(3), &tight).unwrap().len(),
            3
        );
        assert_eq!(any.evaluate("aaa", &Limits::default()).unwrap().len(), 8);
    }

    #[test]
    fn product_needs_same_marker() {
        let a = ExtractorAutomaton::atomic(ctx(), Marker::of('a', &["x"])).unwrap();
        let b = ExtractorAutomaton::atomic(ctx(), Marker::bare('a')).unwrap();
        assert!(!SliceDag::product(&a, &b, "a").has_sink());
        assert!(SliceDag::product(&a, &a, "a").has_sink());
    }
}
