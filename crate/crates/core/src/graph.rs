// SPDX-License-Identifier: MIT
//! Endpoint-marked graphs.
//!
//! One [`MixedGraph`] type carries DAGs, MAGs and PAGs. Vertices are dense
//! indices `0..n`. Every edge stores one mark per endpoint; the mark "at `v`"
//! on the edge `u *-* v` is the symbol drawn next to `v`.
//!
//! [`Dag`] wraps a graph that has been checked to contain only `->` edges and
//! no directed cycle, and caches parent/child lists and a topological order.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// The symbol at one end of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EndpointMark {
    Tail,
    Arrow,
    Circle,
}

impl EndpointMark {
    /// Single-letter code used by the text graph format.
    pub fn code(self) -> char {
        match self {
            EndpointMark::Tail => 't',
            EndpointMark::Arrow => 'a',
            EndpointMark::Circle => 'c',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            't' => Some(EndpointMark::Tail),
            'a' => Some(EndpointMark::Arrow),
            'c' => Some(EndpointMark::Circle),
            _ => None,
        }
    }
}

/// An edge with its two endpoint marks, `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub first: usize,
    pub second: usize,
    pub mark_first: EndpointMark,
    pub mark_second: EndpointMark,
}

/// Endpoint-marked graph over `0..n` with at most one edge per pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedGraph {
    n: usize,
    // marks[u * n + v] is the mark at v on the edge u *-* v.
    marks: Vec<Option<EndpointMark>>,
}

impl MixedGraph {
    pub fn new(n: usize) -> Self {
        MixedGraph { n, marks: vec![None; n * n] }
    }

    /// Complete graph with every endpoint a circle (the FCI starting point).
    pub fn complete_circle(n: usize) -> Self {
        let mut g = MixedGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.put(u, v, EndpointMark::Circle, EndpointMark::Circle);
            }
        }
        g
    }

    /// Builds a directed graph from `(from, to)` pairs.
    pub fn from_directed_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = MixedGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v, EndpointMark::Tail, EndpointMark::Arrow)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidArgument(format!(
                "vertex pair ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
        }
        Ok(())
    }

    fn put(&mut self, u: usize, v: usize, mark_u: EndpointMark, mark_v: EndpointMark) {
        self.marks[u * self.n + v] = Some(mark_v);
        self.marks[v * self.n + u] = Some(mark_u);
    }

    /// Inserts or replaces the edge `u *-* v` with the given marks at `u` and `v`.
    pub fn add_edge(
        &mut self,
        u: usize,
        v: usize,
        mark_u: EndpointMark,
        mark_v: EndpointMark,
    ) -> Result<()> {
        self.check_pair(u, v)?;
        self.put(u, v, mark_u, mark_v);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.marks[u * self.n + v] = None;
        self.marks[v * self.n + u] = None;
    }

    #[inline]
    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.marks[u * self.n + v].is_some()
    }

    /// Mark at `at` on the edge between `from` and `at`.
    #[inline]
    pub fn mark_at(&self, at: usize, from: usize) -> Option<EndpointMark> {
        self.marks[from * self.n + at]
    }

    /// Sets the mark at `at` on an existing edge `from *-* at`.
    ///
    /// Panics if the edge does not exist.
    #[inline]
    pub fn set_mark_at(&mut self, at: usize, from: usize, mark: EndpointMark) {
        let slot = &mut self.marks[from * self.n + at];
        assert!(slot.is_some(), "no edge between {from} and {at}");
        *slot = Some(mark);
    }

    /// `(mark at u, mark at v)` for the edge `u *-* v`.
    pub fn edge_marks(&self, u: usize, v: usize) -> Option<(EndpointMark, EndpointMark)> {
        Some((self.mark_at(u, v)?, self.mark_at(v, u)?))
    }

    /// `u -> v`.
    #[inline]
    pub fn is_directed(&self, u: usize, v: usize) -> bool {
        self.mark_at(u, v) == Some(EndpointMark::Tail)
            && self.mark_at(v, u) == Some(EndpointMark::Arrow)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.marks[v * self.n..(v + 1) * self.n];
        row.iter()
            .enumerate()
            .filter_map(|(u, m)| m.map(|_| u))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    pub fn parents(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(v).filter(move |&u| self.is_directed(u, v))
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(v).filter(move |&u| self.is_directed(v, u))
    }

    pub fn spouses(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(v).filter(move |&u| {
            self.mark_at(v, u) == Some(EndpointMark::Arrow)
                && self.mark_at(u, v) == Some(EndpointMark::Arrow)
        })
    }

    /// Edges in lexicographic `(first, second)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| {
            (u + 1..self.n).filter_map(move |v| {
                let (mark_first, mark_second) = self.edge_marks(u, v)?;
                Some(Edge { first: u, second: v, mark_first, mark_second })
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.marks.iter().filter(|m| m.is_some()).count() / 2
    }

    pub fn has_circle(&self) -> bool {
        self.marks.contains(&Some(EndpointMark::Circle))
    }

    /// Every edge is `->`.
    pub fn is_directed_graph(&self) -> bool {
        self.edges().all(|e| {
            matches!(
                (e.mark_first, e.mark_second),
                (EndpointMark::Tail, EndpointMark::Arrow) | (EndpointMark::Arrow, EndpointMark::Tail)
            )
        })
    }

    /// Ancestors of `seed` along `->` edges, reflexive. Returned as a membership vector.
    pub fn ancestor_mask(&self, seed: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack: Vec<usize> = Vec::new();
        for &s in seed {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for u in self.parents(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }

    /// Kahn's algorithm over `->` edges; `None` when a directed cycle exists.
    pub fn directed_topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree: Vec<usize> = (0..self.n).map(|v| self.parents(v).count()).collect();
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for c in self.children(v) {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn has_directed_cycle(&self) -> bool {
        self.directed_topological_order().is_none()
    }

    /// Checks the three ancestral-graph conditions: no directed cycle, no
    /// almost directed cycle, and no undirected edge touching a vertex with
    /// a parent or spouse. Circle marks make a graph non-ancestral.
    pub fn is_ancestral(&self) -> bool {
        if self.has_circle() || self.has_directed_cycle() {
            return false;
        }
        for e in self.edges() {
            match (e.mark_first, e.mark_second) {
                (EndpointMark::Arrow, EndpointMark::Arrow) => {
                    // a <-> b with b an ancestor of a (or vice versa) closes an almost directed cycle
                    let anc_first = self.ancestor_mask(&[e.first]);
                    let anc_second = self.ancestor_mask(&[e.second]);
                    if anc_first[e.second] || anc_second[e.first] {
                        return false;
                    }
                }
                (EndpointMark::Tail, EndpointMark::Tail) => {
                    for v in [e.first, e.second] {
                        if self.parents(v).next().is_some() || self.spouses(v).next().is_some() {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }

    /// Same vertex count and the same adjacencies, marks ignored.
    pub fn same_skeleton(&self, other: &MixedGraph) -> bool {
        self.n == other.n
            && self
                .marks
                .iter()
                .zip(&other.marks)
                .all(|(a, b)| a.is_some() == b.is_some())
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> MixedGraph {
        let mut g = MixedGraph::new(self.n);
        for e in self.edges() {
            g.put(perm[e.first], perm[e.second], e.mark_first, e.mark_second);
        }
        g
    }
}

/// A directed acyclic graph with cached adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    graph: MixedGraph,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl Dag {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Dag::try_from(MixedGraph::from_directed_edges(n, edges)?)
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.graph.is_directed(from, to)
    }

    /// `(from, to)` pairs in lexicographic order.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.vertex_count())
            .flat_map(|u| self.children[u].iter().map(move |&c| (u, c)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Adds vertices and edges, returning a new DAG.
    pub fn extended(&self, extra_vertices: usize, extra_edges: &[(usize, usize)]) -> Result<Dag> {
        let mut edges = self.directed_edges();
        edges.extend_from_slice(extra_edges);
        Dag::from_edges(self.vertex_count() + extra_vertices, &edges)
    }
}

impl TryFrom<MixedGraph> for Dag {
    type Error = Error;

    fn try_from(graph: MixedGraph) -> Result<Self> {
        if !graph.is_directed_graph() {
            return Err(Error::InvalidGraph("DAG may only contain directed edges".into()));
        }
        let topo = graph
            .directed_topological_order()
            .ok_or_else(|| Error::InvalidGraph("graph contains a directed cycle".into()))?;
        let parents = (0..graph.n).map(|v| graph.parents(v).collect()).collect();
        let children = (0..graph.n).map(|v| graph.children(v).collect()).collect();
        Ok(Dag { graph, parents, children, topo })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use EndpointMark::*;

    #[test]
    fn mirrored_marks() {
        let mut g = MixedGraph::new(3);
        g.add_edge(0, 2, Circle, Arrow).unwrap();
        assert_eq!(g.edge_marks(0, 2), Some((Circle, Arrow)));
        assert_eq!(g.edge_marks(2, 0), Some((Arrow, Circle)));
        assert_eq!(g.mark_at(2, 0), Some(Arrow));
        assert!(!g.is_adjacent(0, 1));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rejects_self_loops_and_out_of_range() {
        let mut g = MixedGraph::new(2);
        assert!(matches!(g.add_edge(1, 1, Tail, Arrow), Err(Error::InvalidGraph(_))));
        assert!(matches!(g.add_edge(0, 2, Tail, Arrow), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dag_rejects_cycles_and_non_directed_edges() {
        assert!(Dag::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
        let mut g = MixedGraph::new(2);
        g.add_edge(0, 1, Arrow, Arrow).unwrap();
        assert!(Dag::try_from(g).is_err());
        let d = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(d.topological_order(), &[0, 1, 2]);
    }

    #[test]
    fn ancestral_conditions() {
        // a -> b -> c, a <-> c is an almost directed cycle
        let mut g = MixedGraph::from_directed_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(g.is_ancestral());
        g.add_edge(0, 2, Arrow, Arrow).unwrap();
        assert!(!g.is_ancestral());

        // undirected edge into a vertex with a parent
        let mut g = MixedGraph::from_directed_edges(3, &[(0, 1)]).unwrap();
        g.add_edge(1, 2, Tail, Tail).unwrap();
        assert!(!g.is_ancestral());
        let mut g = MixedGraph::from_directed_edges(3, &[(1, 0)]).unwrap();
        g.add_edge(1, 2, Tail, Tail).unwrap();
        assert!(g.is_ancestral());

        let mut g = MixedGraph::new(2);
        g.add_edge(0, 1, Circle, Arrow).unwrap();
        assert!(!g.is_ancestral());
    }

    #[test]
    fn permutation_relabels_edges() {
        let g = MixedGraph::from_directed_edges(3, &[(0, 1)]).unwrap();
        let p = g.permuted(&[2, 0, 1]);
        assert!(p.is_directed(2, 0));
        assert_eq!(p.edge_count(), 1);
    }
}
