// SPDX-License-Identifier: MIT
//! Brute-force reference implementations for testing.
//!
//! Everything here is deliberately naive: path enumeration instead of
//! reachability, quantification over every conditioning set instead of
//! graphical shortcuts, and least squares by Gram-Schmidt instead of matrix
//! inversion. Only suitable for small inputs.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::data::Dataset;
use crate::graph::{Dag, EndpointMark, MixedGraph};
use crate::subsets::subsets_up_to;
use crate::system::CausalSystem;

use EndpointMark::{Arrow, Circle, Tail};

/// DAG on `n` vertices with each pair joined independently with probability
/// `prob`, oriented along a random vertex order.
pub fn random_dag<R: Rng + ?Sized>(n: usize, prob: f64, rng: &mut R) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(prob) {
                edges.push((order[a], order[b]));
            }
        }
    }
    Dag::from_edges(n, &edges).expect("edges follow a total order")
}

/// Arbitrary endpoint-marked graph: each pair joined with probability
/// `prob`, marks uniform over tail, arrow and circle.
pub fn random_mixed_graph<R: Rng + ?Sized>(n: usize, prob: f64, rng: &mut R) -> MixedGraph {
    const MARKS: [EndpointMark; 3] = [Tail, Arrow, Circle];
    let mut g = MixedGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(prob) {
                let mu = MARKS[rng.random_range(0..3)];
                let mv = MARKS[rng.random_range(0..3)];
                g.add_edge(u, v, mu, mv).expect("distinct in-range vertices");
            }
        }
    }
    g
}

/// Calls `visit` with every simple path from `from` to `to` in the skeleton
/// of `g`; stops early when `visit` returns true.
fn any_simple_path(g: &MixedGraph, from: usize, to: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(
        g: &MixedGraph,
        path: &mut Vec<usize>,
        on: &mut [bool],
        to: usize,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let cur = *path.last().expect("non-empty path");
        if cur == to {
            return visit(path);
        }
        for next in g.neighbors(cur).collect::<Vec<_>>() {
            if on[next] {
                continue;
            }
            on[next] = true;
            path.push(next);
            let hit = go(g, path, on, to, visit);
            path.pop();
            on[next] = false;
            if hit {
                return true;
            }
        }
        false
    }
    let mut on = vec![false; g.vertex_count()];
    on[from] = true;
    go(g, &mut vec![from], &mut on, to, visit)
}

/// Vertices with a directed path (possibly empty) into `set`, found by
/// repeated sweeps over `->` edges.
fn ancestors_by_sweeps(g: &MixedGraph, set: &[usize]) -> Vec<bool> {
    let n = g.vertex_count();
    let mut anc = vec![false; n];
    for &s in set {
        anc[s] = true;
    }
    loop {
        let mut grew = false;
        for u in 0..n {
            if !anc[u] && (0..n).any(|v| anc[v] && g.is_directed(u, v)) {
                anc[u] = true;
                grew = true;
            }
        }
        if !grew {
            return anc;
        }
    }
}

/// Whether a path is open given `z`: every collider (arrowheads at the
/// vertex from both path neighbors) is an ancestor of `z` and every other
/// inner vertex is outside `z`.
fn path_open(g: &MixedGraph, path: &[usize], in_z: &[bool], anc_z: &[bool]) -> bool {
    path.windows(3).all(|t| {
        let (a, v, b) = (t[0], t[1], t[2]);
        let collider = g.mark_at(v, a) == Some(Arrow) && g.mark_at(v, b) == Some(Arrow);
        if collider {
            anc_z[v]
        } else {
            !in_z[v]
        }
    })
}

/// m-separation of `x` and `y` given `z` by enumerating every simple path.
/// On a DAG this is d-separation.
pub fn m_separated_by_paths(g: &MixedGraph, x: usize, y: usize, z: &[usize]) -> bool {
    let mut in_z = vec![false; g.vertex_count()];
    for &v in z {
        in_z[v] = true;
    }
    let anc_z = ancestors_by_sweeps(g, z);
    !any_simple_path(g, x, y, &mut |p| path_open(g, p, &in_z, &anc_z))
}

/// Set version of [`m_separated_by_paths`] on a DAG.
pub fn d_separated_by_paths(dag: &Dag, a: &[usize], b: &[usize], c: &[usize]) -> bool {
    a.iter().all(|&x| b.iter().all(|&y| m_separated_by_paths(dag.graph(), x, y, c)))
}

/// Inducing path between observed `oi` and `oj` given selection `sel`,
/// decided as "no subset of the other observables separates them".
pub fn inducing_path_by_separation(sys: &CausalSystem, oi: usize, oj: usize, sel: &[usize]) -> bool {
    let others: Vec<usize> = sys.observed().iter().copied().filter(|&v| v != oi && v != oj).collect();
    let connected = subsets_up_to(&others, others.len()).all(|w| {
        let mut cond = w;
        cond.extend_from_slice(sel);
        !m_separated_by_paths(sys.dag().graph(), oi, oj, &cond)
    });
    connected
}

/// Partial correlation of columns `i, j` given `w` on the complete rows of
/// `data`, as the correlation of least-squares residuals after regressing
/// each on an intercept and `w` (modified Gram-Schmidt, two passes).
pub fn regression_partial_correlation(data: &Dataset, i: usize, j: usize, w: &[usize]) -> f64 {
    let rows: Vec<usize> = (0..data.n_rows())
        .filter(|&r| [i, j].iter().chain(w).all(|&c| data.is_observed(r, c)))
        .collect();
    let column = |c: usize| -> Vec<f64> { rows.iter().map(|&r| data.get(r, c).expect("observed")).collect() };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let regressors = core::iter::once(vec![1.0; rows.len()]).chain(w.iter().map(|&c| column(c)));
    for mut v in regressors {
        for _ in 0..2 {
            for q in &basis {
                let k = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= k * y);
            }
        }
        let norm = libm::sqrt(dot(&v, &v));
        if norm > 1e-12 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    let residual = |mut v: Vec<f64>| -> Vec<f64> {
        for _ in 0..2 {
            for q in &basis {
                let k = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= k * y);
            }
        }
        v
    };
    let ri = residual(column(i));
    let rj = residual(column(j));
    dot(&ri, &rj) / libm::sqrt(dot(&ri, &ri) * dot(&rj, &rj))
}

/// Unshielded colliders `(a, b, c)`, `a < c`, of an ancestral graph.
fn unshielded_colliders(g: &MixedGraph) -> Vec<(usize, usize, usize)> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    for b in 0..n {
        let nb: Vec<usize> = g.neighbors(b).collect();
        for (x, &a) in nb.iter().enumerate() {
            for &c in &nb[x + 1..] {
                if !g.is_adjacent(a, c) && g.mark_at(b, a) == Some(Arrow) && g.mark_at(b, c) == Some(Arrow) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

/// Same m-separations for every non-adjacent pair and every conditioning
/// set. Adjacent pairs are never separated in an ancestral graph, so the
/// shared skeleton covers them.
fn same_independence_model(g: &MixedGraph, h: &MixedGraph) -> bool {
    let n = g.vertex_count();
    for x in 0..n {
        for y in x + 1..n {
            if g.is_adjacent(x, y) {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
            for z in subsets_up_to(&rest, rest.len()) {
                if m_separated_by_paths(g, x, y, &z) != m_separated_by_paths(h, x, y, &z) {
                    return false;
                }
            }
        }
    }
    true
}

/// All ancestral graphs over the skeleton of `mag` that are Markov
/// equivalent to it, by enumerating every edge type per adjacency.
/// Undirected edges are tried only when `mag` has one.
pub fn markov_equivalence_class(mag: &MixedGraph) -> Vec<MixedGraph> {
    let edges: Vec<(usize, usize)> = mag.edges().map(|e| (e.first, e.second)).collect();
    let allow_undirected = mag.edges().any(|e| e.mark_first == Tail && e.mark_second == Tail);
    let mut kinds = vec![(Tail, Arrow), (Arrow, Tail), (Arrow, Arrow)];
    if allow_undirected {
        kinds.push((Tail, Tail));
    }
    let target_colliders = unshielded_colliders(mag);
    let total = kinds.len().pow(edges.len() as u32);
    let mut class = Vec::new();
    for code in 0..total {
        let mut g = MixedGraph::new(mag.vertex_count());
        let mut rest = code;
        for &(u, v) in &edges {
            let (mu, mv) = kinds[rest % kinds.len()];
            rest /= kinds.len();
            g.add_edge(u, v, mu, mv).expect("edge of the input graph");
        }
        if unshielded_colliders(&g) == target_colliders && g.is_ancestral() && same_independence_model(mag, &g) {
            class.push(g);
        }
    }
    class
}

/// The maximally informative PAG of `mag`: a mark is kept where every
/// member of the equivalence class agrees and becomes a circle elsewhere.
pub fn reference_pag(mag: &MixedGraph) -> MixedGraph {
    let class = markov_equivalence_class(mag);
    let mut pag = mag.clone();
    for e in mag.edges() {
        for (at, from) in [(e.first, e.second), (e.second, e.first)] {
            let m = mag.mark_at(at, from);
            if class.iter().any(|g| g.mark_at(at, from) != m) {
                pag.set_mark_at(at, from, Circle);
            }
        }
    }
    pag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_collider() {
        let chain = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(!d_separated_by_paths(&chain, &[0], &[2], &[]));
        assert!(d_separated_by_paths(&chain, &[0], &[2], &[1]));
        let collider = Dag::from_edges(4, &[(0, 1), (2, 1), (1, 3)]).unwrap();
        assert!(d_separated_by_paths(&collider, &[0], &[2], &[]));
        assert!(!d_separated_by_paths(&collider, &[0], &[2], &[3]));
    }

    #[test]
    fn collider_class_is_singleton() {
        let mag = MixedGraph::from_directed_edges(3, &[(0, 1), (2, 1)]).unwrap();
        let pag = reference_pag(&mag);
        assert_eq!(pag.edge_marks(0, 1), Some((Circle, Arrow)));
        assert_eq!(pag.edge_marks(1, 2), Some((Arrow, Circle)));
    }

    #[test]
    fn chain_class_is_all_circles() {
        let mag = MixedGraph::from_directed_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let pag = reference_pag(&mag);
        assert!(pag.edges().all(|e| e.mark_first == Circle && e.mark_second == Circle));
    }
}
