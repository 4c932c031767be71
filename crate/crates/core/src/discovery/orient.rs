// SPDX-License-Identifier: MIT
//! Collider orientation and the Possible-D-SEP stage.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::{SearchOptions, SepsetMap};
use crate::citest::{CITester, CiSource};
use crate::graph::{EndpointMark, MixedGraph};
use crate::subsets::{subsets_up_to, Combinations};

/// Unshielded triples `(i, k, j)` with `i < j`, in lexicographic order.
fn unshielded_triples(g: &MixedGraph) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for k in 0..g.vertex_count() {
        let nb: Vec<usize> = g.neighbors(k).collect();
        for (a, &i) in nb.iter().enumerate() {
            for &j in &nb[a + 1..] {
                if !g.is_adjacent(i, j) {
                    out.insert((i, k, j));
                }
            }
        }
    }
    out
}

fn is_unshielded(g: &MixedGraph, (i, k, j): (usize, usize, usize)) -> bool {
    g.is_adjacent(i, k) && g.is_adjacent(j, k) && !g.is_adjacent(i, j)
}

fn orient_collider(g: &mut MixedGraph, (i, k, j): (usize, usize, usize)) {
    g.set_mark_at(k, i, EndpointMark::Arrow);
    g.set_mark_at(k, j, EndpointMark::Arrow);
}

/// Orients `i *-> k <-* j` for every unshielded triple whose middle vertex is
/// not in the recorded separating set of its endpoints.
pub fn vstructures(g: &mut MixedGraph, sepsets: &SepsetMap) {
    for t @ (i, k, j) in unshielded_triples(g) {
        if sepsets.get(i, j).is_some_and(|s| s.binary_search(&k).is_err()) {
            orient_collider(g, t);
        }
    }
}

/// RFCI collider step. Each candidate triple `(i, k, j)` is kept only if both
/// `i, k` and `j, k` stay dependent given `sepset(i, j) \ {k}`. Otherwise the
/// failing edge is removed with a minimal separating set drawn from that
/// set, and the triples it creates are queued. Surviving triples with `k`
/// outside the separating set are oriented as colliders at the end.
pub fn rfci_vstructures<S: CiSource>(g: &mut MixedGraph, sepsets: &mut SepsetMap, ci: &mut CITester<S>) {
    let mut pending = unshielded_triples(g);
    let mut colliders = BTreeSet::new();
    while let Some(t @ (i, k, j)) = pending.pop_first() {
        if !is_unshielded(g, t) {
            continue;
        }
        let Some(w) = sepsets.get(i, j) else { continue };
        let in_sepset = w.binary_search(&k).is_ok();
        let wk: Vec<usize> = w.iter().copied().filter(|&v| v != k).collect();
        let failing: Vec<usize> = [i, j].into_iter().filter(|&a| ci.is_independent(a, k, &wk)).collect();
        if failing.is_empty() {
            if !in_sepset {
                colliders.insert(t);
            }
            continue;
        }
        for a in failing {
            let minimal = subsets_up_to(&wk, wk.len())
                .find(|y| ci.is_independent(a, k, y))
                .expect("the full set separates");
            g.remove_edge(a, k);
            sepsets.insert(a, k, minimal);
            let (lo, hi) = (a.min(k), a.max(k));
            for m in g.neighbors(lo).filter(|&m| g.is_adjacent(m, hi)).collect::<Vec<_>>() {
                pending.insert((lo, m, hi));
            }
        }
    }
    for t in colliders {
        if is_unshielded(g, t) {
            orient_collider(g, t);
        }
    }
}

/// Possible-D-SEP of `x`: vertices `v ≠ x` reachable by a path on which every
/// inner vertex is a collider or sits in a triangle with its path neighbors.
pub fn possible_dsep(g: &MixedGraph, x: usize) -> Vec<usize> {
    let n = g.vertex_count();
    let mut seen_state = vec![false; n * n];
    let mut member = vec![false; n];
    let mut queue = VecDeque::new();
    for w in g.neighbors(x) {
        seen_state[x * n + w] = true;
        queue.push_back((x, w));
    }
    while let Some((u, w)) = queue.pop_front() {
        member[w] = true;
        for z in g.neighbors(w) {
            if z == u || seen_state[w * n + z] {
                continue;
            }
            let collider = g.mark_at(w, u) == Some(EndpointMark::Arrow)
                && g.mark_at(w, z) == Some(EndpointMark::Arrow);
            if collider || g.is_adjacent(u, z) {
                seen_state[w * n + z] = true;
                queue.push_back((w, z));
            }
        }
    }
    (0..n).filter(|&v| v != x && member[v]).collect()
}

/// Tests every remaining edge `x - y` against subsets of
/// `Possible-D-SEP(x) \ {y}`, computed once on the oriented input graph.
/// Pools already covered by the adjacency search are skipped.
pub fn possible_dsep_stage<S: CiSource>(
    g: &mut MixedGraph,
    sepsets: &mut SepsetMap,
    ci: &mut CITester<S>,
    opts: &SearchOptions,
) {
    let p = g.vertex_count();
    let pds: Vec<Vec<usize>> = (0..p).map(|x| possible_dsep(g, x)).collect();
    let limit = opts.size_limit();
    for (x, pd) in pds.iter().enumerate() {
        let ys: Vec<usize> = g.neighbors(x).collect();
        for y in ys {
            if !g.is_adjacent(x, y) {
                continue;
            }
            let pool: Vec<usize> = pd.iter().copied().filter(|&v| v != y).collect();
            if pool.iter().all(|&v| g.is_adjacent(x, v)) {
                continue;
            }
            let found = (1..=pool.len().min(limit))
                .flat_map(|size| Combinations::new(&pool, size))
                .find(|w| ci.is_independent(x, y, w));
            if let Some(w) = found {
                g.remove_edge(x, y);
                sepsets.insert(x, y, w);
            }
        }
    }
}
