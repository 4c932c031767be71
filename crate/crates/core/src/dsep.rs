// SPDX-License-Identifier: MIT
//! Ancestral relations, d-separation, inducing paths and DAG-to-MAG
//! projection.
//!
//! d-separation runs a reachability search over `(vertex, direction)`
//! states, so each query costs `O(V + E)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Dag, EndpointMark, MixedGraph};
use crate::system::{CausalSystem, Role};

fn check_range(n: usize, set: &[usize]) -> Result<()> {
    match set.iter().find(|&&v| v >= n) {
        Some(v) => Err(Error::InvalidArgument(format!("vertex {v} out of range for {n} vertices"))),
        None => Ok(()),
    }
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in set {
        mask[v] = true;
    }
    mask
}

/// Ancestor membership of `seed`, reflexive.
pub(crate) fn ancestor_mask(dag: &Dag, seed: &[usize]) -> Vec<bool> {
    let mut seen = membership(dag.vertex_count(), seed);
    let mut stack: Vec<usize> = seed.to_vec();
    while let Some(v) = stack.pop() {
        for &p in dag.parents(v) {
            if !seen[p] {
                seen[p] = true;
                stack.push(p);
            }
        }
    }
    seen
}

/// `An(seed)`, including `seed` itself, in ascending order.
pub fn ancestors(dag: &Dag, seed: &[usize]) -> Result<Vec<usize>> {
    check_range(dag.vertex_count(), seed)?;
    let mask = ancestor_mask(dag, seed);
    Ok((0..dag.vertex_count()).filter(|&v| mask[v]).collect())
}

/// True iff every path between `a` and `b` is blocked by `c`.
pub fn d_separated(dag: &Dag, a: &[usize], b: &[usize], c: &[usize]) -> Result<bool> {
    let n = dag.vertex_count();
    check_range(n, a)?;
    check_range(n, b)?;
    check_range(n, c)?;
    let in_a = membership(n, a);
    let in_b = membership(n, b);
    let in_c = membership(n, c);
    if (0..n).any(|v| (in_a[v] as u8 + in_b[v] as u8 + in_c[v] as u8) > 1) {
        return Err(Error::InvalidArgument("d-separation sets must be pairwise disjoint".into()));
    }
    Ok(!reachable(dag, a, &in_b, &in_c))
}

// Reachability from `sources` given `in_c`. A state is a vertex together with
// whether the trail entered it from a child (moving up) or from a parent
// (moving down).
fn reachable(dag: &Dag, sources: &[usize], target: &[bool], in_c: &[bool]) -> bool {
    const UP: usize = 0;
    const DOWN: usize = 1;
    let n = dag.vertex_count();
    let c_list: Vec<usize> = (0..n).filter(|&v| in_c[v]).collect();
    let anc_c = ancestor_mask(dag, &c_list);
    let mut visited = vec![[false; 2]; n];
    let mut stack: Vec<(usize, usize)> = sources.iter().map(|&s| (s, UP)).collect();
    while let Some((v, dir)) = stack.pop() {
        if core::mem::replace(&mut visited[v][dir], true) {
            continue;
        }
        if target[v] && !in_c[v] {
            return true;
        }
        if dir == UP {
            if !in_c[v] {
                stack.extend(dag.parents(v).iter().map(|&p| (p, UP)));
                stack.extend(dag.children(v).iter().map(|&ch| (ch, DOWN)));
            }
        } else {
            if !in_c[v] {
                stack.extend(dag.children(v).iter().map(|&ch| (ch, DOWN)));
            }
            // collider: passable iff v has a descendant in C
            if anc_c[v] {
                stack.extend(dag.parents(v).iter().map(|&p| (p, UP)));
            }
        }
    }
    false
}

/// `oi ⊥ oj | W ∪ sel` in the DAG of `sys`.
pub fn oracle_ci(
    sys: &CausalSystem,
    oi: usize,
    oj: usize,
    w: &[usize],
    sel: &[usize],
) -> Result<bool> {
    let mut cond: Vec<usize> = Vec::with_capacity(w.len() + sel.len());
    cond.extend_from_slice(w);
    cond.extend_from_slice(sel);
    cond.sort_unstable();
    cond.dedup();
    d_separated(sys.dag(), &[oi], &[oj], &cond)
}

fn check_observed_pair(sys: &CausalSystem, oi: usize, oj: usize) -> Result<()> {
    let n = sys.vertex_count();
    if oi >= n || oj >= n || oi == oj {
        return Err(Error::InvalidArgument(format!("invalid vertex pair ({oi}, {oj})")));
    }
    if sys.role(oi) != Role::Observed || sys.role(oj) != Role::Observed {
        return Err(Error::InvalidArgument(format!(
            "inducing paths are defined between observed vertices, got ({oi}, {oj})"
        )));
    }
    Ok(())
}

/// Inducing path between `oi` and `oj` relative to the system's latent set
/// and selection set `S`.
pub fn has_inducing_path(sys: &CausalSystem, oi: usize, oj: usize) -> Result<bool> {
    has_inducing_path_given(sys, oi, oj, sys.selection())
}

/// Inducing path with `sel` playing the role of the selection set. Every
/// vertex that is neither observed nor in `sel` counts as latent.
pub fn has_inducing_path_given(
    sys: &CausalSystem,
    oi: usize,
    oj: usize,
    sel: &[usize],
) -> Result<bool> {
    check_observed_pair(sys, oi, oj)?;
    check_range(sys.vertex_count(), sel)?;
    Ok(InducingSearch::new(sys, oi, oj, sel).run())
}

struct InducingSearch<'a> {
    dag: &'a Dag,
    latent: Vec<bool>,
    collider_ok: Vec<bool>,
    target: usize,
    on_path: Vec<bool>,
    start: usize,
}

impl<'a> InducingSearch<'a> {
    fn new(sys: &'a CausalSystem, oi: usize, oj: usize, sel: &[usize]) -> Self {
        let n = sys.vertex_count();
        let in_sel = membership(n, sel);
        let latent = (0..n).map(|v| sys.role(v) != Role::Observed && !in_sel[v]).collect();
        let mut seed = vec![oi, oj];
        seed.extend_from_slice(sel);
        let collider_ok = ancestor_mask(sys.dag(), &seed);
        InducingSearch {
            dag: sys.dag(),
            latent,
            collider_ok,
            target: oj,
            on_path: vec![false; n],
            start: oi,
        }
    }

    fn run(&mut self) -> bool {
        self.on_path[self.start] = true;
        let start = self.start;
        self.extend(start, false)
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, bool)> + 'a {
        // (neighbor, edge points into v)
        let dag = self.dag;
        dag.parents(v)
            .iter()
            .map(|&p| (p, true))
            .chain(dag.children(v).iter().map(|&c| (c, false)))
    }

    // `cur` was entered with an arrowhead at `cur` iff `into_cur`.
    fn extend(&mut self, cur: usize, into_cur: bool) -> bool {
        let nbrs: Vec<(usize, bool)> = self.neighbors(cur).collect();
        for (next, into_cur_from_next) in nbrs {
            if self.on_path[next] {
                continue;
            }
            if cur != self.start {
                let collider = into_cur && into_cur_from_next;
                let allowed = if collider { self.collider_ok[cur] } else { self.latent[cur] };
                if !allowed {
                    continue;
                }
            }
            if next == self.target {
                return true;
            }
            self.on_path[next] = true;
            // edge cur -> next puts an arrowhead at next
            let found = self.extend(next, !into_cur_from_next);
            self.on_path[next] = false;
            if found {
                return true;
            }
        }
        false
    }
}

/// MAG over the observed vertices of `sys` with selection set `S`.
///
/// Vertex `k` of the result is `sys.observed()[k]`.
pub fn dag_to_mag(sys: &CausalSystem) -> MixedGraph {
    dag_to_mag_given(sys, sys.selection()).expect("selection vertices are in range")
}

/// MAG over the observed vertices with `sel` as the selection set.
pub fn dag_to_mag_given(sys: &CausalSystem, sel: &[usize]) -> Result<MixedGraph> {
    check_range(sys.vertex_count(), sel)?;
    let obs = sys.observed();
    let mut mag = MixedGraph::new(obs.len());
    for (a, &oi) in obs.iter().enumerate() {
        for (b, &oj) in obs.iter().enumerate().skip(a + 1) {
            if !InducingSearch::new(sys, oi, oj, sel).run() {
                continue;
            }
            let mark = |x: usize, y: usize| {
                let mut seed = vec![y];
                seed.extend_from_slice(sel);
                if ancestor_mask(sys.dag(), &seed)[x] {
                    EndpointMark::Tail
                } else {
                    EndpointMark::Arrow
                }
            };
            mag.add_edge(a, b, mark(oi, oj), mark(oj, oi))?;
        }
    }
    Ok(mag)
}
