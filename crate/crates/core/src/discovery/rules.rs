// SPDX-License-Identifier: MIT
//! Orientation rules R1 to R10.
//!
//! Every application turns at least one circle into a tail or arrowhead (or,
//! in RFCI, deletes an edge), so the fixpoint loop terminates.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{Mode, Pag, SearchOptions};
use crate::citest::{CITester, CiSource};
use crate::graph::EndpointMark::{self, Arrow, Circle, Tail};
use crate::graph::MixedGraph;
use crate::subsets::subsets_up_to;

/// Applies the enabled rules, in ascending order, until nothing changes.
pub fn orientation_rules<S: CiSource>(pag: &mut Pag, ci: &mut CITester<S>, opts: &SearchOptions) {
    loop {
        let g = &mut pag.graph;
        let mut changed = r1(g);
        changed |= r2(g);
        changed |= r3(g);
        changed |= r4(pag, ci, opts);
        let g = &mut pag.graph;
        if opts.rules.r5_r7 {
            changed |= r5(g);
            changed |= r6(g);
            changed |= r7(g);
        }
        if opts.rules.r8_r10 {
            changed |= r8(g);
            changed |= r9(g);
            changed |= r10(g);
        }
        if !changed {
            break;
        }
    }
}

#[inline]
fn mark(g: &MixedGraph, at: usize, from: usize) -> Option<EndpointMark> {
    g.mark_at(at, from)
}

fn set_edge(g: &mut MixedGraph, u: usize, v: usize, at_u: EndpointMark, at_v: EndpointMark) {
    g.set_mark_at(u, v, at_u);
    g.set_mark_at(v, u, at_v);
}

fn nb(g: &MixedGraph, v: usize) -> Vec<usize> {
    g.neighbors(v).collect()
}

/// `u -> v` may be extended to a directed edge: not into `u`, not out of `v`.
fn potentially_directed(g: &MixedGraph, u: usize, v: usize) -> bool {
    matches!(mark(g, u, v), Some(Tail | Circle)) && matches!(mark(g, v, u), Some(Arrow | Circle))
}

/// R1: `a *-> b o-* c`, `a, c` non-adjacent ⇒ `b -> c`.
fn r1(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    for a in 0..g.vertex_count() {
        for b in nb(g, a) {
            if mark(g, b, a) != Some(Arrow) {
                continue;
            }
            for c in nb(g, b) {
                if c != a && !g.is_adjacent(a, c) && mark(g, b, c) == Some(Circle) {
                    set_edge(g, b, c, Tail, Arrow);
                    changed = true;
                }
            }
        }
    }
    changed
}

/// R2: `a -> b *-> c` or `a *-> b -> c`, with `a *-o c` ⇒ `a *-> c`.
fn r2(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    for a in 0..g.vertex_count() {
        for c in nb(g, a) {
            if mark(g, c, a) != Some(Circle) {
                continue;
            }
            let hit = nb(g, a).into_iter().filter(|&b| b != c && g.is_adjacent(b, c)).any(|b| {
                (g.is_directed(a, b) && mark(g, c, b) == Some(Arrow))
                    || (mark(g, b, a) == Some(Arrow) && g.is_directed(b, c))
            });
            if hit {
                g.set_mark_at(c, a, Arrow);
                changed = true;
            }
        }
    }
    changed
}

/// R3: `a *-> b <-* c`, `a *-o t o-* c`, `a, c` non-adjacent, `t *-o b` ⇒ `t *-> b`.
fn r3(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    for b in 0..g.vertex_count() {
        let around = nb(g, b);
        for (x, &a) in around.iter().enumerate() {
            for &c in &around[x + 1..] {
                if g.is_adjacent(a, c) || mark(g, b, a) != Some(Arrow) || mark(g, b, c) != Some(Arrow) {
                    continue;
                }
                for &t in &around {
                    if t != a
                        && t != c
                        && mark(g, t, a) == Some(Circle)
                        && mark(g, t, c) == Some(Circle)
                        && mark(g, b, t) == Some(Circle)
                    {
                        g.set_mark_at(b, t, Arrow);
                        changed = true;
                    }
                }
            }
        }
    }
    changed
}

/// Shortest discriminating path `[θ, ..., a, b, c]` for `b`, given that `a`
/// is a parent of `c` with an arrowhead at `a` from `b`.
fn discriminating_path(g: &MixedGraph, a: usize, b: usize, c: usize) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut visited = vec![false; n];
    let mut next_on_path = vec![usize::MAX; n];
    visited[a] = true;
    visited[b] = true;
    visited[c] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for t in g.neighbors(v) {
            if visited[t] || mark(g, v, t) != Some(Arrow) {
                continue;
            }
            if !g.is_adjacent(t, c) {
                let mut path = vec![t];
                let mut u = v;
                while u != usize::MAX {
                    path.push(u);
                    u = next_on_path[u];
                }
                path.extend([b, c]);
                return Some(path);
            }
            if g.is_directed(t, c) && mark(g, t, v) == Some(Arrow) {
                visited[t] = true;
                next_on_path[t] = v;
                queue.push_back(t);
            }
        }
    }
    None
}

/// RFCI check along a discriminating path: every pair of successive vertices
/// must stay dependent given `Y` minus the pair, for all `Y ⊆ sepset(θ, c)`.
/// Failing pairs lose their edge. Returns whether the path survived.
fn path_dependencies_hold<S: CiSource>(
    pag: &mut Pag,
    ci: &mut CITester<S>,
    path: &[usize],
    opts: &SearchOptions,
) -> bool {
    let (theta, c) = (path[0], path[path.len() - 1]);
    let w = pag.sepsets.get(theta, c).map(<[usize]>::to_vec).unwrap_or_default();
    let limit = opts.size_limit();
    if w.len() > limit {
        pag.truncated = true;
    }
    let mut intact = true;
    for pair in path.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        let separator = subsets_up_to(&w, limit).find_map(|y| {
            let cond: Vec<usize> = y.into_iter().filter(|&z| z != u && z != v).collect();
            ci.is_independent(u, v, &cond).then_some(cond)
        });
        if let Some(cond) = separator {
            pag.graph.remove_edge(u, v);
            pag.sepsets.insert(u, v, cond);
            intact = false;
        }
    }
    intact
}

/// R4: discriminating path `<θ, ..., a, b, c>` for `b` with `b o-* c`:
/// `b -> c` if `b ∈ sepset(θ, c)`, else `a <-> b <-> c`.
fn r4<S: CiSource>(pag: &mut Pag, ci: &mut CITester<S>, opts: &SearchOptions) -> bool {
    let mut changed = false;
    for c in 0..pag.graph.vertex_count() {
        for b in nb(&pag.graph, c) {
            for a in nb(&pag.graph, c) {
                let g = &pag.graph;
                if a == b
                    || mark(g, b, c) != Some(Circle)
                    || !g.is_adjacent(a, b)
                    || mark(g, a, b) != Some(Arrow)
                    || !g.is_directed(a, c)
                {
                    continue;
                }
                let Some(path) = discriminating_path(g, a, b, c) else { continue };
                if opts.mode == Mode::Rfci && !path_dependencies_hold(pag, ci, &path, opts) {
                    changed = true;
                    continue;
                }
                let theta = path[0];
                let g = &mut pag.graph;
                if pag.sepsets.contains(theta, c, b) {
                    set_edge(g, b, c, Tail, Arrow);
                } else {
                    g.set_mark_at(b, a, Arrow);
                    set_edge(g, b, c, Arrow, Arrow);
                }
                changed = true;
            }
        }
    }
    changed
}

fn is_circle_edge(g: &MixedGraph, u: usize, v: usize) -> bool {
    mark(g, u, v) == Some(Circle) && mark(g, v, u) == Some(Circle)
}

/// Uncovered circle path from `prev, cur` to `target`, returned as the
/// vertices after `prev`. `last_ok` filters the vertex preceding `target`.
fn circle_path(
    g: &MixedGraph,
    prev: usize,
    cur: usize,
    target: usize,
    on_path: &mut [bool],
    last_ok: &dyn Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    on_path[cur] = true;
    for next in g.neighbors(cur) {
        if on_path[next] || g.is_adjacent(prev, next) || !is_circle_edge(g, cur, next) {
            continue;
        }
        if next == target {
            if last_ok(cur) {
                on_path[cur] = false;
                return Some(vec![cur, target]);
            }
            continue;
        }
        if let Some(mut rest) = circle_path(g, cur, next, target, on_path, last_ok) {
            on_path[cur] = false;
            rest.insert(0, cur);
            return Some(rest);
        }
    }
    on_path[cur] = false;
    None
}

/// R5: `a o-o b` with an uncovered circle path `<a, γ, ..., θ, b>`, `a, θ`
/// and `b, γ` non-adjacent ⇒ `a - b` and every path edge becomes `-`.
fn r5(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    let n = g.vertex_count();
    for a in 0..n {
        for b in nb(g, a) {
            if !is_circle_edge(g, a, b) {
                continue;
            }
            let mut on_path = vec![false; n];
            on_path[a] = true;
            let found = nb(g, a).into_iter().filter(|&x| x != b && !g.is_adjacent(x, b)).find_map(|gamma| {
                if !is_circle_edge(g, a, gamma) {
                    return None;
                }
                let last_ok = |theta: usize| !g.is_adjacent(theta, a);
                circle_path(g, a, gamma, b, &mut on_path, &last_ok)
            });
            if let Some(rest) = found {
                set_edge(g, a, b, Tail, Tail);
                let mut u = a;
                for v in rest {
                    set_edge(g, u, v, Tail, Tail);
                    u = v;
                }
                changed = true;
            }
        }
    }
    changed
}

/// R6: `a - b o-* c` ⇒ `b -* c`.
fn r6(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    for b in 0..g.vertex_count() {
        let around = nb(g, b);
        let has_undirected =
            |g: &MixedGraph, c: usize| around.iter().any(|&a| a != c && mark(g, b, a) == Some(Tail) && mark(g, a, b) == Some(Tail));
        for &c in &around {
            if mark(g, b, c) == Some(Circle) && has_undirected(g, c) {
                g.set_mark_at(b, c, Tail);
                changed = true;
            }
        }
    }
    changed
}

/// R7: `a -o b o-* c`, `a, c` non-adjacent ⇒ `b -* c`.
fn r7(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    for b in 0..g.vertex_count() {
        let around = nb(g, b);
        for &c in &around {
            if mark(g, b, c) != Some(Circle) {
                continue;
            }
            let hit = around.iter().any(|&a| {
                a != c && !g.is_adjacent(a, c) && mark(g, a, b) == Some(Tail) && mark(g, b, a) == Some(Circle)
            });
            if hit {
                g.set_mark_at(b, c, Tail);
                changed = true;
            }
        }
    }
    changed
}

/// Edges `a o-> c` in lexicographic order.
fn circle_arrow_edges(g: &MixedGraph) -> Vec<(usize, usize)> {
    (0..g.vertex_count())
        .flat_map(|a| g.neighbors(a).map(move |c| (a, c)))
        .filter(|&(a, c)| mark(g, a, c) == Some(Circle) && mark(g, c, a) == Some(Arrow))
        .collect()
}

/// R8: `a -> b -> c` or `a -o b -> c`, with `a o-> c` ⇒ `a -> c`.
fn r8(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    for (a, c) in circle_arrow_edges(g) {
        let hit = nb(g, a).into_iter().any(|b| {
            b != c
                && g.is_directed(b, c)
                && mark(g, a, b) == Some(Tail)
                && matches!(mark(g, b, a), Some(Arrow | Circle))
        });
        if hit && mark(g, a, c) == Some(Circle) {
            g.set_mark_at(a, c, Tail);
            changed = true;
        }
    }
    changed
}

/// Whether an uncovered potentially directed path runs `prev, cur, ..., target`.
fn updp_reaches(g: &MixedGraph, prev: usize, cur: usize, target: usize, on_path: &mut [bool]) -> bool {
    on_path[cur] = true;
    let found = g.neighbors(cur).any(|next| {
        !on_path[next]
            && next != prev
            && !g.is_adjacent(prev, next)
            && potentially_directed(g, cur, next)
            && (next == target || updp_reaches(g, cur, next, target, on_path))
    });
    on_path[cur] = false;
    found
}

/// R9: `a o-> c` with an uncovered potentially directed path `<a, b, ..., c>`,
/// `b, c` non-adjacent ⇒ `a -> c`.
fn r9(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    let n = g.vertex_count();
    for (a, c) in circle_arrow_edges(g) {
        let mut on_path = vec![false; n];
        on_path[a] = true;
        let hit = nb(g, a).into_iter().any(|b| {
            b != c
                && !g.is_adjacent(b, c)
                && potentially_directed(g, a, b)
                && updp_reaches(g, a, b, c, &mut on_path)
        });
        if hit && mark(g, a, c) == Some(Circle) {
            g.set_mark_at(a, c, Tail);
            changed = true;
        }
    }
    changed
}

/// R10: `a o-> c`, `b -> c <- t`, uncovered potentially directed paths from
/// `a` to `b` and from `a` to `t` whose first steps `μ ≠ ω` are non-adjacent
/// ⇒ `a -> c`. Paths avoid `c`.
fn r10(g: &mut MixedGraph) -> bool {
    let mut changed = false;
    let n = g.vertex_count();
    for (a, c) in circle_arrow_edges(g) {
        let parents: Vec<usize> = g.parents(c).filter(|&x| x != a).collect();
        if parents.len() < 2 {
            continue;
        }
        let first_steps: Vec<Vec<usize>> = parents
            .iter()
            .map(|&target| {
                nb(g, a)
                    .into_iter()
                    .filter(|&mu| {
                        mu != c
                            && potentially_directed(g, a, mu)
                            && (mu == target || {
                                let mut on_path = vec![false; n];
                                on_path[a] = true;
                                on_path[c] = true;
                                updp_reaches(g, a, mu, target, &mut on_path)
                            })
                    })
                    .collect()
            })
            .collect();
        let hit = (0..parents.len()).any(|x| {
            (x + 1..parents.len()).any(|y| {
                first_steps[x]
                    .iter()
                    .any(|&mu| first_steps[y].iter().any(|&om| mu != om && !g.is_adjacent(mu, om)))
            })
        });
        if hit && mark(g, a, c) == Some(Circle) {
            g.set_mark_at(a, c, Tail);
            changed = true;
        }
    }
    changed
}
