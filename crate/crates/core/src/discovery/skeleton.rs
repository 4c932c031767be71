// SPDX-License-Identifier: MIT
//! PC adjacency search.

use alloc::vec::Vec;

use super::{SearchOptions, SepsetMap};
use crate::citest::{CITester, CiSource};
use crate::graph::MixedGraph;
use crate::subsets::Combinations;

/// Starts from the complete circle graph and, for `k = 0, 1, ...`, tests
/// every ordered adjacent pair `(x, y)` against the `k`-subsets of
/// `adj(x) \ {y}` in lexicographic order. The first separating set found
/// removes the edge. With `stable_skeleton` the adjacency sets are frozen at
/// the start of each level.
pub fn skeleton<S: CiSource>(ci: &mut CITester<S>, opts: &SearchOptions) -> (MixedGraph, SepsetMap) {
    let p = ci.n_vars();
    let mut g = MixedGraph::complete_circle(p);
    let mut sepsets = SepsetMap::new();
    let limit = opts.size_limit();
    let mut k = 0usize;
    loop {
        if k > limit {
            break;
        }
        let frozen: Vec<Vec<usize>> = (0..p).map(|v| g.neighbors(v).collect()).collect();
        let mut any_candidate = false;
        for (x, adj) in frozen.iter().enumerate() {
            let ys: Vec<usize> =
                if opts.stable_skeleton { adj.clone() } else { g.neighbors(x).collect() };
            for y in ys {
                if !g.is_adjacent(x, y) {
                    continue;
                }
                let pool: Vec<usize> = if opts.stable_skeleton {
                    adj.iter().copied().filter(|&v| v != y).collect()
                } else {
                    g.neighbors(x).filter(|&v| v != y).collect()
                };
                if pool.len() < k {
                    continue;
                }
                any_candidate = true;
                for w in Combinations::new(&pool, k) {
                    if ci.is_independent(x, y, &w) {
                        g.remove_edge(x, y);
                        sepsets.insert(x, y, w);
                        break;
                    }
                }
            }
        }
        if !any_candidate {
            break;
        }
        k += 1;
    }
    (g, sepsets)
}
