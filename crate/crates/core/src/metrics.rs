// SPDX-License-Identifier: MIT
//! Structural Hamming distance and per-test sample usage.
//!
//! SHD counts, over unordered vertex pairs, one point when exactly one graph
//! has the edge and one point per differing endpoint mark when both do.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::citest::{CIDecision, Strategy};
use crate::error::{Error, Result};
use crate::graph::MixedGraph;

fn check_sizes(g1: &MixedGraph, g2: &MixedGraph) -> Result<usize> {
    let n = g1.vertex_count();
    if n != g2.vertex_count() {
        return Err(Error::SizeMismatch(n, g2.vertex_count()));
    }
    Ok(n)
}

pub fn shd(g1: &MixedGraph, g2: &MixedGraph) -> Result<usize> {
    let n = check_sizes(g1, g2)?;
    let mut d = 0;
    for u in 0..n {
        for v in u + 1..n {
            d += match (g1.edge_marks(u, v), g2.edge_marks(u, v)) {
                (None, None) => 0,
                (Some(_), None) | (None, Some(_)) => 1,
                (Some((a1, b1)), Some((a2, b2))) => usize::from(a1 != a2) + usize::from(b1 != b2),
            };
        }
    }
    Ok(d)
}

/// Number of pairs adjacent in exactly one graph.
pub fn skeleton_shd(g1: &MixedGraph, g2: &MixedGraph) -> Result<usize> {
    let n = check_sizes(g1, g2)?;
    Ok((0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| g1.is_adjacent(u, v) != g2.is_adjacent(u, v))
        .count())
}

/// Mean effective sample size over the logged queries that carry one.
pub fn mean_effective_n(log: &[CIDecision]) -> Option<f64> {
    let (sum, count) = log
        .iter()
        .filter_map(|d| d.effective_n)
        .fold((0.0, 0usize), |(s, c), n| (s + n as f64, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Percentage increase of the mean effective sample size of `log_a` over
/// that of `log_b`.
pub fn sample_gain(log_a: &[CIDecision], log_b: &[CIDecision]) -> Result<f64> {
    let a = mean_effective_n(log_a).ok_or(Error::UndefinedMetric("first log has no sample-based queries"))?;
    let b = mean_effective_n(log_b).ok_or(Error::UndefinedMetric("second log has no sample-based queries"))?;
    if b == 0.0 {
        return Err(Error::UndefinedMetric("baseline mean sample size is zero"));
    }
    Ok(100.0 * (a - b) / b)
}

/// Scores of one learned graph against its target.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub shd: usize,
    pub skeleton_shd: usize,
    /// Keyed by the strategy label recorded on each logged query.
    pub avg_effective_n: BTreeMap<Strategy, f64>,
    pub n_queries: BTreeMap<Strategy, usize>,
    /// Sample gain of the scored strategy's own queries over a baseline
    /// log, if both carry samples. Confirmation queries logged under another
    /// label are left out.
    pub pct_sample_gain: Option<f64>,
}

impl ScoreReport {
    pub fn new(
        learned: &MixedGraph,
        target: &MixedGraph,
        strategy: Strategy,
        log: &[CIDecision],
        baseline: Option<&[CIDecision]>,
    ) -> Result<Self> {
        let mut sums: BTreeMap<Strategy, (f64, usize)> = BTreeMap::new();
        let mut n_queries = BTreeMap::new();
        for d in log {
            *n_queries.entry(d.strategy).or_insert(0) += 1;
            if let Some(n) = d.effective_n {
                let e = sums.entry(d.strategy).or_insert((0.0, 0));
                e.0 += n as f64;
                e.1 += 1;
            }
        }
        Ok(ScoreReport {
            shd: shd(learned, target)?,
            skeleton_shd: skeleton_shd(learned, target)?,
            avg_effective_n: sums.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect(),
            n_queries,
            pct_sample_gain: baseline.and_then(|b| {
                let own: Vec<CIDecision> = log.iter().filter(|d| d.strategy == strategy).cloned().collect();
                sample_gain(&own, b).ok()
            }),
        })
    }
}
