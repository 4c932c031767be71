// SPDX-License-Identifier: MIT
//! FCI and RFCI over any [`CITester`].
//!
//! Both start from the stable PC adjacency search. FCI then orients
//! v-structures, prunes further edges with Possible-D-SEP, re-orients and
//! closes under the orientation rules. RFCI replaces the unconditional
//! v-structure step with a check that the two edges of every candidate
//! triple survive the triple's separating set, skips Possible-D-SEP, and
//! verifies the pairs along a discriminating path before using it.

mod orient;
mod rules;
mod skeleton;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub use orient::{possible_dsep, possible_dsep_stage, rfci_vstructures, vstructures};
pub use rules::orientation_rules;
pub use skeleton::skeleton;

use crate::citest::{CITester, CiSource};
use crate::graph::{EndpointMark, MixedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Mode {
    Fci,
    Rfci,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Fci => "fci",
            Mode::Rfci => "rfci",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Mode::Fci, Mode::Rfci].into_iter().find(|m| m.name().eq_ignore_ascii_case(s))
    }
}

/// Optional orientation rules. R1 to R4 always run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    /// Selection-bias rules producing undirected edges.
    pub r5_r7: bool,
    /// Tail-orientation rules for arrowhead completeness.
    pub r8_r10: bool,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet { r5_r7: false, r8_r10: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest conditioning set tried; `None` for unlimited.
    pub max_cond_size: Option<usize>,
    /// Freeze adjacency sets within each level of the adjacency search.
    pub stable_skeleton: bool,
    /// Run the Possible-D-SEP stage (FCI only).
    pub possible_dsep: bool,
    pub rules: RuleSet,
    pub mode: Mode,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_cond_size: None,
            stable_skeleton: true,
            possible_dsep: true,
            rules: RuleSet::default(),
            mode: Mode::Fci,
        }
    }
}

impl SearchOptions {
    pub fn fci() -> Self {
        SearchOptions::default()
    }

    pub fn rfci() -> Self {
        SearchOptions { mode: Mode::Rfci, ..SearchOptions::default() }
    }

    pub(crate) fn size_limit(&self) -> usize {
        self.max_cond_size.unwrap_or(usize::MAX)
    }
}

/// Separating sets keyed by unordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SepsetMap(BTreeMap<(usize, usize), Vec<usize>>);

impl SepsetMap {
    pub fn new() -> Self {
        SepsetMap::default()
    }

    fn key(i: usize, j: usize) -> (usize, usize) {
        (i.min(j), i.max(j))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&[usize]> {
        self.0.get(&Self::key(i, j)).map(Vec::as_slice)
    }

    /// Replaces any previous set for the pair. The set is stored sorted.
    pub fn insert(&mut self, i: usize, j: usize, mut set: Vec<usize>) {
        set.sort_unstable();
        self.0.insert(Self::key(i, j), set);
    }

    /// `v ∈ sepset(i, j)`; false when no set is recorded.
    pub fn contains(&self, i: usize, j: usize, v: usize) -> bool {
        self.get(i, j).is_some_and(|s| s.binary_search(&v).is_ok())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &[usize])> + '_ {
        self.0.iter().map(|(&k, v)| (k, v.as_slice()))
    }
}

/// Search output: the partial ancestral graph and the separating sets that
/// justified its missing edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pag {
    pub graph: MixedGraph,
    pub sepsets: SepsetMap,
    /// Some dependence check was skipped because of `max_cond_size`.
    pub truncated: bool,
}

/// Replaces every endpoint mark by a circle.
pub(crate) fn reset_marks(g: &mut MixedGraph) {
    let edges: Vec<_> = g.edges().collect();
    for e in edges {
        g.set_mark_at(e.first, e.second, EndpointMark::Circle);
        g.set_mark_at(e.second, e.first, EndpointMark::Circle);
    }
}

/// FCI. `opts.mode` is ignored.
pub fn fci<S: CiSource>(ci: &mut CITester<S>, opts: &SearchOptions) -> Pag {
    let opts = SearchOptions { mode: Mode::Fci, ..*opts };
    let (mut graph, mut sepsets) = skeleton(ci, &opts);
    vstructures(&mut graph, &sepsets);
    if opts.possible_dsep {
        possible_dsep_stage(&mut graph, &mut sepsets, ci, &opts);
        reset_marks(&mut graph);
        vstructures(&mut graph, &sepsets);
    }
    let mut pag = Pag { graph, sepsets, truncated: false };
    orientation_rules(&mut pag, ci, &opts);
    pag
}

/// RFCI. `opts.mode` is ignored.
pub fn rfci<S: CiSource>(ci: &mut CITester<S>, opts: &SearchOptions) -> Pag {
    let opts = SearchOptions { mode: Mode::Rfci, ..*opts };
    let (mut graph, mut sepsets) = skeleton(ci, &opts);
    rfci_vstructures(&mut graph, &mut sepsets, ci);
    let mut pag = Pag { graph, sepsets, truncated: false };
    orientation_rules(&mut pag, ci, &opts);
    pag
}

/// Runs the algorithm selected by `opts.mode`.
pub fn search<S: CiSource>(ci: &mut CITester<S>, opts: &SearchOptions) -> Pag {
    match opts.mode {
        Mode::Fci => fci(ci, opts),
        Mode::Rfci => rfci(ci, opts),
    }
}
