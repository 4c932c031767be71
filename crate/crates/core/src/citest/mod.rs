// SPDX-License-Identifier: MIT
//! Conditional-independence decisions over incomplete data.
//!
//! A [`CiSource`] answers a single query under a given row-deletion scheme,
//! either from samples ([`SampleSource`], Fisher's z) or from the ground
//! truth ([`SystemOracle`], d-separation given the induced selection).
//! [`CITester`] combines a source with a [`Strategy`], memoizes answers and
//! keeps a log of every executed query.
//!
//! The wrapper strategy asks the test-wise query first. A dependent answer
//! is final. An independent answer is confirmed by the list-wise query, and
//! the result is independent only if both agree; the reported p-value is
//! the smaller of the two.

mod fisher;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub use fisher::{
    covariance, fisher_z, listwise_rows, normal_two_sided, partial_correlation, testwise_rows,
    FisherZ,
};

use crate::data::Dataset;
use crate::dsep::oracle_ci;
use crate::error::{Error, Result};
use crate::system::CausalSystem;

/// Which rows a single query may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Deletion {
    /// Rows observed on the variables of the query.
    TestWise,
    /// Rows observed on every variable.
    ListWise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Strategy {
    TestWise,
    ListWise,
    Wrapper,
    Heuristic,
    Oracle,
}

impl Strategy {
    pub const ALL: [Strategy; 5] =
        [Strategy::TestWise, Strategy::ListWise, Strategy::Wrapper, Strategy::Heuristic, Strategy::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::TestWise => "testwise",
            Strategy::ListWise => "listwise",
            Strategy::Wrapper => "wrapper",
            Strategy::Heuristic => "heuristic",
            Strategy::Oracle => "oracle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Strategy::ALL.into_iter().find(|st| st.name().eq_ignore_ascii_case(s))
    }
}

/// Answer of a single source query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub effective_n: Option<usize>,
    pub p_value: Option<f64>,
    pub independent: bool,
    /// Too few rows to test; reported as independent with p-value 1.
    pub degenerate: bool,
}

/// Something that can answer `i ⊥ j | w` under a deletion scheme.
pub trait CiSource {
    fn n_vars(&self) -> usize;

    /// True for ground-truth sources that carry no sample.
    fn is_oracle(&self) -> bool;

    /// `w` is sorted and excludes `i < j`.
    fn query(&self, i: usize, j: usize, w: &[usize], deletion: Deletion) -> Outcome;
}

/// Fisher's z test on a dataset with missing cells.
#[derive(Debug, Clone)]
pub struct SampleSource<'a> {
    data: &'a Dataset,
    alpha: f64,
    listwise: Vec<usize>,
}

impl<'a> SampleSource<'a> {
    pub fn new(data: &'a Dataset, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(alloc::format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(SampleSource { data, alpha, listwise: listwise_rows(data) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }
}

impl CiSource for SampleSource<'_> {
    fn n_vars(&self) -> usize {
        self.data.n_cols()
    }

    fn is_oracle(&self) -> bool {
        false
    }

    fn query(&self, i: usize, j: usize, w: &[usize], deletion: Deletion) -> Outcome {
        let vars: Vec<usize> = [i, j].into_iter().chain(w.iter().copied()).collect();
        let owned;
        let rows: &[usize] = match deletion {
            Deletion::ListWise => &self.listwise,
            Deletion::TestWise => {
                owned = testwise_rows(self.data, &vars);
                &owned
            }
        };
        let n = rows.len();
        if n <= w.len() + 3 {
            return Outcome { effective_n: Some(n), p_value: Some(1.0), independent: true, degenerate: true };
        }
        let cov = covariance(self.data, rows, &vars);
        let local_w: Vec<usize> = (2..vars.len()).collect();
        let t = fisher_z(&cov, n, 0, 1, &local_w, self.alpha).expect("row count checked");
        Outcome { effective_n: Some(n), p_value: Some(t.p_value), independent: t.independent, degenerate: false }
    }
}

/// Selection conditioned on by a [`SystemOracle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleSelection {
    /// The selection induced by the query's deletion scheme:
    /// `S_{OiOjW}` for test-wise and `S_l` for list-wise queries.
    Missingness,
    /// A fixed selection set regardless of deletion.
    Fixed(Vec<usize>),
}

/// d-separation oracle over the observed variables of a system. Variable `k`
/// is the `k`-th observed vertex.
#[derive(Debug, Clone)]
pub struct SystemOracle<'a> {
    sys: &'a CausalSystem,
    selection: OracleSelection,
}

impl<'a> SystemOracle<'a> {
    /// Selection follows the deletion scheme of each query.
    pub fn missingness(sys: &'a CausalSystem) -> Self {
        SystemOracle { sys, selection: OracleSelection::Missingness }
    }

    pub fn fixed(sys: &'a CausalSystem, selection: Vec<usize>) -> Self {
        SystemOracle { sys, selection: OracleSelection::Fixed(selection) }
    }

    /// Always conditions on `S_l`.
    pub fn list_wise(sys: &'a CausalSystem) -> Self {
        Self::fixed(sys, sys.list_wise_selection())
    }

    /// Always conditions on the selection variables `S` only.
    pub fn selection_only(sys: &'a CausalSystem) -> Self {
        Self::fixed(sys, sys.selection().to_vec())
    }

    pub fn system(&self) -> &CausalSystem {
        self.sys
    }

    /// The selection set a query conditions on, as system vertices.
    pub fn selection_for(&self, i: usize, j: usize, w: &[usize], deletion: Deletion) -> Vec<usize> {
        match (&self.selection, deletion) {
            (OracleSelection::Fixed(s), _) => s.clone(),
            (OracleSelection::Missingness, Deletion::ListWise) => self.sys.list_wise_selection(),
            (OracleSelection::Missingness, Deletion::TestWise) => {
                let vars: Vec<usize> = [i, j].iter().chain(w).map(|&k| self.sys.observed()[k]).collect();
                self.sys.selection_for(&vars)
            }
        }
    }
}

impl CiSource for SystemOracle<'_> {
    fn n_vars(&self) -> usize {
        self.sys.observed().len()
    }

    fn is_oracle(&self) -> bool {
        true
    }

    fn query(&self, i: usize, j: usize, w: &[usize], deletion: Deletion) -> Outcome {
        let obs = self.sys.observed();
        let sel = self.selection_for(i, j, w, deletion);
        let wv: Vec<usize> = w.iter().map(|&k| obs[k]).collect();
        let independent = oracle_ci(self.sys, obs[i], obs[j], &wv, &sel)
            .expect("observed vertices are disjoint from the selection");
        Outcome { effective_n: None, p_value: None, independent, degenerate: false }
    }
}

/// One logged CI query.
#[derive(Debug, Clone, PartialEq)]
pub struct CIDecision {
    pub i: usize,
    pub j: usize,
    pub conditioning: Vec<usize>,
    pub strategy: Strategy,
    pub effective_n: Option<usize>,
    pub p_value: Option<f64>,
    pub independent: bool,
    pub degenerate: bool,
}

impl CIDecision {
    fn new(i: usize, j: usize, w: &[usize], strategy: Strategy, o: Outcome) -> Self {
        CIDecision {
            i,
            j,
            conditioning: w.to_vec(),
            strategy,
            effective_n: o.effective_n,
            p_value: o.p_value,
            independent: o.independent,
            degenerate: o.degenerate,
        }
    }
}

type Key = (usize, usize, Vec<usize>);

/// A source paired with a strategy, with memoized answers and a log of every
/// executed query (memo hits are not logged again).
#[derive(Debug, Clone)]
pub struct CITester<S> {
    source: S,
    strategy: Strategy,
    memo: BTreeMap<Key, CIDecision>,
    log: Vec<CIDecision>,
}

impl<S: CiSource> CITester<S> {
    /// The oracle strategy requires an oracle source.
    pub fn new(source: S, strategy: Strategy) -> Result<Self> {
        if strategy == Strategy::Oracle && !source.is_oracle() {
            return Err(Error::InvalidArgument("the oracle strategy needs a ground-truth source".into()));
        }
        Ok(CITester { source, strategy, memo: BTreeMap::new(), log: Vec::new() })
    }

    pub fn n_vars(&self) -> usize {
        self.source.n_vars()
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn log(&self) -> &[CIDecision] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<CIDecision> {
        core::mem::take(&mut self.log)
    }

    /// `i ⊥ j | w`. Symmetric in `i, j`; the order of `w` is irrelevant.
    ///
    /// # Panics
    /// If an index is out of range, `i == j`, or `w` contains `i` or `j`.
    pub fn decide(&mut self, i: usize, j: usize, w: &[usize]) -> CIDecision {
        let p = self.n_vars();
        let (i, j) = (i.min(j), i.max(j));
        assert!(i != j && j < p, "invalid pair ({i}, {j}) for {p} variables");
        let mut w = w.to_vec();
        w.sort_unstable();
        w.dedup();
        assert!(
            w.iter().all(|&k| k < p && k != i && k != j),
            "conditioning set {w:?} overlaps ({i}, {j}) or is out of range"
        );
        let key = (i, j, w);
        if let Some(d) = self.memo.get(&key) {
            return d.clone();
        }
        let d = self.execute(i, j, &key.2);
        self.memo.insert(key, d.clone());
        d
    }

    pub fn is_independent(&mut self, i: usize, j: usize, w: &[usize]) -> bool {
        self.decide(i, j, w).independent
    }

    fn execute(&mut self, i: usize, j: usize, w: &[usize]) -> CIDecision {
        let st = self.strategy;
        match st {
            Strategy::TestWise | Strategy::Heuristic | Strategy::Oracle => {
                let d = CIDecision::new(i, j, w, st, self.source.query(i, j, w, Deletion::TestWise));
                self.log.push(d.clone());
                d
            }
            Strategy::ListWise => {
                let d = CIDecision::new(i, j, w, st, self.source.query(i, j, w, Deletion::ListWise));
                self.log.push(d.clone());
                d
            }
            Strategy::Wrapper => {
                let first = self.source.query(i, j, w, Deletion::TestWise);
                if !first.independent {
                    let d = CIDecision::new(i, j, w, st, first);
                    self.log.push(d.clone());
                    return d;
                }
                let second = self.source.query(i, j, w, Deletion::ListWise);
                let combined = Outcome {
                    effective_n: first.effective_n,
                    p_value: match (first.p_value, second.p_value) {
                        (Some(p), Some(q)) => Some(p.min(q)),
                        _ => None,
                    },
                    independent: second.independent,
                    degenerate: first.degenerate,
                };
                let d = CIDecision::new(i, j, w, st, combined);
                self.log.push(d.clone());
                self.log.push(CIDecision::new(i, j, w, Strategy::ListWise, second));
                d
            }
        }
    }
}
