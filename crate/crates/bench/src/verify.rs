// SPDX-License-Identifier: MIT
//! Oracle-level soundness checks.
//!
//! Under MNAR or MAR missingness every generated system is searched twice
//! per algorithm: with the wrapper over a d-separation oracle that conditions
//! on the indicators of each query's own variables, and with an oracle that
//! conditions on `S_l`. Under MCAR the heuristic strategy is compared with
//! an oracle conditioning on the selection variables alone. The graphs must
//! agree exactly.

use mnarfci_core::synth::{generate_dag, stream_rng, GenConfig, Mechanism, MissingnessPlan};
use mnarfci_core::{search, CITester, CausalSystem, Dag, Mode, Role, SearchOptions, Strategy, SystemOracle};
use rand::RngCore;
use serde::Serialize;

use crate::error::{BenchError, Result};
use crate::format::{graph_to_text, system_to_text};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub n_systems: usize,
    /// Observed-plus-hidden variable counts cycle through this range.
    pub p_min: usize,
    pub p_max: usize,
    pub mechanism: Mechanism,
    pub seed: u64,
    pub algorithms: Vec<Mode>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n_systems: 100,
            p_min: 6,
            p_max: 10,
            mechanism: Mechanism::Mnar,
            seed: 0,
            algorithms: vec![Mode::Fci, Mode::Rfci],
        }
    }
}

/// A system on which the two searches disagree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    /// Generator seed reproducing the system.
    pub seed: u64,
    pub p: usize,
    pub algorithm: Mode,
    pub system: String,
    pub tested: String,
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Generator settings for system `k`: `p` cycles through the range, and the
/// hidden-variable counts shrink so that small `p` still leaves three
/// observed targets per driver.
pub fn system_config(cfg: &VerifyConfig, k: usize) -> GenConfig {
    let span = cfg.p_max - cfg.p_min + 1;
    let p = cfg.p_min + k % span;
    let drivers = if cfg.mechanism == Mechanism::Mcar { 0 } else { 2 };
    GenConfig {
        p,
        n_latent_confounders: 0..=4.min(p.saturating_sub(3 + drivers)),
        seed: stream_rng(cfg.seed, k as u64).next_u64(),
        ..GenConfig::default()
    }
}

pub fn generate_system(gen: &GenConfig, mechanism: Mechanism) -> Result<CausalSystem> {
    let mut rng = gen.rng();
    let m = generate_dag(gen, &mut rng)?;
    Ok(MissingnessPlan::draw(mechanism, &m, gen, &mut rng)?.system(&m))
}

/// Tested and reference searches for one system; `None` when they agree.
pub fn compare(sys: &CausalSystem, mechanism: Mechanism, mode: Mode) -> Result<Option<(String, String)>> {
    let opts = SearchOptions { mode, ..SearchOptions::fci() };
    let (strategy, reference) = match mechanism {
        Mechanism::Mcar => (Strategy::Heuristic, SystemOracle::selection_only(sys)),
        _ => (Strategy::Wrapper, SystemOracle::list_wise(sys)),
    };
    let tested = search(&mut CITester::new(SystemOracle::missingness(sys), strategy)?, &opts);
    let want = search(&mut CITester::new(reference, Strategy::Oracle)?, &opts);
    Ok((tested.graph != want.graph).then(|| (graph_to_text(&tested.graph), graph_to_text(&want.graph))))
}

pub fn verify_soundness(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.p_min > cfg.p_max || cfg.n_systems == 0 {
        return Err(BenchError::Config("need p_min <= p_max and at least one system".into()));
    }
    let mut counterexamples = Vec::new();
    for k in 0..cfg.n_systems {
        let gen = system_config(cfg, k);
        let sys = generate_system(&gen, cfg.mechanism)?;
        for &algorithm in &cfg.algorithms {
            if let Some((tested, reference)) = compare(&sys, cfg.mechanism, algorithm)? {
                counterexamples.push(Counterexample {
                    index: k,
                    seed: gen.seed,
                    p: gen.p,
                    algorithm,
                    system: system_to_text(&sys),
                    tested,
                    reference,
                });
            }
        }
    }
    Ok(VerifyReport { checked: cfg.n_systems, counterexamples })
}

/// A system breaking the structural assumption: indicator `M` is a child of
/// `X0`, a parent of `X1`, and governs `X2`. Conditioning on `M` through
/// list-wise deletion separates `X0` and `X1`; a test on `{X0, X1}` alone
/// does not, so the two oracles disagree on that edge.
pub fn negative_control() -> CausalSystem {
    let dag = Dag::from_edges(4, &[(0, 3), (3, 1)]).expect("acyclic");
    let roles = vec![Role::Observed, Role::Observed, Role::Observed, Role::MissingnessIndicator];
    CausalSystem::new(dag, roles, vec![vec![], vec![], vec![3], vec![]]).expect("consistent roles")
}
