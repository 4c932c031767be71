// SPDX-License-Identifier: MIT
use std::path::PathBuf;

use mnarfci_core::synth::{GenConfig, Mechanism};
use mnarfci_core::{Mode, Strategy};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{BenchError, Result};

/// Missingness injected into generated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Missingness {
    Mnar,
    Mar,
    Mcar,
    None,
}

impl Missingness {
    pub fn mechanism(self) -> Option<Mechanism> {
        match self {
            Missingness::Mnar => Some(Mechanism::Mnar),
            Missingness::Mar => Some(Mechanism::Mar),
            Missingness::Mcar => Some(Mechanism::Mcar),
            Missingness::None => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Missingness::Mnar => "mnar",
            Missingness::Mar => "mar",
            Missingness::Mcar => "mcar",
            Missingness::None => "none",
        }
    }
}

/// Generation and search settings of one experiment. Loadable from JSON;
/// absent fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: usize,
    pub expected_neighbors: f64,
    pub latent_confounders: [usize; 2],
    pub missingness_drivers: [usize; 2],
    pub vars_per_driver: [usize; 2],
    pub r_range: [f64; 2],
    pub seed: u64,
    pub sample_sizes: Vec<usize>,
    pub n_replicates: usize,
    pub missingness: Missingness,
    pub algorithms: Vec<Mode>,
    pub strategies: Vec<Strategy>,
    pub alpha: f64,
    pub max_cond_size: Option<usize>,
    /// Enables the selection-bias orientation rules.
    pub selection_rules: bool,
    /// Write one ground-truth manifest per replicate.
    pub emit_truth: bool,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let g = GenConfig::default();
        ExperimentConfig {
            p: g.p,
            expected_neighbors: g.expected_neighbors,
            latent_confounders: [*g.n_latent_confounders.start(), *g.n_latent_confounders.end()],
            missingness_drivers: [*g.n_missingness_drivers.start(), *g.n_missingness_drivers.end()],
            vars_per_driver: [*g.vars_per_driver.start(), *g.vars_per_driver.end()],
            r_range: [*g.r_range.start(), *g.r_range.end()],
            seed: 0,
            sample_sizes: vec![100, 500],
            n_replicates: 50,
            missingness: Missingness::Mnar,
            algorithms: vec![Mode::Fci, Mode::Rfci],
            strategies: vec![Strategy::TestWise, Strategy::ListWise, Strategy::Wrapper, Strategy::Heuristic],
            alpha: 0.01,
            max_cond_size: None,
            selection_rules: false,
            emit_truth: true,
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Generator settings for one replicate.
    pub fn gen_config(&self, seed: u64) -> GenConfig {
        GenConfig {
            p: self.p,
            expected_neighbors: self.expected_neighbors,
            n_latent_confounders: self.latent_confounders[0]..=self.latent_confounders[1],
            n_missingness_drivers: self.missingness_drivers[0]..=self.missingness_drivers[1],
            vars_per_driver: self.vars_per_driver[0]..=self.vars_per_driver[1],
            r_range: self.r_range[0]..=self.r_range[1],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.sample_sizes.is_empty() {
            return bad("sample_sizes is empty".into());
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return bad(format!("sample size {n} is below 2"));
        }
        if self.algorithms.is_empty() || self.strategies.is_empty() {
            return bad("algorithms and strategies must be nonempty".into());
        }
        let g = self.gen_config(self.seed);
        match self.missingness.mechanism() {
            Some(m) => g.validate_for(m)?,
            None => g.validate()?,
        }
        Ok(())
    }

    /// Hex SHA-256 over the canonical JSON of every field that affects the
    /// results (all but `output_dir` and `emit_truth`).
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        canonical.emit_truth = false;
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}
