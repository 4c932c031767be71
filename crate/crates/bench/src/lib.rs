// SPDX-License-Identifier: MIT
//! File formats, the replicated experiment runner and soundness checks
//! built on `mnarfci-core`.

pub mod config;
pub mod error;
pub mod experiment;
pub mod format;
pub mod verify;

pub use config::{ExperimentConfig, Missingness};
pub use error::{BenchError, Result};
pub use experiment::{execute, run_experiment, summarize, RunRecord, RunScore, SummaryRow};
pub use verify::{verify_soundness, VerifyConfig, VerifyReport};
