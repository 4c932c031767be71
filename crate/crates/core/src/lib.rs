// SPDX-License-Identifier: MIT
//! Constraint-based causal discovery over data with values missing not at
//! random.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//! endpoint-marked graphs and d-separation ([`graph`], [`dsep`]), causal
//! systems with missingness indicators ([`system`]), linear-Gaussian data
//! generation ([`synth`]), conditional independence testing under
//! test-wise and list-wise deletion ([`citest`]), the FCI and RFCI search
//! engines ([`discovery`]) and graph scoring ([`metrics`]).
//!
//! File formats, the experiment runner and the command-line interface live
//! in the `mnarfci` companion crate.
#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod citest;
pub mod data;
pub mod discovery;
pub mod dsep;
mod error;
pub mod graph;
pub mod metrics;
pub mod subsets;
pub mod synth;
pub mod system;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use citest::{CIDecision, CITester, CiSource, Deletion, SampleSource, Strategy, SystemOracle};
pub use data::Dataset;
pub use discovery::{fci, rfci, search, Mode, Pag, RuleSet, SearchOptions, SepsetMap};
pub use error::{Error, Result};
pub use graph::{Dag, EndpointMark, MixedGraph};
pub use system::{CausalSystem, Role};
