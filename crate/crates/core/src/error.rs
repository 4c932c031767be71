// SPDX-License-Identifier: MIT
use alloc::string::String;

/// Errors raised by graph construction, queries and generation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("graphs differ in size ({0} vs {1} vertices)")]
    SizeMismatch(usize, usize),
    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
