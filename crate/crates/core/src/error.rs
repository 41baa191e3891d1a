// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

/// Errors raised by the numerical kernels and the experiment plumbing.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("capacity exceeded: dimension {requested} is above the limit {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("index {index} out of range for {what} of size {len}")]
    Index {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("measurement outcome has zero probability")]
    ZeroProbability,

    #[error("resonance detection failed: {0}")]
    Resonance(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("schema version mismatch in {path}: found {found}, expected {expected}")]
    SchemaVersion {
        path: PathBuf,
        found: String,
        expected: u32,
    },

    #[error("malformed result file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
