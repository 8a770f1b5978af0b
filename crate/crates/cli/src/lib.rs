//! Batch front-end for the `halfspace` crate: dataset generation,
//! certification, warm starts, learning runs and sweeps.

pub mod commands;
pub mod config;
pub mod metrics;
pub mod run;

use halfspace::geometry::GeometryError;
use halfspace::learner::LearnerError;
use halfspace::synthetic::{DatasetError, SyntheticError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Synthetic(#[from] SyntheticError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::InvalidConfig(_)
            | CliError::Dataset(_)
            | CliError::Synthetic(_)
            | CliError::Geometry(_) => exit::USAGE,
            CliError::ContractViolation(_) => exit::CONTRACT,
            CliError::Learner(LearnerError::InvalidConfig(_)) => exit::USAGE,
            _ => exit::RUNTIME,
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const USAGE: i32 = 2;
    /// Honest failure: no certificate (or warm start) was found.
    pub const FAIL: i32 = 3;
    pub const CONTRACT: i32 = 4;
}

/// Environment variable holding the worker count for sweeps.
pub const WORKERS_ENV: &str = "THL_WORKERS";
