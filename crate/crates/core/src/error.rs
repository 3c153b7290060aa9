//! Error type shared by every solver and check in the crate.

use thiserror::Error;

/// Errors produced by grid construction, solvers, and scenario plumbing.
#[derive(Debug, Error)]
pub enum PolarError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid constant: {0}")]
    InvalidConstant(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver diverged at step {step}: {detail}")]
    SolverDiverged { step: usize, detail: String },

    #[error("unsupported system: {0}")]
    UnsupportedSystem(String),

    #[error("domain exit at x = {x}: {detail}")]
    DomainExit { x: f64, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PolarError>;
