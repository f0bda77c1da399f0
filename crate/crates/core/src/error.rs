//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by chain loading, solving and benchmarking.
#[derive(Debug, Error)]
pub enum IkError {
    /// A chain or scene file could not be parsed.
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },

    /// A chain violated a structural invariant; names the offending joint.
    #[error("validation error at joint `{joint}`: {detail}")]
    Validation { joint: String, detail: String },

    /// A joint vector had the wrong length for the chain.
    #[error("dimension mismatch: expected {expected} joint values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A solver or sampling configuration failed its invariants.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A solver name not present in the registry was requested.
    #[error("unknown solver `{name}`; registered: {available}")]
    UnknownSolver { name: String, available: String },

    /// A grasp target outside the sampling region was requested.
    #[error("target ({x:.3}, {y:.3}) lies outside the workspace region")]
    OutOfRegion { x: f64, y: f64 },

    /// The sampling attempt ceiling was hit without a single acceptance.
    #[error("region unreachable: {attempts} attempts, zero acceptances")]
    RegionUnreachable { attempts: usize },

    /// A dataset row failed re-verification on load.
    #[error("corrupt dataset {path}: {detail}")]
    CorruptDataset { path: String, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, IkError>;
