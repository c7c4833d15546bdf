//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("empty intersection: computed radius {0} is not positive")]
    EmptyIntersection(f64),

    #[error("degenerate simplex ball: radius {0} is not positive")]
    DegenerateBall(f64),

    #[error("invalid lower bound: B0 = {b0} exceeds f(x0) = {f0}")]
    InvalidBound { b0: f64, f0: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
