use thiserror::Error;

use crate::grid::Segment;

/// Errors raised anywhere in the reconstruction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("normal derivative is not defined on Neumann segment {0:?}")]
    UnsupportedSegment(Segment),

    #[error("coefficient must be strictly positive, found {value} at node {node}")]
    CoefficientBound { node: usize, value: f64 },

    #[error("linear solver hit the iteration limit ({iterations}) with residual {residual:e}")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("phantom error: {0}")]
    Phantom(String),

    #[error("iteration aborted at step {step}: {reason}")]
    Aborted { step: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
