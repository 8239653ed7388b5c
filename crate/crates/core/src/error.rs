use thiserror::Error;

use crate::kernels::ParseError;

/// Errors raised by the library. Divergent integrals are not errors: they
/// come back as non-converged [`QuadResult`](crate::quad::QuadResult)s.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integrand returned non-finite value {value} at {at}")]
    Evaluation { at: f64, value: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("sphere measure is not available for this group")]
    MissingSphereMeasure,
    #[error("integral diverges (partial value {partial})")]
    Divergence { partial: f64 },
    #[error("inner integral diverges for s in [{lo}, {hi}]")]
    InnerDivergence { lo: f64, hi: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
