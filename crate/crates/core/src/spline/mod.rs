//! Univariate B-spline bases on open knot vectors and their tensor products.

mod knots;
mod tensor;

use thiserror::Error;

pub use knots::{KnotVector, MAX_DEGREE};
pub use tensor::{TensorBasis, TensorEval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("parameter {0} outside [0, 1]")]
    OutOfDomain(f64),
    #[error("unsupported spline degree {0}")]
    InvalidDegree(usize),
    #[error("number of intervals must be positive, got {0}")]
    InvalidIntervals(usize),
    #[error("invalid knot vector at knot {index}: {reason}")]
    InvalidKnots { index: usize, reason: String },
    #[error("unsupported parametric dimension {0}")]
    InvalidDimension(usize),
}
