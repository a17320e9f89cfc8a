//! Preconditioned conjugate gradients with a Lanczos condition number estimate.

mod lanczos;
mod pcg;

use thiserror::Error;

pub use lanczos::{filtered_extremes, lanczos_extremes, Tridiagonal, RITZ_FILTER};
pub use pcg::{pcg, random_start, PcgReport, TRUE_RESIDUAL_PERIOD};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KrylovError {
    #[error("operator not positive definite (iteration {iteration})")]
    NotPositiveDefinite { iteration: usize },
    #[error("no iterations recorded")]
    NoIterations,
    #[error("dimension mismatch between operator, preconditioner and vectors")]
    DimensionMismatch,
}
