//! Sparse storage, envelope factorizations and matrix-free operators.

mod factor;
mod operator;
mod ordering;
mod sparse;

use thiserror::Error;

pub use factor::{
    factorize, factorize_with, FactorKind, Factorization, SINGULAR_PIVOT_TOL, STATIC_PIVOT_TOL,
};
pub use operator::{DiagonalOperator, IdentityOperator, LinearOperator};
pub use ordering::{envelope_size, reverse_cuthill_mckee, Ordering};
pub use sparse::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("singular matrix: pivot {pivot:e} at elimination stage {stage}")]
    Singular { stage: usize, pivot: f64 },
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },
    #[error("entry ({row}, {col}) outside a {nrows}x{ncols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("malformed compressed storage")]
    MalformedStorage,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}
