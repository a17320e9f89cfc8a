//! IETI-DP: primal constraints, jump matrices, the dual Schur complement `F`,
//! the scaled Dirichlet preconditioner and solution recovery.

mod choice;
mod constraints;
mod discretization;
mod jump;
mod system;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::linalg::LinalgError;
use crate::spline::SplineError;
use crate::topology::TopologyError;

pub use choice::{EdgeAverageSupport, PrimalChoice};
pub use constraints::{build_primal_constraints, PatchConstraints, PrimalConstraints, PrimalDof};
pub use discretization::{Discretization, LocalSchur};
pub use jump::{build_jump_matrices, JumpEntry, JumpMatrices};
pub use system::{IetiSystem, ScaledDirichlet, SchurOperator, RHS_FLUSH};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IetiError {
    #[error("invalid primal choice: {0}")]
    InvalidChoice(String),
    #[error("floating patch without primal constraints: patch {patch}")]
    FloatingPatch { patch: usize },
    #[error("insufficient constraints on floating patch {patch}: {source}")]
    InsufficientConstraints { patch: usize, source: LinalgError },
    #[error("primal coarse matrix is not positive definite")]
    SingularCoarse,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}
