//! Dual-primal isogeometric tearing and interconnecting (IETI-DP) solver for
//! the Poisson problem on conforming multi-patch B-spline discretizations.

pub mod assembly;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod ieti;
pub mod krylov;
pub mod linalg;
pub mod spline;
pub mod topology;

pub use error::{Error, Result};
