//! Gauss quadrature, patch stiffness matrices and load vectors.

mod quadrature;
mod stiffness;

use std::f64::consts::PI;

pub use quadrature::{gauss_legendre, gauss_rule, GaussRule, QuadRule};
pub use stiffness::{assemble_patch, l2_error_squared, side_dofs_mask, PatchSystem, Source};

/// `u(x) = Π sin(π x_i)`, vanishing on the boundary of the unit hypercube.
pub fn sine_solution(x: &[f64]) -> f64 {
    x.iter().map(|&v| (PI * v).sin()).product()
}

/// `f = −Δu = d π² Π sin(π x_i)` for [`sine_solution`].
pub fn sine_source(x: &[f64]) -> f64 {
    x.len() as f64 * PI * PI * sine_solution(x)
}

/// Gauss points per direction and span used for a degree-`p` stiffness matrix.
pub fn stiffness_quad_points(p: usize) -> usize {
    p + 1
}
