use serde::{Deserialize, Serialize};

use super::ExperimentConfig;

/// Result of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub n_patches: usize,
    /// dimension of the conforming global space
    pub n_dofs: usize,
    /// free dofs summed over patches
    pub n_local_dofs: usize,
    pub n_lambda: usize,
    pub n_primal: usize,
    pub iterations: usize,
    pub converged: bool,
    pub kappa: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// final `‖g − F λ‖ / ‖g‖` of PCG
    pub relative_residual: f64,
    /// largest coefficient spread over shared dofs relative to `‖u‖∞`
    pub jump_residual: f64,
    /// L2 error against the manufactured solution where it is exact
    pub l2_error: Option<f64>,
    /// seconds for assembly, factorizations and the right-hand side
    pub setup_time: f64,
    /// seconds for PCG and solution recovery
    pub solve_time: f64,
}
