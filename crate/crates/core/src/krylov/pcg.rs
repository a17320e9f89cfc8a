use std::time::Instant;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::lanczos::filtered_extremes;
use super::KrylovError;
use crate::linalg::{axpy, dot, norm2, LinearOperator};

/// Iterations between recomputations of the true residual `b − A x`.
pub const TRUE_RESIDUAL_PERIOD: usize = 50;

/// Outcome of a PCG run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcgReport {
    pub iterations: usize,
    /// `‖b − A x_j‖ / ‖b‖` for `j = 0..=iterations`
    pub residual_history: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kappa: f64,
    pub converged: bool,
    /// seconds
    pub wall_time: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl PcgReport {
    /// Report of a run that has not iterated yet.
    pub fn new() -> Self {
        Self {
            iterations: 0,
            residual_history: Vec::new(),
            lambda_min: 1.0,
            lambda_max: 1.0,
            kappa: 1.0,
            converged: false,
            wall_time: 0.0,
            alphas: Vec::new(),
            betas: Vec::new(),
        }
    }
}

impl Default for PcgReport {
    fn default() -> Self {
        Self::new()
    }
}

/// Reproducible start vector with entries uniform in `[−1, 1)`.
pub fn random_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SmallRng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn residual(a: &dyn LinearOperator, b: &[f64], x: &[f64]) -> Vec<f64> {
    let ax = a.apply_vec(x);
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}

/// Preconditioned CG for `A x = b` with preconditioner `M ≈ A⁻¹`.
///
/// Stops when the unpreconditioned residual satisfies `‖b − A x‖ ≤ tol ‖b‖`,
/// with `‖b − A x₀‖` in place of `‖b‖` when `b = 0`;
/// exceeding `max_iter` returns a non-converged report. The condition number
/// estimate comes from the Lanczos matrix of the CG coefficients.
pub fn pcg(
    a: &dyn LinearOperator,
    m: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, PcgReport), KrylovError> {
    let start = Instant::now();
    let n = a.dim();
    if b.len() != n || m.dim() != n || x0.is_some_and(|x| x.len() != n) {
        return Err(KrylovError::DimensionMismatch);
    }
    let mut report = PcgReport::new();
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = residual(a, b, &x);
    // for b = 0 the residual is measured against the initial residual
    let b_norm = match norm2(b) {
        0.0 => norm2(&r),
        nb => nb,
    };
    if b_norm == 0.0 {
        report.residual_history.push(0.0);
        report.converged = true;
        report.wall_time = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }
    let mut rel = norm2(&r) / b_norm;
    report.residual_history.push(rel);
    if rel <= tol {
        report.converged = true;
        report.wall_time = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }
    let mut z = m.apply_vec(&r);
    let mut rz = dot(&r, &z);
    if rz < 0.0 {
        return Err(KrylovError::NotPositiveDefinite { iteration: 0 });
    }
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    for it in 1..=max_iter {
        a.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(KrylovError::NotPositiveDefinite { iteration: it });
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        report.alphas.push(alpha);
        report.iterations = it;
        if it % TRUE_RESIDUAL_PERIOD == 0 {
            r = residual(a, b, &x);
        }
        rel = norm2(&r) / b_norm;
        if rel <= tol {
            // confirm against the true residual before stopping
            let rt = residual(a, b, &x);
            let rel_true = norm2(&rt) / b_norm;
            r = rt;
            rel = rel_true;
            if rel_true <= tol {
                report.residual_history.push(rel);
                report.converged = true;
                break;
            }
        }
        report.residual_history.push(rel);
        if it == max_iter {
            break;
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        if rz_new < 0.0 {
            return Err(KrylovError::NotPositiveDefinite { iteration: it });
        }
        let beta = rz_new / rz;
        report.betas.push(beta);
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    if !report.alphas.is_empty() {
        let (lo, hi) = filtered_extremes(&report.alphas, &report.betas)?;
        report.lambda_min = lo;
        report.lambda_max = hi;
        report.kappa = (hi / lo).max(1.0);
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}
