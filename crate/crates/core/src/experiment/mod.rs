//! Experiment driver: runs the full pipeline for one configuration and
//! collects sweeps into tables.

mod config;
mod record;
mod table;

use std::time::Instant;

use log::{debug, info};

use crate::assembly::{l2_error_squared, sine_solution, sine_source};
use crate::error::{Error, Result};
use crate::ieti::{Discretization, IetiSystem};
use crate::krylov::{pcg, random_start, PcgReport};

pub use config::{ExperimentConfig, GeometrySpec};
pub use record::RunRecord;
pub use table::{Sweep, Table, TableRow};

/// Geometry, topology, assembly, IETI-DP setup, PCG and recovery for one configuration.
///
/// The source is `f = d π² Π sin(π x_i)`. A non-converged PCG run is not an
/// error; it is reported through [`RunRecord::converged`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    info!(
        "{}: p = {}, r = {}, primal {}",
        config.geometry, config.degree, config.refine, config.primal
    );
    let start = Instant::now();
    let mp = config.geometry.build()?;
    config.primal.validate(mp.dim())?;
    let disc = Discretization::new(mp, config.degree, config.refine, &sine_source)?;
    let sys = IetiSystem::new(&disc, config.primal, config.edge_average)?;
    let g = sys.rhs();
    let setup_time = start.elapsed().as_secs_f64();
    debug!(
        "setup {setup_time:.3} s: {} patches, {} dofs, {} multipliers, {} primal",
        disc.n_patches(),
        disc.n_dofs(),
        sys.n_lambda(),
        sys.n_primal()
    );

    let start = Instant::now();
    let (lambda, report) = if sys.dual_is_trivial() {
        debug!("primal constraints remove every jump; skipping PCG");
        let mut report = PcgReport::new();
        report.residual_history.push(0.0);
        report.converged = true;
        (vec![0.0; sys.n_lambda()], report)
    } else {
        let x0 = config.random_start.then(|| random_start(sys.n_lambda(), config.seed));
        pcg(
            &sys.f_operator(),
            &sys.preconditioner(),
            &g,
            x0.as_deref(),
            config.tol,
            config.max_iter,
        )?
    };
    let u = sys.recover(&lambda);
    let solve_time = start.elapsed().as_secs_f64();
    info!(
        "{} iterations, kappa {:.4}, converged {}",
        report.iterations, report.kappa, report.converged
    );

    let u_max = u.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let jump_residual = match u_max {
        0.0 => 0.0,
        m => sys.jump_residual(&u) / m,
    };
    let l2_error = if config.geometry.has_exact_solution() {
        let n_quad = config.degree + 3;
        let mut sum = 0.0;
        for (k, uk) in u.iter().enumerate() {
            let patch = disc.multipatch().patch(k);
            let coefs = disc.system(k).expand(uk);
            sum += l2_error_squared(patch, &disc.bases()[k], &coefs, &sine_solution, n_quad)?;
        }
        Some(sum.sqrt())
    } else {
        None
    };
    Ok(RunRecord {
        config: config.clone(),
        n_patches: disc.n_patches(),
        n_dofs: disc.n_dofs(),
        n_local_dofs: disc.n_local_dofs(),
        n_lambda: sys.n_lambda(),
        n_primal: sys.n_primal(),
        iterations: report.iterations,
        converged: report.converged,
        kappa: report.kappa,
        lambda_min: report.lambda_min,
        lambda_max: report.lambda_max,
        relative_residual: report.residual_history.last().copied().unwrap_or(0.0),
        jump_residual,
        l2_error,
        setup_time,
        solve_time,
    })
}

/// Runs every configuration; failures are recorded per row instead of aborting.
pub fn sweep(configs: &[ExperimentConfig]) -> Result<Sweep> {
    if configs.is_empty() {
        return Err(Error::Config("sweep needs at least one configuration".into()));
    }
    let outcomes = configs
        .iter()
        .map(|c| {
            run_experiment(c).map_err(|e| {
                log::warn!("{} p = {} r = {} {}: {e}", c.geometry, c.degree, c.refine, c.primal);
                e.to_string()
            })
        })
        .collect();
    Ok(Sweep::new(configs, outcomes))
}
