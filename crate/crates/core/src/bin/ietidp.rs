use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ietidp::experiment::{run_experiment, sweep, ExperimentConfig, GeometrySpec, Sweep};
use ietidp::ieti::{EdgeAverageSupport, PrimalChoice};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Geometry {
    Square,
    Cube,
    Fichera,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EndpointMode {
    Auto,
    Yes,
    No,
}

/// IETI-DP solver for the Poisson problem on multi-patch B-spline domains.
///
/// Solves -Δu = d π² Π sin(π x_i) with homogeneous Dirichlet conditions.
/// Comma-separated lists for --degree, --refine and --primal run a sweep over
/// all combinations. Exit code 0 if every run converged, 2 if some run did not
/// converge, 1 on errors.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// builtin domain
    #[arg(long, value_enum, default_value = "cube")]
    geometry: Geometry,
    /// multipatch JSON file used instead of the builtin domain
    #[arg(long, value_name = "PATH")]
    geometry_file: Option<PathBuf>,
    /// patches per direction for square and cube [default: 2 per direction]
    #[arg(long, value_delimiter = ',', value_name = "A,B[,C]")]
    splits: Option<Vec<usize>>,
    /// twist angle of the Fichera corner in radians
    #[arg(long, default_value_t = 0.3, value_name = "RAD", allow_negative_numbers = true)]
    twist: f64,
    /// uniform splitting of every Fichera patch into M^3 patches
    #[arg(long, default_value_t = 1, value_name = "M")]
    subdivide: usize,
    /// spline degree
    #[arg(long, value_delimiter = ',', default_value = "2", value_name = "P")]
    degree: Vec<usize>,
    /// refinement level: 2^R intervals per direction and patch
    #[arg(long, value_delimiter = ',', default_value = "1", value_name = "R")]
    refine: Vec<usize>,
    /// primal constraints: V, E, F, VE, VF, EF, VEF or none
    #[arg(long, value_delimiter = ',', default_value = "E", value_parser = parse_primal)]
    primal: Vec<PrimalChoice>,
    /// whether edge averages include the edge endpoints
    /// (auto: only when vertices are not primal)
    #[arg(long, value_enum, default_value = "auto")]
    edge_average_includes_endpoints: EndpointMode,
    /// relative residual reduction of PCG
    #[arg(long, default_value_t = 1e-6, value_name = "T")]
    tol: f64,
    #[arg(long, default_value_t = 1000, value_name = "N")]
    max_iter: usize,
    /// seed of the random PCG start vector
    #[arg(long, default_value_t = 0, value_name = "S")]
    seed: u64,
    /// start PCG from zero instead of a random vector
    #[arg(long)]
    zero_start: bool,
    /// JSON run record (an array for sweeps)
    #[arg(long, value_name = "PATH.json")]
    out: Option<PathBuf>,
    /// CSV table
    #[arg(long, value_name = "PATH.csv")]
    table: Option<PathBuf>,
    /// Markdown table
    #[arg(long, value_name = "PATH.md")]
    markdown: Option<PathBuf>,
    /// plot-ready CSV series
    #[arg(long, value_name = "PATH.csv")]
    plot: Option<PathBuf>,
    /// worker threads [default: all cores]
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

fn parse_primal(s: &str) -> Result<PrimalChoice, String> {
    s.parse().map_err(|e: ietidp::ieti::IetiError| e.to_string())
}

impl Cli {
    fn geometry(&self) -> GeometrySpec {
        if let Some(path) = &self.geometry_file {
            return GeometrySpec::File { path: path.clone() };
        }
        match self.geometry {
            Geometry::Square => GeometrySpec::Square {
                splits: self.splits.clone().unwrap_or_else(|| vec![2, 2]),
            },
            Geometry::Cube => GeometrySpec::Cube {
                splits: self.splits.clone().unwrap_or_else(|| vec![2, 2, 2]),
            },
            Geometry::Fichera => GeometrySpec::Fichera {
                twist: self.twist,
                subdivide: self.subdivide,
            },
        }
    }

    fn configs(&self) -> Vec<ExperimentConfig> {
        let edge_average = match self.edge_average_includes_endpoints {
            EndpointMode::Auto => EdgeAverageSupport::Auto,
            EndpointMode::Yes => EdgeAverageSupport::Yes,
            EndpointMode::No => EdgeAverageSupport::No,
        };
        let mut out = Vec::new();
        for &primal in &self.primal {
            for &refine in &self.refine {
                for &degree in &self.degree {
                    out.push(ExperimentConfig {
                        geometry: self.geometry(),
                        degree,
                        refine,
                        primal,
                        edge_average,
                        tol: self.tol,
                        max_iter: self.max_iter,
                        seed: self.seed,
                        random_start: !self.zero_start,
                    });
                }
            }
        }
        out
    }
}

fn write_outputs(cli: &Cli, result: &Sweep) -> ietidp::Result<()> {
    let table = result.table();
    if let Some(path) = &cli.out {
        let records: Vec<_> = result.records().collect();
        let json = match records.as_slice() {
            [one] if result.outcomes.len() == 1 => serde_json::to_string_pretty(one)?,
            _ => serde_json::to_string_pretty(&records)?,
        };
        fs::write(path, json)?;
    }
    if let Some(path) = &cli.table {
        fs::write(path, table.to_csv()?)?;
    }
    if let Some(path) = &cli.markdown {
        fs::write(path, table.to_markdown())?;
    }
    if let Some(path) = &cli.plot {
        fs::write(path, table.plot_csv()?)?;
    }
    print!("{}", table.to_markdown());
    for rec in result.records() {
        let c = &rec.config;
        let check = match rec.l2_error {
            Some(e) => format!("L2 error {e:.3e}"),
            None => format!(
                "relative residual {:.3e}, jump residual {:.3e}",
                rec.relative_residual, rec.jump_residual
            ),
        };
        println!(
            "p={} r={} {}: {} dofs, {} multipliers, {} primal, {check}",
            c.degree, c.refine, c.primal, rec.n_dofs, rec.n_lambda, rec.n_primal
        );
    }
    Ok(())
}

fn run(cli: &Cli) -> ietidp::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ietidp::Error::Config(format!("threads: {e}")))?;
    }
    let configs = cli.configs();
    for c in &configs {
        c.validate()?;
    }
    let result = if let [single] = configs.as_slice() {
        let rec = run_experiment(single)?;
        Sweep::new(&configs, vec![Ok(rec)])
    } else {
        sweep(&configs)?
    };
    write_outputs(cli, &result)?;
    Ok(result.all_converged())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("PCG did not converge within {} iterations", cli.max_iter);
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
