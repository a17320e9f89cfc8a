use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, RunRecord};
use crate::error::Result;
use crate::ieti::PrimalChoice;

/// Outcomes of a sweep in configuration order; failures keep their message.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub configs: Vec<ExperimentConfig>,
    pub outcomes: Vec<std::result::Result<RunRecord, String>>,
}

impl Sweep {
    pub fn new(configs: &[ExperimentConfig], outcomes: Vec<std::result::Result<RunRecord, String>>) -> Self {
        assert_eq!(configs.len(), outcomes.len(), "one outcome per configuration");
        Self {
            configs: configs.to_vec(),
            outcomes,
        }
    }

    pub fn records(&self) -> impl Iterator<Item = &RunRecord> {
        self.outcomes.iter().filter_map(|o| o.as_ref().ok())
    }

    /// True if every run finished and converged.
    pub fn all_converged(&self) -> bool {
        self.outcomes.iter().all(|o| o.as_ref().is_ok_and(|r| r.converged))
    }

    pub fn table(&self) -> Table {
        let rows = self
            .configs
            .iter()
            .zip(&self.outcomes)
            .map(|(c, o)| match o {
                Ok(rec) => TableRow::from_record(rec),
                Err(msg) => TableRow {
                    geometry: c.geometry.to_string(),
                    primal: c.primal,
                    r: c.refine,
                    p: c.degree,
                    it: None,
                    converged: None,
                    kappa: None,
                    dofs: None,
                    t_setup: None,
                    t_solve: None,
                    status: format!("failed: {msg}"),
                },
            })
            .collect();
        Table { rows }
    }
}

/// One table line; the numeric fields are empty for failed runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub geometry: String,
    pub primal: PrimalChoice,
    pub r: usize,
    pub p: usize,
    pub it: Option<usize>,
    pub converged: Option<bool>,
    pub kappa: Option<f64>,
    pub dofs: Option<usize>,
    pub t_setup: Option<f64>,
    pub t_solve: Option<f64>,
    /// `ok`, `not converged` or `failed: <reason>`
    pub status: String,
}

impl TableRow {
    pub fn from_record(rec: &RunRecord) -> Self {
        Self {
            geometry: rec.config.geometry.to_string(),
            primal: rec.config.primal,
            r: rec.config.refine,
            p: rec.config.degree,
            it: Some(rec.iterations),
            converged: Some(rec.converged),
            kappa: Some(rec.kappa),
            dofs: Some(rec.n_dofs),
            t_setup: Some(rec.setup_time),
            t_solve: Some(rec.solve_time),
            status: if rec.converged { "ok" } else { "not converged" }.to_string(),
        }
    }
}

#[derive(Serialize)]
struct PlotPoint {
    geometry: String,
    primal: PrimalChoice,
    p: usize,
    r: usize,
    dofs: usize,
    it: usize,
    kappa: f64,
    t_solve: f64,
}

/// Sweep results in table form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<_, _>>()?;
        Ok(Self { rows })
    }

    /// One block per geometry and primal choice with columns r, p, it, κ, dofs,
    /// t_setup, t_solve. Non-converged runs show `>it`, failed runs `failed`.
    pub fn to_markdown(&self) -> String {
        let mut keys: Vec<(String, PrimalChoice)> = Vec::new();
        for row in &self.rows {
            let key = (row.geometry.clone(), row.primal);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let mut out = String::new();
        for (geometry, primal) in keys {
            let _ = writeln!(out, "### {geometry}, primal {primal}\n");
            out.push_str("| r | p | it | κ | dofs | t_setup [s] | t_solve [s] |\n");
            out.push_str("|---:|---:|---:|---:|---:|---:|---:|\n");
            for row in self.rows.iter().filter(|r| r.geometry == geometry && r.primal == primal) {
                let cell = |v: Option<String>| v.unwrap_or_else(|| "-".to_string());
                let it = match (row.it, row.converged) {
                    (Some(it), Some(true)) => it.to_string(),
                    (Some(it), _) => format!(">{it}"),
                    _ => "failed".to_string(),
                };
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    row.r,
                    row.p,
                    it,
                    cell(row.kappa.map(|k| format!("{k:.2}"))),
                    cell(row.dofs.map(|d| d.to_string())),
                    cell(row.t_setup.map(|t| format!("{t:.3}"))),
                    cell(row.t_solve.map(|t| format!("{t:.3}"))),
                );
            }
            out.push('\n');
        }
        out
    }

    /// Long-format series (κ and solve time over p and r per primal choice)
    /// for plotting; failed runs are left out.
    pub fn plot_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            if let (Some(dofs), Some(it), Some(kappa), Some(t_solve)) = (row.dofs, row.it, row.kappa, row.t_solve) {
                w.serialize(PlotPoint {
                    geometry: row.geometry.clone(),
                    primal: row.primal,
                    p: row.p,
                    r: row.r,
                    dofs,
                    it,
                    kappa,
                    t_solve,
                })?;
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
