use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fichera, load_multipatch, split_patches, unit_hypercube, MultiPatch};
use crate::ieti::{EdgeAverageSupport, PrimalChoice};

/// Domain of an experiment: a builtin geometry or a multipatch JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeometrySpec {
    /// unit square split into `splits[0] × splits[1]` patches
    Square { splits: Vec<usize> },
    /// unit cube split into `splits[0] × splits[1] × splits[2]` patches
    Cube { splits: Vec<usize> },
    /// seven-patch Fichera corner, each patch split into `subdivide³` patches
    Fichera { twist: f64, subdivide: usize },
    File { path: PathBuf },
}

impl GeometrySpec {
    pub fn validate(&self) -> Result<()> {
        let check_splits = |splits: &[usize], d: usize| {
            if splits.len() != d || splits.contains(&0) {
                return Err(Error::Config(format!(
                    "splits must be {d} positive integers, got {splits:?}"
                )));
            }
            Ok(())
        };
        match self {
            GeometrySpec::Square { splits } => check_splits(splits, 2),
            GeometrySpec::Cube { splits } => check_splits(splits, 3),
            GeometrySpec::Fichera { twist, subdivide } => {
                if !twist.is_finite() {
                    return Err(Error::Config(format!("twist must be finite, got {twist}")));
                }
                if *subdivide == 0 {
                    return Err(Error::Config("subdivide must be at least 1".into()));
                }
                Ok(())
            }
            GeometrySpec::File { .. } => Ok(()),
        }
    }

    pub fn build(&self) -> Result<MultiPatch> {
        self.validate()?;
        let mp = match self {
            GeometrySpec::Square { splits } => unit_hypercube(2, splits),
            GeometrySpec::Cube { splits } => unit_hypercube(3, splits),
            GeometrySpec::Fichera { twist, subdivide } => {
                let base = fichera(*twist);
                base.check_regular()?;
                split_patches(&base, *subdivide)?
            }
            GeometrySpec::File { path } => load_multipatch(path)?,
        };
        Ok(mp)
    }

    /// Whether the manufactured sine solution is exact on this domain.
    pub fn has_exact_solution(&self) -> bool {
        matches!(self, GeometrySpec::Square { .. } | GeometrySpec::Cube { .. })
    }
}

impl fmt::Display for GeometrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join("x");
        match self {
            GeometrySpec::Square { splits } => write!(f, "square {}", join(splits)),
            GeometrySpec::Cube { splits } => write!(f, "cube {}", join(splits)),
            GeometrySpec::Fichera { twist, subdivide } => write!(f, "fichera twist {twist} m {subdivide}"),
            GeometrySpec::File { path } => write!(f, "{}", path.display()),
        }
    }
}

/// One solver run: domain, discretization, primal space and PCG settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub geometry: GeometrySpec,
    pub degree: usize,
    /// `2^refine` uniform intervals per direction on every patch
    pub refine: usize,
    pub primal: PrimalChoice,
    pub edge_average: EdgeAverageSupport,
    /// relative residual reduction of PCG
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// start PCG from a seeded random vector instead of zero
    pub random_start: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: GeometrySpec::Cube { splits: vec![2, 2, 2] },
            degree: 2,
            refine: 1,
            primal: PrimalChoice::E,
            edge_average: EdgeAverageSupport::Auto,
            tol: 1e-6,
            max_iter: 1000,
            seed: 0,
            random_start: true,
        }
    }
}

impl ExperimentConfig {
    /// Checks everything that does not need the geometry to be built.
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.degree == 0 {
            return Err(Error::Config("degree must be at least 1".into()));
        }
        if self.refine > 20 {
            return Err(Error::Config(format!("refine {} is out of range", self.refine)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max-iter must be at least 1".into()));
        }
        let dim = match self.geometry {
            GeometrySpec::Square { .. } => Some(2),
            GeometrySpec::Cube { .. } | GeometrySpec::Fichera { .. } => Some(3),
            GeometrySpec::File { .. } => None,
        };
        if let Some(d) = dim {
            self.primal.validate(d)?;
        }
        Ok(())
    }
}
