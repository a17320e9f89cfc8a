//! Tensor B-spline geometry maps, multi-patch containers and built-in domains.

mod builders;
mod io;
mod patch;
mod split;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::spline::SplineError;

pub use builders::{fichera, identity_patch, unit_hypercube};
pub use io::{load_multipatch, read_multipatch, save_multipatch, write_multipatch};
pub use patch::{det_and_inverse, GeometryEval, Patch, Side, DEGENERATE_DET_TOL};
pub use split::{restrict_knots, split_patches};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate geometry: patch {patch} has det J = {det:e} at xi = {xi:?}")]
    Degenerate { patch: usize, xi: Vec<f64>, det: f64 },
    #[error("patch {patch}: {reason}")]
    InvalidPatch { patch: usize, reason: String },
    #[error("invalid multipatch: {0}")]
    InvalidMultiPatch(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(String),
}

/// Patches sharing one parametric dimension, plus the Dirichlet side tags.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPatch {
    dim: usize,
    patches: Vec<Patch>,
    dirichlet: BTreeSet<(usize, Side)>,
}

impl MultiPatch {
    /// `dirichlet` refers to patches by position in `patches`.
    pub fn new(
        patches: Vec<Patch>,
        dirichlet: impl IntoIterator<Item = (usize, Side)>,
    ) -> Result<Self, GeometryError> {
        let dim = patches
            .first()
            .map(Patch::dim)
            .ok_or_else(|| GeometryError::InvalidMultiPatch("no patches".into()))?;
        if let Some(p) = patches.iter().find(|p| p.dim() != dim) {
            return Err(GeometryError::InvalidMultiPatch(format!(
                "patch {} has dimension {}, expected {dim}",
                p.id(),
                p.dim()
            )));
        }
        let ids: BTreeSet<usize> = patches.iter().map(Patch::id).collect();
        if ids.len() != patches.len() {
            return Err(GeometryError::InvalidMultiPatch("patch ids are not unique".into()));
        }
        let dirichlet: BTreeSet<(usize, Side)> = dirichlet.into_iter().collect();
        for &(k, side) in &dirichlet {
            if k >= patches.len() || side.axis >= dim {
                return Err(GeometryError::InvalidMultiPatch(format!(
                    "Dirichlet tag ({k}, {side}) refers to a missing patch or side"
                )));
            }
        }
        Ok(Self {
            dim,
            patches,
            dirichlet,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn patch(&self, k: usize) -> &Patch {
        &self.patches[k]
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn dirichlet(&self) -> &BTreeSet<(usize, Side)> {
        &self.dirichlet
    }

    pub fn is_dirichlet(&self, k: usize, side: Side) -> bool {
        self.dirichlet.contains(&(k, side))
    }

    /// Sum of the patch volumes `Σ_k ∫ |det ∇G_k|`.
    pub fn volume(&self, n: usize) -> Result<f64, GeometryError> {
        self.patches.iter().map(|p| p.volume(n)).sum()
    }

    /// Runs the sampled Jacobian sign check on every patch.
    pub fn check_regular(&self) -> Result<(), GeometryError> {
        self.patches.iter().try_for_each(Patch::check_regular)
    }
}
