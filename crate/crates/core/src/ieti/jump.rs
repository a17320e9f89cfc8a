use super::{Discretization, PrimalChoice};
use crate::linalg::SparseMatrix;

/// Nonzero of a jump matrix `B^(k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpEntry {
    pub row: usize,
    /// free dof index of the patch
    pub dof: usize,
    pub sign: f64,
}

#[derive(Clone, Debug)]
pub struct JumpMatrices {
    pub n_lambda: usize,
    /// per patch, ordered by row
    pub patches: Vec<Vec<JumpEntry>>,
}

impl JumpMatrices {
    /// `B^(k)` as an `n_λ × n_k` sparse matrix.
    pub fn matrix(&self, k: usize, n_free: usize) -> SparseMatrix {
        SparseMatrix::from_triplets(
            self.n_lambda,
            n_free,
            self.patches[k].iter().map(|e| (e.row, e.dof, e.sign)),
        )
        .expect("jump entries are in range")
    }

    /// `y += B^(k) u`
    pub fn apply_add(&self, k: usize, u: &[f64], y: &mut [f64]) {
        for e in &self.patches[k] {
            y[e.row] += e.sign * u[e.dof];
        }
    }

    /// `B^(k)ᵀ λ` on the free dofs of patch `k`.
    pub fn apply_transpose(&self, k: usize, lambda: &[f64], n_free: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_free];
        for e in &self.patches[k] {
            out[e.dof] += e.sign * lambda[e.row];
        }
        out
    }
}

/// Fully redundant jump matrices: one row per pair of patches sharing a free dof.
///
/// The first patch of a pair (in patch order) gets `+1`, the second `−1`.
/// Corner dofs get no rows if vertices are primal.
pub fn build_jump_matrices(disc: &Discretization, choice: PrimalChoice) -> JumpMatrices {
    let cls = disc.classification();
    let d = disc.dim();
    let mut patches = vec![Vec::new(); disc.n_patches()];
    let mut row = 0;
    for class in cls.classes() {
        if class.dirichlet || class.multiplicity() < 2 {
            continue;
        }
        let (k0, t0) = class.members[0];
        if choice.vertices && cls.patch(k0).entity[t0].codim(d) == d {
            continue;
        }
        let m = &class.members;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                for (&(k, t), sign) in [(&m[i], 1.0), (&m[j], -1.0)] {
                    let dof = disc.system(k).local_index(t).expect("non-Dirichlet dofs are free");
                    patches[k].push(JumpEntry { row, dof, sign });
                }
                row += 1;
            }
        }
    }
    JumpMatrices {
        n_lambda: row,
        patches,
    }
}
