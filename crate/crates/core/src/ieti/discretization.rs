use rayon::prelude::*;

use super::IetiError;
use crate::assembly::{stiffness_quad_points, PatchSystem, Source};
use crate::geometry::MultiPatch;
use crate::linalg::{factorize, FactorKind, Factorization, SparseMatrix};
use crate::spline::TensorBasis;
use crate::topology::{build_topology, classify_dofs, DofClassification, Topology, MATCH_TOL};

/// Interface Schur complement data of one patch, in free-dof numbering.
#[derive(Clone, Debug)]
pub struct LocalSchur {
    gamma: Vec<usize>,
    interior: Vec<usize>,
    /// free index → position in `gamma`
    gamma_pos: Vec<Option<usize>>,
    a_ii: Option<Factorization>,
    a_gg: SparseMatrix,
    a_gi: SparseMatrix,
}

impl LocalSchur {
    fn new(a: &SparseMatrix, gamma: Vec<usize>, interior: Vec<usize>) -> Result<Self, IetiError> {
        let mut gamma_pos = vec![None; a.nrows()];
        for (p, &i) in gamma.iter().enumerate() {
            gamma_pos[i] = Some(p);
        }
        let a_ii = if interior.is_empty() {
            None
        } else {
            Some(factorize(&a.submatrix(&interior, &interior), FactorKind::Spd)?)
        };
        Ok(Self {
            a_gg: a.submatrix(&gamma, &gamma),
            a_gi: a.submatrix(&gamma, &interior),
            gamma,
            interior,
            gamma_pos,
            a_ii,
        })
    }

    /// Free indices of the interface dofs.
    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    /// Free indices of the interior dofs.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn gamma_position(&self, free: usize) -> Option<usize> {
        self.gamma_pos[free]
    }

    /// `S v = (A_ΓΓ − A_ΓI A_II⁻¹ A_IΓ) v` for `v` on the interface dofs.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.a_gg.matvec(v).expect("interface vector length");
        if let Some(f) = &self.a_ii {
            let mut t = self.a_gi.transpose_matvec(v).expect("interface vector length");
            f.solve_in_place(&mut t).expect("interior vector length");
            let c = self.a_gi.matvec(&t).expect("interior vector length");
            out.iter_mut().zip(&c).for_each(|(o, ci)| *o -= ci);
        }
        out
    }
}

/// Everything that does not depend on the primal choice: geometry, topology,
/// bases, assembled patch systems and the interface Schur data.
#[derive(Debug)]
pub struct Discretization {
    multipatch: MultiPatch,
    degree: usize,
    refine: usize,
    topology: Topology,
    bases: Vec<TensorBasis>,
    classification: DofClassification,
    systems: Vec<PatchSystem>,
    schur: Vec<LocalSchur>,
}

impl Discretization {
    /// Degree-`degree` splines with `2^refine` uniform intervals per direction on every patch.
    pub fn new(
        multipatch: MultiPatch,
        degree: usize,
        refine: usize,
        source: Source<'_>,
    ) -> Result<Self, IetiError> {
        let d = multipatch.dim();
        let n_int = 1usize << refine;
        let basis = TensorBasis::uniform(d, degree, n_int)?;
        let bases = vec![basis; multipatch.len()];
        Self::with_bases(multipatch, bases, source, degree, refine)
    }

    /// Uses the given per-patch bases; `degree` and `refine` are labels only.
    pub fn with_bases(
        multipatch: MultiPatch,
        bases: Vec<TensorBasis>,
        source: Source<'_>,
        degree: usize,
        refine: usize,
    ) -> Result<Self, IetiError> {
        let topology = build_topology(&multipatch, MATCH_TOL)?;
        let classification = classify_dofs(&multipatch, &bases, &topology)?;
        let parts: Vec<(PatchSystem, LocalSchur)> = (0..multipatch.len())
            .into_par_iter()
            .map(|k| {
                let basis = &bases[k];
                let nq = stiffness_quad_points(basis.degrees().into_iter().max().unwrap_or(1));
                let dofs = classification.patch(k);
                let sys =
                    PatchSystem::assemble(multipatch.patch(k), basis, nq, &dofs.eliminated, Some(source))?;
                let to_free = |t: &[usize]| -> Vec<usize> {
                    t.iter()
                        .map(|&i| sys.local_index(i).expect("classified dofs are free"))
                        .collect()
                };
                let schur = LocalSchur::new(&sys.stiffness, to_free(&dofs.gamma), to_free(&dofs.interior))?;
                Ok((sys, schur))
            })
            .collect::<Result<_, IetiError>>()?;
        let (systems, schur) = parts.into_iter().unzip();
        Ok(Self {
            multipatch,
            degree,
            refine,
            topology,
            bases,
            classification,
            systems,
            schur,
        })
    }

    pub fn multipatch(&self) -> &MultiPatch {
        &self.multipatch
    }

    pub fn dim(&self) -> usize {
        self.multipatch.dim()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn refine(&self) -> usize {
        self.refine
    }

    pub fn n_patches(&self) -> usize {
        self.multipatch.len()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn bases(&self) -> &[TensorBasis] {
        &self.bases
    }

    pub fn classification(&self) -> &DofClassification {
        &self.classification
    }

    pub fn system(&self, k: usize) -> &PatchSystem {
        &self.systems[k]
    }

    pub fn systems(&self) -> &[PatchSystem] {
        &self.systems
    }

    pub fn schur(&self, k: usize) -> &LocalSchur {
        &self.schur[k]
    }

    /// Dimension of the conforming global space.
    pub fn n_dofs(&self) -> usize {
        self.classification.n_global()
    }

    /// Sum of the free patch-local dof counts.
    pub fn n_local_dofs(&self) -> usize {
        self.systems.iter().map(PatchSystem::n_free).sum()
    }
}
