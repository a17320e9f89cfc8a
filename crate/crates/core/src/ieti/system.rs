use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use super::{
    build_jump_matrices, build_primal_constraints, Discretization, EdgeAverageSupport, IetiError,
    JumpMatrices, PatchConstraints, PrimalChoice, PrimalConstraints,
};
use crate::linalg::{factorize_with, FactorKind, Factorization, LinearOperator, Ordering, SparseMatrix};

/// `g` is set to zero when all its entries are below this fraction of the
/// largest partially coupled coefficient. Such a `g` is rounding noise of a
/// problem whose partially coupled solution is already continuous, e.g. by
/// symmetry, and contains components in the kernel of `F`.
pub const RHS_FLUSH: f64 = 1e-9;

/// Patch-local IETI-DP data.
#[derive(Debug)]
struct LocalIeti {
    /// factorization of `[[A, Cᵀ], [C, 0]]`
    saddle: Factorization,
    /// energy-minimizing basis, one column per local constraint row
    psi: Vec<Vec<f64>>,
    /// multiplicity of each interface dof, indexed like the Schur data
    scaling: Vec<f64>,
}

/// The assembled IETI-DP system for one primal choice.
///
/// Borrows the choice-independent [`Discretization`].
#[derive(Debug)]
pub struct IetiSystem<'d> {
    disc: &'d Discretization,
    choice: PrimalChoice,
    support: EdgeAverageSupport,
    constraints: PrimalConstraints,
    jumps: JumpMatrices,
    locals: Vec<LocalIeti>,
    coarse_matrix: DMatrix<f64>,
    coarse: Option<Cholesky<f64, Dyn>>,
}

fn saddle_matrix(a: &SparseMatrix, c: &SparseMatrix) -> SparseMatrix {
    let n = a.nrows();
    let m = c.nrows();
    let triplets = a.triplets().chain(
        c.triplets()
            .flat_map(|(r, j, v)| [(n + r, j, v), (j, n + r, v)]),
    );
    SparseMatrix::from_triplets(n + m, n + m, triplets).expect("saddle indices are in range")
}

impl<'d> IetiSystem<'d> {
    pub fn new(
        disc: &'d Discretization,
        choice: PrimalChoice,
        support: EdgeAverageSupport,
    ) -> Result<Self, IetiError> {
        let constraints = build_primal_constraints(disc, choice, support)?;
        let jumps = build_jump_matrices(disc, choice);
        let cls = disc.classification();
        let locals: Vec<LocalIeti> = (0..disc.n_patches())
            .into_par_iter()
            .map(|k| {
                let sys = disc.system(k);
                let c = &constraints.patches[k].matrix;
                let n = sys.n_free();
                let saddle = factorize_with(
                    &saddle_matrix(&sys.stiffness, c),
                    FactorKind::SymmetricIndefinite,
                    Ordering::Natural,
                )
                .map_err(|source| IetiError::InsufficientConstraints { patch: k, source })?;
                let psi = (0..c.nrows())
                    .map(|j| {
                        let mut rhs = vec![0.0; n + c.nrows()];
                        rhs[n + j] = 1.0;
                        saddle.solve_in_place(&mut rhs)?;
                        rhs.truncate(n);
                        Ok(rhs)
                    })
                    .collect::<Result<Vec<_>, IetiError>>()?;
                let free = sys.free_dofs();
                let scaling = disc
                    .schur(k)
                    .gamma()
                    .iter()
                    .map(|&i| cls.multiplicity(k, free[i]) as f64)
                    .collect();
                Ok(LocalIeti {
                    saddle,
                    psi,
                    scaling,
                })
            })
            .collect::<Result<_, IetiError>>()?;

        let n_pi = constraints.n_primal();
        let blocks: Vec<DMatrix<f64>> = locals
            .par_iter()
            .enumerate()
            .map(|(k, local)| {
                let a = &disc.system(k).stiffness;
                let a_psi: Vec<Vec<f64>> =
                    local.psi.iter().map(|p| a.matvec(p).expect("psi length")).collect();
                let m = local.psi.len();
                DMatrix::from_fn(m, m, |i, j| crate::linalg::dot(&local.psi[i], &a_psi[j]))
            })
            .collect();
        let mut coarse_matrix = DMatrix::zeros(n_pi, n_pi);
        for (k, block) in blocks.iter().enumerate() {
            let idx = &constraints.patches[k].primal_index;
            for (i, &gi) in idx.iter().enumerate() {
                for (j, &gj) in idx.iter().enumerate() {
                    coarse_matrix[(gi, gj)] += block[(i, j)];
                }
            }
        }
        let coarse_matrix = (&coarse_matrix + coarse_matrix.transpose()) * 0.5;
        let coarse = if n_pi == 0 {
            None
        } else {
            Some(Cholesky::new(coarse_matrix.clone()).ok_or(IetiError::SingularCoarse)?)
        };
        Ok(Self {
            disc,
            choice,
            support,
            constraints,
            jumps,
            locals,
            coarse_matrix,
            coarse,
        })
    }

    pub fn discretization(&self) -> &'d Discretization {
        self.disc
    }

    pub fn choice(&self) -> PrimalChoice {
        self.choice
    }

    pub fn edge_support(&self) -> EdgeAverageSupport {
        self.support
    }

    pub fn n_lambda(&self) -> usize {
        self.jumps.n_lambda
    }

    pub fn n_primal(&self) -> usize {
        self.constraints.n_primal()
    }

    pub fn constraints(&self) -> &PrimalConstraints {
        &self.constraints
    }

    pub fn patch_constraints(&self, k: usize) -> &PatchConstraints {
        &self.constraints.patches[k]
    }

    pub fn jumps(&self) -> &JumpMatrices {
        &self.jumps
    }

    /// `B^(k)` as a sparse matrix.
    pub fn jump_matrix(&self, k: usize) -> SparseMatrix {
        self.jumps.matrix(k, self.disc.system(k).n_free())
    }

    /// Columns of `Ψ^(k)`, one per local constraint row.
    pub fn psi(&self, k: usize) -> &[Vec<f64>] {
        &self.locals[k].psi
    }

    /// `D_k` on the interface dofs of patch `k`.
    pub fn scaling(&self, k: usize) -> &[f64] {
        &self.locals[k].scaling
    }

    /// `Ã^(K+1) = Σ Ψᵀ A Ψ`.
    pub fn coarse_matrix(&self) -> &DMatrix<f64> {
        &self.coarse_matrix
    }

    /// Top block of `Ã^(k)⁻¹ (v, 0)`.
    fn solve_local(&self, k: usize, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut rhs = v.to_vec();
        rhs.resize(n + self.locals[k].psi.len(), 0.0);
        self.locals[k]
            .saddle
            .solve_in_place(&mut rhs)
            .expect("local vector length");
        rhs.truncate(n);
        rhs
    }

    /// `Ψ^(k)ᵀ v`
    fn psi_t(&self, k: usize, v: &[f64]) -> Vec<f64> {
        self.locals[k].psi.iter().map(|p| crate::linalg::dot(p, v)).collect()
    }

    fn scatter_primal(&self, parts: &[Vec<f64>]) -> Vec<f64> {
        let mut pi = vec![0.0; self.n_primal()];
        for (k, t) in parts.iter().enumerate() {
            for (&g, &v) in self.constraints.patches[k].primal_index.iter().zip(t) {
                pi[g] += v;
            }
        }
        pi
    }

    fn solve_coarse(&self, pi: Vec<f64>) -> Vec<f64> {
        match &self.coarse {
            Some(ch) => ch.solve(&DVector::from_vec(pi)).as_slice().to_vec(),
            None => pi,
        }
    }

    /// `y += B^(k) Ψ^(k) R_cᵀ z`, evaluated only at the jump dofs.
    fn add_coarse_jump(&self, k: usize, z: &[f64], y: &mut [f64]) {
        let local = &self.locals[k];
        let idx = &self.constraints.patches[k].primal_index;
        if idx.is_empty() {
            return;
        }
        for e in &self.jumps.patches[k] {
            let w: f64 = local.psi.iter().zip(idx).map(|(p, &g)| p[e.dof] * z[g]).sum();
            y[e.row] += e.sign * w;
        }
    }

    /// `F λ`
    pub fn apply_f(&self, lambda: &[f64], out: &mut [f64]) {
        assert_eq!(lambda.len(), self.n_lambda(), "multiplier vector length");
        let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..self.disc.n_patches())
            .into_par_iter()
            .map(|k| {
                let v = self.jumps.apply_transpose(k, lambda, self.disc.system(k).n_free());
                (self.solve_local(k, &v), self.psi_t(k, &v))
            })
            .collect();
        out.iter_mut().for_each(|o| *o = 0.0);
        for (k, (x, _)) in parts.iter().enumerate() {
            self.jumps.apply_add(k, x, out);
        }
        if self.n_primal() > 0 {
            let t: Vec<Vec<f64>> = parts.into_iter().map(|p| p.1).collect();
            let z = self.solve_coarse(self.scatter_primal(&t));
            for k in 0..self.disc.n_patches() {
                self.add_coarse_jump(k, &z, out);
            }
        }
    }

    /// Right-hand side `g` for the given free-dof loads.
    pub fn rhs_with(&self, loads: &[Vec<f64>]) -> Vec<f64> {
        let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..self.disc.n_patches())
            .into_par_iter()
            .map(|k| (self.solve_local(k, &loads[k]), self.psi_t(k, &loads[k])))
            .collect();
        let mut g = vec![0.0; self.n_lambda()];
        let mut scale = 0.0f64;
        for (k, (x, _)) in parts.iter().enumerate() {
            self.jumps.apply_add(k, x, &mut g);
            scale = x.iter().fold(scale, |a, v| a.max(v.abs()));
        }
        if self.n_primal() > 0 {
            let t: Vec<Vec<f64>> = parts.into_iter().map(|p| p.1).collect();
            let z = self.solve_coarse(self.scatter_primal(&t));
            scale = z.iter().fold(scale, |a, v| a.max(v.abs()));
            for k in 0..self.disc.n_patches() {
                self.add_coarse_jump(k, &z, &mut g);
            }
        }
        if g.iter().all(|v| v.abs() <= RHS_FLUSH * scale) {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        g
    }

    /// Right-hand side `g` for the assembled loads.
    pub fn rhs(&self) -> Vec<f64> {
        self.rhs_with(&self.loads())
    }

    fn loads(&self) -> Vec<Vec<f64>> {
        self.disc.systems().iter().map(|s| s.load.clone()).collect()
    }

    /// Patch coefficients (free dofs) for multipliers `λ` and the given loads.
    pub fn recover_with(&self, loads: &[Vec<f64>], lambda: &[f64]) -> Vec<Vec<f64>> {
        let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..self.disc.n_patches())
            .into_par_iter()
            .map(|k| {
                let n = self.disc.system(k).n_free();
                let bt = self.jumps.apply_transpose(k, lambda, n);
                let r: Vec<f64> = loads[k].iter().zip(&bt).map(|(f, b)| f - b).collect();
                (self.solve_local(k, &r), self.psi_t(k, &r))
            })
            .collect();
        let t: Vec<Vec<f64>> = parts.iter().map(|p| p.1.clone()).collect();
        let mu = self.solve_coarse(self.scatter_primal(&t));
        parts
            .into_iter()
            .enumerate()
            .map(|(k, (mut u, _))| {
                let idx = &self.constraints.patches[k].primal_index;
                for (p, &g) in self.locals[k].psi.iter().zip(idx) {
                    crate::linalg::axpy(mu[g], p, &mut u);
                }
                u
            })
            .collect()
    }

    pub fn recover(&self, lambda: &[f64]) -> Vec<Vec<f64>> {
        self.recover_with(&self.loads(), lambda)
    }

    /// `M_sD r = Σ_k B_Γ D_k⁻¹ S_k D_k⁻¹ B_Γᵀ r`
    pub fn apply_preconditioner(&self, r: &[f64], out: &mut [f64]) {
        assert_eq!(r.len(), self.n_lambda(), "multiplier vector length");
        let parts: Vec<Vec<f64>> = (0..self.disc.n_patches())
            .into_par_iter()
            .map(|k| {
                let schur = self.disc.schur(k);
                let d = &self.locals[k].scaling;
                let mut v = vec![0.0; d.len()];
                for e in &self.jumps.patches[k] {
                    let p = schur.gamma_position(e.dof).expect("jump dofs are interface dofs");
                    v[p] += e.sign * r[e.row];
                }
                v.iter_mut().zip(d).for_each(|(x, s)| *x /= s);
                let mut w = schur.apply(&v);
                w.iter_mut().zip(d).for_each(|(x, s)| *x /= s);
                w
            })
            .collect();
        out.iter_mut().for_each(|o| *o = 0.0);
        for (k, w) in parts.iter().enumerate() {
            let schur = self.disc.schur(k);
            for e in &self.jumps.patches[k] {
                let p = schur.gamma_position(e.dof).expect("jump dofs are interface dofs");
                out[e.row] += e.sign * w[p];
            }
        }
    }

    pub fn f_operator(&self) -> SchurOperator<'_, 'd> {
        SchurOperator(self)
    }

    pub fn preconditioner(&self) -> ScaledDirichlet<'_, 'd> {
        ScaledDirichlet(self)
    }

    /// True if every dof carrying a jump row is determined by the primal
    /// constraints alone. All jumps then vanish on the constrained space and
    /// `F = 0`, so any `λ` solves the dual problem.
    pub fn dual_is_trivial(&self) -> bool {
        (0..self.disc.n_patches()).all(|k| {
            let c = &self.constraints.patches[k].matrix;
            let mut pinned = vec![false; c.ncols()];
            // a row with a single unpinned dof pins it; repeat to a fixed point
            loop {
                let mut changed = false;
                for i in 0..c.nrows() {
                    let mut free = c.row(i).0.iter().filter(|&&j| !pinned[j]);
                    if let (Some(&j), None) = (free.next(), free.next()) {
                        pinned[j] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            self.jumps.patches[k].iter().all(|e| pinned[e.dof])
        })
    }

    /// Largest spread of the coefficients of each free dof class.
    pub fn jump_residual(&self, u: &[Vec<f64>]) -> f64 {
        let cls = self.disc.classification();
        cls.classes()
            .iter()
            .filter(|c| !c.dirichlet)
            .map(|c| {
                let vals = c.members.iter().map(|&(k, t)| {
                    u[k][self.disc.system(k).local_index(t).expect("free dof")]
                });
                let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Conforming global coefficients (averaging each dof class).
    pub fn to_global(&self, u: &[Vec<f64>]) -> Vec<f64> {
        let cls = self.disc.classification();
        let mut g = vec![0.0; cls.n_global()];
        for c in cls.classes().iter().filter(|c| !c.dirichlet) {
            let (k0, t0) = c.members[0];
            let gi = cls.global_index(k0, t0).expect("free class");
            let s: f64 = c
                .members
                .iter()
                .map(|&(k, t)| u[k][self.disc.system(k).local_index(t).expect("free dof")])
                .sum();
            g[gi] = s / c.members.len() as f64;
        }
        g
    }
}

/// The dual Schur complement `F` as a linear operator.
pub struct SchurOperator<'a, 'd>(&'a IetiSystem<'d>);

impl LinearOperator for SchurOperator<'_, '_> {
    fn dim(&self) -> usize {
        self.0.n_lambda()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply_f(x, y);
    }
}

/// The scaled Dirichlet preconditioner `M_sD` as a linear operator.
pub struct ScaledDirichlet<'a, 'd>(&'a IetiSystem<'d>);

impl LinearOperator for ScaledDirichlet<'_, '_> {
    fn dim(&self) -> usize {
        self.0.n_lambda()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply_preconditioner(x, y);
    }
}
