//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ietidp::assembly::{assemble_patch, stiffness_quad_points};
use ietidp::geometry::Side;
use ietidp::ieti::{Discretization, IetiSystem};
use ietidp::linalg::LinearOperator;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Dense matrix of an operator, column by column.
pub fn operator_dense(op: &dyn LinearOperator) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut y = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut y);
        e[j] = 0.0;
        m.column_mut(j).copy_from_slice(&y);
    }
    m
}

pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / scale
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[(i, k)].abs().total_cmp(&m[(j, k)].abs()))
            .unwrap();
        m.swap_rows(k, p);
        x.swap(k, p);
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            if f != 0.0 {
                for j in k..n {
                    m[(i, j)] -= f * m[(k, j)];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[(k, j)] * x[j]).sum();
        x[k] = (x[k] - s) / m[(k, k)];
    }
    x
}

/// Identification of patch dofs through coinciding Greville-point images.
pub struct Identification {
    /// per patch, per tensor dof: global index, `None` on the Dirichlet boundary
    pub global: Vec<Vec<Option<usize>>>,
    /// per patch, per tensor dof: number of patch dofs sharing the point
    pub multiplicity: Vec<Vec<usize>>,
    pub n_global: usize,
}

pub fn identify(disc: &Discretization) -> Identification {
    let mp = disc.multipatch();
    let d = mp.dim();
    let mut groups: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
    let mut on_dirichlet = Vec::new();
    for (k, basis) in disc.bases().iter().enumerate() {
        let grev: Vec<Vec<f64>> = basis.knot_vectors().iter().map(|kv| kv.greville()).collect();
        let mut mask = vec![false; basis.size()];
        for side in Side::all(d) {
            if mp.is_dirichlet(k, side) {
                for i in basis.side_indices(side.axis, side.upper) {
                    mask[i] = true;
                }
            }
        }
        on_dirichlet.push(mask);
        for t in 0..basis.size() {
            let m = basis.multi_index(t);
            let xi: Vec<f64> = (0..d).map(|a| grev[a][m[a]]).collect();
            let x = mp.patch(k).map_point(&xi).unwrap();
            let key = x.iter().map(|v| (v * 1e7).round() as i64).collect();
            groups.entry(key).or_default().push((k, t));
        }
    }
    let mut global: Vec<Vec<Option<usize>>> =
        disc.bases().iter().map(|b| vec![None; b.size()]).collect();
    let mut multiplicity: Vec<Vec<usize>> = disc.bases().iter().map(|b| vec![0; b.size()]).collect();
    let mut n_global = 0;
    for members in groups.values() {
        let dirichlet = members.iter().any(|&(k, t)| on_dirichlet[k][t]);
        for &(k, t) in members {
            multiplicity[k][t] = members.len();
            if !dirichlet {
                global[k][t] = Some(n_global);
            }
        }
        if !dirichlet {
            n_global += 1;
        }
    }
    Identification {
        global,
        multiplicity,
        n_global,
    }
}

/// Monolithic conforming stiffness matrix and load vector.
pub fn monolithic(
    disc: &Discretization,
    id: &Identification,
    src: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> (DMatrix<f64>, Vec<f64>) {
    let n = id.n_global;
    let mut a = DMatrix::zeros(n, n);
    let mut f = vec![0.0; n];
    for (k, basis) in disc.bases().iter().enumerate() {
        let nq = stiffness_quad_points(basis.degrees()[0]);
        let (ak, fk) = assemble_patch(disc.multipatch().patch(k), basis, nq, Some(src)).unwrap();
        for (i, j, v) in ak.triplets() {
            if let (Some(gi), Some(gj)) = (id.global[k][i], id.global[k][j]) {
                a[(gi, gj)] += v;
            }
        }
        for (i, v) in fk.iter().enumerate() {
            if let Some(gi) = id.global[k][i] {
                f[gi] += v;
            }
        }
    }
    (a, f)
}

fn offsets(disc: &Discretization) -> Vec<usize> {
    let mut off = vec![0];
    for s in disc.systems() {
        off.push(off.last().unwrap() + s.n_free());
    }
    off
}

/// Dense `F` and `g` from the saddle point system on the space of
/// patch-wise functions with continuous primal values.
pub fn saddle_oracle(sys: &IetiSystem<'_>) -> (DMatrix<f64>, Vec<f64>) {
    let disc = sys.discretization();
    let off = offsets(disc);
    let n = *off.last().unwrap();
    // primal continuity: row of the first patch minus row of every other patch
    let mut rows: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for k in 0..disc.n_patches() {
        for (r, &g) in sys.patch_constraints(k).primal_index.iter().enumerate() {
            rows.entry(g).or_default().push((k, r));
        }
    }
    let mut c_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    for members in rows.values() {
        let (k0, r0) = members[0];
        for &(k, r) in &members[1..] {
            let mut row = Vec::new();
            let c = sys.patch_constraints(k).matrix.to_dense();
            let c0 = sys.patch_constraints(k0).matrix.to_dense();
            for j in 0..c.ncols() {
                if c[(r, j)] != 0.0 {
                    row.push((off[k] + j, c[(r, j)]));
                }
            }
            for j in 0..c0.ncols() {
                if c0[(r0, j)] != 0.0 {
                    row.push((off[k0] + j, -c0[(r0, j)]));
                }
            }
            c_rows.push(row);
        }
    }
    let m = c_rows.len();
    let mut kmat = DMatrix::zeros(n + m, n + m);
    for k in 0..disc.n_patches() {
        for (i, j, v) in disc.system(k).stiffness.triplets() {
            kmat[(off[k] + i, off[k] + j)] += v;
        }
    }
    for (r, row) in c_rows.iter().enumerate() {
        for &(j, v) in row {
            kmat[(n + r, j)] += v;
            kmat[(j, n + r)] += v;
        }
    }
    let nl = sys.n_lambda();
    let mut b = DMatrix::zeros(nl, n + m);
    for k in 0..disc.n_patches() {
        for (i, j, v) in sys.jump_matrix(k).triplets() {
            b[(i, off[k] + j)] += v;
        }
    }
    let lu = kmat.clone().full_piv_lu();
    let kinv_bt = lu.solve(&b.transpose()).expect("saddle oracle is nonsingular");
    let f = &b * kinv_bt;
    let mut load = DVector::zeros(n + m);
    for k in 0..disc.n_patches() {
        for (i, v) in disc.system(k).load.iter().enumerate() {
            load[off[k] + i] = *v;
        }
    }
    let g = &b * lu.solve(&load).unwrap();
    (f, g.as_slice().to_vec())
}

/// Dense `M_sD` from dense interface Schur complements, with the interface
/// and the multiplicities taken from the Greville identification.
pub fn dirichlet_oracle(sys: &IetiSystem<'_>, id: &Identification) -> DMatrix<f64> {
    let disc = sys.discretization();
    let nl = sys.n_lambda();
    let mut m = DMatrix::zeros(nl, nl);
    for k in 0..disc.n_patches() {
        let ps = disc.system(k);
        let a = ps.stiffness.to_dense();
        let free = ps.free_dofs();
        let gamma: Vec<usize> = (0..free.len()).filter(|&i| id.multiplicity[k][free[i]] > 1).collect();
        let inner: Vec<usize> = (0..free.len()).filter(|&i| id.multiplicity[k][free[i]] == 1).collect();
        let sub = |r: &[usize], c: &[usize]| DMatrix::from_fn(r.len(), c.len(), |i, j| a[(r[i], c[j])]);
        let a_gg = sub(&gamma, &gamma);
        let s = if inner.is_empty() {
            a_gg
        } else {
            let a_gi = sub(&gamma, &inner);
            let a_ii = sub(&inner, &inner);
            let x = a_ii.lu().solve(&a_gi.transpose()).unwrap();
            a_gg - &a_gi * x
        };
        let bk = sys.jump_matrix(k).to_dense();
        let bg = DMatrix::from_fn(nl, gamma.len(), |i, j| {
            bk[(i, gamma[j])] / id.multiplicity[k][free[gamma[j]]] as f64
        });
        m += &bg * s * bg.transpose();
    }
    m
}

/// Condition number of `M F` on the range of `F` (eigenvalues of `F^½ M F^½`).
pub fn kappa_oracle(f: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
    let fs = (f + f.transpose()) * 0.5;
    let eig = SymmetricEigen::new(fs);
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v));
    let n = f.nrows();
    let mut half = DMatrix::zeros(n, n);
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 1e-10 * top {
            let q = eig.eigenvectors.column(i);
            half += lam.sqrt() * q * q.transpose();
        }
    }
    let p = &half * m * &half;
    let ps = (&p + p.transpose()) * 0.5;
    let ev = SymmetricEigen::new(ps).eigenvalues;
    let max = ev.iter().fold(0.0f64, |a, &v| a.max(v));
    let min = ev
        .iter()
        .filter(|&&v| v > 1e-8 * max)
        .fold(f64::INFINITY, |a, &v| a.min(v));
    max / min
}

/// IETI coefficients mapped to the oracle numbering (average over copies).
pub fn to_oracle_numbering(disc: &Discretization, id: &Identification, u: &[Vec<f64>]) -> Vec<f64> {
    let mut g = vec![0.0; id.n_global];
    let mut count = vec![0usize; id.n_global];
    for k in 0..disc.n_patches() {
        for (l, &t) in disc.system(k).free_dofs().iter().enumerate() {
            if let Some(gi) = id.global[k][t] {
                g[gi] += u[k][l];
                count[gi] += 1;
            }
        }
    }
    g.iter().zip(&count).map(|(v, &c)| v / c as f64).collect()
}

/// Source without the symmetries of the unit square and cube.
pub fn skew_source(x: &[f64]) -> f64 {
    ietidp::assembly::sine_source(x) * (1.0 + x[0] + 0.5 * x[1] * x[1]) + x[0]
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}
