//! Envelope (variable-band) LDLᵀ factorization.
//!
//! Symmetric matrices are permuted, stored row-wise from the first nonzero
//! of each row up to the diagonal, and factorized in place as `L D Lᵀ`.
//!
//! For [`FactorKind::Spd`] every pivot must be positive and above
//! [`SINGULAR_PIVOT_TOL`] times the largest initial diagonal magnitude.
//!
//! For [`FactorKind::SymmetricIndefinite`] a pivot whose magnitude falls below
//! [`STATIC_PIVOT_TOL`] times that scale is shifted by `±scale`. The computed
//! factors then belong to `K = M + Σ ρ_j e_j e_jᵀ`, and solves with `M` apply
//! the exact low-rank (Woodbury) correction through a small dense system.
//! This covers saddle-point matrices `[[A, Cᵀ], [C, 0]]` whose leading block
//! is only semidefinite (floating patches).

use nalgebra::{DMatrix, DVector};

use super::ordering::{choose_ordering, Ordering};
use super::sparse::check_len;
use super::{LinalgError, SparseMatrix};

/// Pivot threshold below which an SPD factorization reports a singular matrix.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-12;
/// Pivot threshold below which an indefinite factorization shifts the pivot.
pub const STATIC_PIVOT_TOL: f64 = 1e-8;
/// Relative pivot threshold of the dense correction system.
const CORRECTION_SINGULAR_TOL: f64 = 1e-9;
/// Relative tolerance of the symmetry check on input matrices.
const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Spd,
    SymmetricIndefinite,
}

#[derive(Clone, Debug)]
struct Envelope {
    /// first stored column of each row
    first: Vec<usize>,
    /// offset of each row in `data`; row `i` holds columns `first[i]..i`
    offset: Vec<usize>,
    /// strictly lower part of L, row-wise
    data: Vec<f64>,
    /// pivots D
    diag: Vec<f64>,
}

impl Envelope {
    fn row(&self, i: usize) -> &[f64] {
        &self.data[self.offset[i]..self.offset[i] + (i - self.first[i])]
    }

    /// In-place `L D Lᵀ y = b` on permuted data.
    fn solve_in_place(&self, y: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n {
            let f = self.first[i];
            let row = self.row(i);
            let s: f64 = row.iter().zip(&y[f..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi /= d;
        }
        for i in (0..n).rev() {
            let f = self.first[i];
            let xi = y[i];
            if xi == 0.0 {
                continue;
            }
            let row = self.row(i);
            for (v, l) in y[f..i].iter_mut().zip(row) {
                *v -= l * xi;
            }
        }
    }
}

/// Low-rank correction for shifted pivots.
#[derive(Clone, Debug)]
struct Correction {
    /// permuted indices of shifted pivots
    index: Vec<usize>,
    /// shifts ρ_j
    shift: Vec<f64>,
    /// K⁻¹ E, one column per shifted pivot (permuted numbering)
    w: Vec<Vec<f64>>,
    /// LU of I − Eᵀ K⁻¹ E P
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

/// Reusable factorization of a symmetric sparse matrix.
#[derive(Clone, Debug)]
pub struct Factorization {
    kind: FactorKind,
    /// `perm[new] = old`
    perm: Vec<usize>,
    env: Envelope,
    correction: Option<Correction>,
    /// kept for one step of iterative refinement when pivots were shifted
    matrix: Option<SparseMatrix>,
}

/// Factorizes `m` with the automatic ordering.
pub fn factorize(m: &SparseMatrix, kind: FactorKind) -> Result<Factorization, LinalgError> {
    factorize_with(m, kind, Ordering::Auto)
}

pub fn factorize_with(
    m: &SparseMatrix,
    kind: FactorKind,
    ordering: Ordering,
) -> Result<Factorization, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            nrows: m.nrows(),
            ncols: m.ncols(),
        });
    }
    let n = m.nrows();
    let scale = m.diagonal().iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let sym_scale = m.max_abs().max(f64::MIN_POSITIVE);
    for (i, j, v) in m.triplets() {
        if (v - m.get(j, i)).abs() > SYMMETRY_TOL * sym_scale {
            return Err(LinalgError::NotSymmetric { row: i, col: j });
        }
    }
    if n == 0 {
        return Ok(Factorization {
            kind,
            perm: Vec::new(),
            env: Envelope {
                first: Vec::new(),
                offset: Vec::new(),
                data: Vec::new(),
                diag: Vec::new(),
            },
            correction: None,
            matrix: None,
        });
    }

    let perm = choose_ordering(m, ordering);
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }

    let mut first: Vec<usize> = (0..n).collect();
    for (i, j, _) in m.triplets() {
        let (a, b) = (inv[i], inv[j]);
        if b < a {
            first[a] = first[a].min(b);
        }
    }
    let mut offset = Vec::with_capacity(n);
    let mut len = 0usize;
    for (i, &f) in first.iter().enumerate() {
        offset.push(len);
        len += i - f;
    }
    let mut data = vec![0.0; len];
    let mut diag = vec![0.0; n];
    for (i, j, v) in m.triplets() {
        let (a, b) = (inv[i], inv[j]);
        if a == b {
            diag[a] = v;
        } else if b < a {
            data[offset[a] + (b - first[a])] = v;
        }
    }

    let tol = match kind {
        FactorKind::Spd => SINGULAR_PIVOT_TOL,
        FactorKind::SymmetricIndefinite => STATIC_PIVOT_TOL,
    } * scale.max(f64::MIN_POSITIVE);
    let shift_size = if scale > 0.0 { scale } else { 1.0 };
    let mut shifted: Vec<(usize, f64)> = Vec::new();

    for i in 0..n {
        let fi = first[i];
        let (before, rest) = data.split_at_mut(offset[i]);
        let row_i = &mut rest[..i - fi];
        // row_i[j - fi] <- t_ij = l_ij d_j
        for j in fi..i {
            let fj = first[j];
            let k0 = fi.max(fj);
            if k0 < j {
                let row_j = &before[offset[j]..offset[j] + (j - fj)];
                let s: f64 = row_i[k0 - fi..j - fi]
                    .iter()
                    .zip(&row_j[k0 - fj..j - fj])
                    .map(|(a, b)| a * b)
                    .sum();
                row_i[j - fi] -= s;
            }
        }
        let mut d = diag[i];
        for (t, dj) in row_i.iter_mut().zip(&diag[fi..i]) {
            let l = *t / dj;
            d -= *t * l;
            *t = l;
        }
        match kind {
            FactorKind::Spd => {
                if !(d > tol) {
                    return Err(LinalgError::Singular {
                        stage: i,
                        pivot: d,
                    });
                }
            }
            FactorKind::SymmetricIndefinite => {
                if !(d.abs() > tol) {
                    if !d.is_finite() {
                        return Err(LinalgError::Singular {
                            stage: i,
                            pivot: d,
                        });
                    }
                    let rho = if d >= 0.0 { shift_size } else { -shift_size };
                    d += rho;
                    shifted.push((i, rho));
                }
            }
        }
        diag[i] = d;
    }

    let env = Envelope {
        first,
        offset,
        data,
        diag,
    };

    let correction = if shifted.is_empty() {
        None
    } else {
        let r = shifted.len();
        let mut w = Vec::with_capacity(r);
        for &(j, _) in &shifted {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            env.solve_in_place(&mut e);
            w.push(e);
        }
        // S = I − Eᵀ K⁻¹ E P
        let s = DMatrix::from_fn(r, r, |a, b| {
            let delta = if a == b { 1.0 } else { 0.0 };
            delta - w[b][shifted[a].0] * shifted[b].1
        });
        let s_scale = s.amax().max(1.0);
        let lu = s.lu();
        let u = lu.u();
        if let Some(k) = (0..r).find(|&k| !(u[(k, k)].abs() > CORRECTION_SINGULAR_TOL * s_scale)) {
            return Err(LinalgError::Singular {
                stage: shifted[k].0,
                pivot: u[(k, k)],
            });
        }
        Some(Correction {
            index: shifted.iter().map(|s| s.0).collect(),
            shift: shifted.iter().map(|s| s.1).collect(),
            w,
            lu,
        })
    };

    let matrix = correction.as_ref().map(|_| m.clone());
    Ok(Factorization {
        kind,
        perm,
        env,
        correction,
        matrix,
    })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    /// Number of pivots that were shifted (always 0 for SPD factorizations).
    pub fn shifted_pivots(&self) -> usize {
        self.correction.as_ref().map_or(0, |c| c.index.len())
    }

    /// Stored entries of the triangular factor.
    pub fn factor_nnz(&self) -> usize {
        self.env.data.len() + self.env.diag.len()
    }

    /// Number of negative pivots of the (possibly shifted) factorization.
    pub fn negative_pivots(&self) -> usize {
        self.env.diag.iter().filter(|d| **d < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<(), LinalgError> {
        check_len(self.dim(), b.len())?;
        match &self.matrix {
            None => self.raw_solve(b),
            Some(m) => {
                // one refinement step against the unshifted matrix
                let rhs = b.to_vec();
                self.raw_solve(b);
                let mx = m.matvec(b)?;
                let mut r: Vec<f64> = rhs.iter().zip(&mx).map(|(a, c)| a - c).collect();
                self.raw_solve(&mut r);
                b.iter_mut().zip(&r).for_each(|(x, d)| *x += d);
            }
        }
        Ok(())
    }

    fn raw_solve(&self, b: &mut [f64]) {
        let n = self.dim();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        self.env.solve_in_place(&mut y);
        if let Some(c) = &self.correction {
            let rhs = DVector::from_iterator(c.index.len(), c.index.iter().map(|&j| y[j]));
            let s = c.lu.solve(&rhs).expect("correction system checked nonsingular");
            for ((col, &rho), sk) in c.w.iter().zip(&c.shift).zip(s.iter()) {
                let coef = rho * sk;
                for (yi, wi) in y.iter_mut().zip(col) {
                    *yi += coef * wi;
                }
            }
        }
        for new in 0..n {
            b[self.perm[new]] = y[new];
        }
    }
}
