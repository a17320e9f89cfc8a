use super::gauss_legendre;
use crate::geometry::{GeometryError, Patch};
use crate::linalg::SparseMatrix;
use crate::spline::TensorBasis;

/// Source term evaluated at physical points.
pub type Source<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Quadrature data of one direction: for every point of every span the
/// first active index, weight, and the `p + 1` values and derivatives.
struct Direction {
    degree: usize,
    /// per span: list of quadrature points
    spans: Vec<Vec<QPoint>>,
}

struct QPoint {
    x: f64,
    w: f64,
    first: usize,
    vals: Vec<f64>,
    ders: Vec<f64>,
}

impl Direction {
    fn new(basis: &TensorBasis, dir: usize, n_quad: usize) -> Self {
        let kv = basis.knot_vector(dir);
        let rule = gauss_legendre(n_quad);
        let spans = kv
            .intervals()
            .into_iter()
            .map(|(_, a, b)| {
                rule.on_interval(a, b)
                    .map(|(x, w)| {
                        let (first, vals, ders) =
                            kv.eval_with_deriv(x).expect("quadrature point inside [0, 1]");
                        QPoint {
                            x,
                            w,
                            first,
                            vals,
                            ders,
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            degree: kv.degree(),
            spans,
        }
    }
}

/// Odometer over a box of multi-indices, direction 0 fastest.
fn for_each_multi(counts: &[usize], mut f: impl FnMut(&[usize])) {
    if counts.contains(&0) {
        return;
    }
    let mut m = vec![0usize; counts.len()];
    loop {
        f(&m);
        let mut a = 0;
        loop {
            if a == counts.len() {
                return;
            }
            m[a] += 1;
            if m[a] < counts[a] {
                break;
            }
            m[a] = 0;
            a += 1;
        }
    }
}

/// CSR pattern coupling all functions whose indices differ by at most `p` per direction.
fn tensor_pattern(basis: &TensorBasis) -> (Vec<usize>, Vec<usize>) {
    let sizes = basis.sizes();
    let degrees = basis.degrees();
    let d = sizes.len();
    let n = basis.size();
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut cols = Vec::new();
    let mut lo = vec![0usize; d];
    let mut counts = vec![0usize; d];
    for i in 0..n {
        let m = basis.multi_index(i);
        for a in 0..d {
            lo[a] = m[a].saturating_sub(degrees[a]);
            counts[a] = (m[a] + degrees[a]).min(sizes[a] - 1) + 1 - lo[a];
        }
        let mut multi = vec![0usize; d];
        for_each_multi(&counts, |off| {
            for a in 0..d {
                multi[a] = lo[a] + off[a];
            }
            cols.push(basis.index(&multi));
        });
        row_ptr.push(cols.len());
    }
    (row_ptr, cols)
}

/// Stiffness matrix and load vector of one patch on all tensor dofs.
///
/// Uses `n_quad` Gauss points per direction and knot span; the load is zero
/// when `source` is `None`.
pub fn assemble_patch(
    patch: &Patch,
    basis: &TensorBasis,
    n_quad: usize,
    source: Option<Source<'_>>,
) -> Result<(SparseMatrix, Vec<f64>), GeometryError> {
    let d = basis.dim();
    assert_eq!(d, patch.dim(), "basis and geometry dimensions differ");
    let dirs: Vec<Direction> = (0..d).map(|a| Direction::new(basis, a, n_quad)).collect();
    let (row_ptr, col_idx) = tensor_pattern(basis);
    let mut values = vec![0.0; col_idx.len()];
    let mut load = vec![0.0; basis.size()];

    let span_counts: Vec<usize> = dirs.iter().map(|dr| dr.spans.len()).collect();
    let loc_counts: Vec<usize> = dirs.iter().map(|dr| dr.degree + 1).collect();
    let n_loc: usize = loc_counts.iter().product();
    let q_counts = vec![n_quad; d];

    let mut elem = vec![0.0; n_loc * n_loc];
    let mut elem_load = vec![0.0; n_loc];
    let mut dofs = vec![0usize; n_loc];
    let mut phys = vec![0.0; n_loc * d];
    let mut value = vec![0.0; n_loc];
    let mut xi = vec![0.0; d];
    let mut multi = vec![0usize; d];
    let mut error = None;

    for_each_multi(&span_counts, |span| {
        if error.is_some() {
            return;
        }
        elem.iter_mut().for_each(|v| *v = 0.0);
        elem_load.iter_mut().for_each(|v| *v = 0.0);
        let firsts: Vec<usize> = (0..d).map(|a| dirs[a].spans[span[a]][0].first).collect();
        let mut l = 0;
        for_each_multi(&loc_counts, |loc| {
            for a in 0..d {
                multi[a] = firsts[a] + loc[a];
            }
            dofs[l] = basis.index(&multi);
            l += 1;
        });
        for_each_multi(&q_counts, |q| {
            if error.is_some() {
                return;
            }
            let mut w = 1.0;
            for a in 0..d {
                let qp = &dirs[a].spans[span[a]][q[a]];
                xi[a] = qp.x;
                w *= qp.w;
            }
            let g = match patch.eval(&xi) {
                Ok(g) => g,
                Err(e) => {
                    error = Some(e);
                    return;
                }
            };
            let wq = w * g.det.abs();
            let mut l = 0;
            for_each_multi(&loc_counts, |loc| {
                let mut v = 1.0;
                let mut grad = [1.0f64; 3];
                for a in 0..d {
                    let qp = &dirs[a].spans[span[a]][q[a]];
                    v *= qp.vals[loc[a]];
                    for (b, gb) in grad.iter_mut().enumerate().take(d) {
                        *gb *= if a == b { qp.ders[loc[a]] } else { qp.vals[loc[a]] };
                    }
                }
                value[l] = v;
                for r in 0..d {
                    phys[l * d + r] = (0..d).map(|s| g.inv_transpose[r * d + s] * grad[s]).sum();
                }
                l += 1;
            });
            for i in 0..n_loc {
                let gi = &phys[i * d..(i + 1) * d];
                let row = &mut elem[i * n_loc..(i + 1) * n_loc];
                for j in i..n_loc {
                    let gj = &phys[j * d..(j + 1) * d];
                    let mut s = 0.0;
                    for r in 0..d {
                        s += gi[r] * gj[r];
                    }
                    row[j] += wq * s;
                }
            }
            if let Some(f) = source {
                let fw = wq * f(&g.point);
                for (el, v) in elem_load.iter_mut().zip(&value) {
                    *el += fw * v;
                }
            }
        });
        for i in 0..n_loc {
            let gi = dofs[i];
            load[gi] += elem_load[i];
            let cols = &col_idx[row_ptr[gi]..row_ptr[gi + 1]];
            for j in 0..n_loc {
                let v = if j >= i { elem[i * n_loc + j] } else { elem[j * n_loc + i] };
                let pos = cols.binary_search(&dofs[j]).expect("element pair is in the pattern");
                values[row_ptr[gi] + pos] += v;
            }
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    let a = SparseMatrix::from_csr(basis.size(), basis.size(), row_ptr, col_idx, values)
        .expect("tensor pattern is well formed");
    Ok((a, load))
}

/// Stiffness and load restricted to the non-eliminated dofs of a patch.
#[derive(Clone, Debug)]
pub struct PatchSystem {
    pub stiffness: SparseMatrix,
    pub load: Vec<f64>,
    free: Vec<usize>,
    local_of: Vec<Option<usize>>,
}

impl PatchSystem {
    /// Drops the rows and columns flagged in `eliminated` (homogeneous Dirichlet).
    pub fn from_full(full: &SparseMatrix, load: &[f64], eliminated: &[bool]) -> Self {
        let free: Vec<usize> = (0..eliminated.len()).filter(|&i| !eliminated[i]).collect();
        let mut local_of = vec![None; eliminated.len()];
        for (l, &i) in free.iter().enumerate() {
            local_of[i] = Some(l);
        }
        Self {
            stiffness: full.submatrix(&free, &free),
            load: free.iter().map(|&i| load[i]).collect(),
            free,
            local_of,
        }
    }

    pub fn assemble(
        patch: &Patch,
        basis: &TensorBasis,
        n_quad: usize,
        eliminated: &[bool],
        source: Option<Source<'_>>,
    ) -> Result<Self, GeometryError> {
        let (a, f) = assemble_patch(patch, basis, n_quad, source)?;
        Ok(Self::from_full(&a, &f, eliminated))
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Tensor index of each free dof.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Free position of a tensor index, `None` if eliminated.
    pub fn local_index(&self, tensor: usize) -> Option<usize> {
        self.local_of[tensor]
    }

    /// Scatters free coefficients into a full tensor vector (zeros on eliminated dofs).
    pub fn expand(&self, u: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.local_of.len()];
        for (&i, &v) in self.free.iter().zip(u) {
            full[i] = v;
        }
        full
    }
}

/// Flags the tensor dofs with nonzero trace on any of the given sides.
pub fn side_dofs_mask(basis: &TensorBasis, sides: impl IntoIterator<Item = (usize, bool)>) -> Vec<bool> {
    let mut mask = vec![false; basis.size()];
    for (axis, upper) in sides {
        for i in basis.side_indices(axis, upper) {
            mask[i] = true;
        }
    }
    mask
}

/// `∫ (u_h − u)²` over the patch, `u_h` given by full tensor coefficients.
pub fn l2_error_squared(
    patch: &Patch,
    basis: &TensorBasis,
    coefs: &[f64],
    exact: Source<'_>,
    n_quad: usize,
) -> Result<f64, GeometryError> {
    let d = basis.dim();
    let dirs: Vec<Direction> = (0..d).map(|a| Direction::new(basis, a, n_quad)).collect();
    let span_counts: Vec<usize> = dirs.iter().map(|dr| dr.spans.len()).collect();
    let loc_counts: Vec<usize> = dirs.iter().map(|dr| dr.degree + 1).collect();
    let q_counts = vec![n_quad; d];
    let mut xi = vec![0.0; d];
    let mut multi = vec![0usize; d];
    let mut total = 0.0;
    let mut error = None;
    for_each_multi(&span_counts, |span| {
        for_each_multi(&q_counts, |q| {
            if error.is_some() {
                return;
            }
            let mut w = 1.0;
            for a in 0..d {
                let qp = &dirs[a].spans[span[a]][q[a]];
                xi[a] = qp.x;
                w *= qp.w;
            }
            let g = match patch.eval(&xi) {
                Ok(g) => g,
                Err(e) => {
                    error = Some(e);
                    return;
                }
            };
            let mut uh = 0.0;
            for_each_multi(&loc_counts, |loc| {
                let mut v = 1.0;
                for a in 0..d {
                    let qp = &dirs[a].spans[span[a]][q[a]];
                    multi[a] = qp.first + loc[a];
                    v *= qp.vals[loc[a]];
                }
                uh += v * coefs[basis.index(&multi)];
            });
            let e = uh - exact(&g.point);
            total += w * g.det.abs() * e * e;
        });
    });
    match error {
        Some(e) => Err(e),
        None => Ok(total),
    }
}
