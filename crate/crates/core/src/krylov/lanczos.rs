use super::KrylovError;

/// Relative threshold below which Ritz values are treated as redundancy artifacts.
pub const RITZ_FILTER: f64 = 1e-10;

/// Symmetric tridiagonal Lanczos matrix built from CG coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// `T_jj = 1/α_j + β_{j−1}/α_{j−1}`, `T_{j,j+1} = √β_j / α_j`.
    pub fn from_cg(alphas: &[f64], betas: &[f64]) -> Self {
        let m = alphas.len();
        let diag = (0..m)
            .map(|j| {
                let mut t = 1.0 / alphas[j];
                if j > 0 {
                    t += betas[j - 1] / alphas[j - 1];
                }
                t
            })
            .collect();
        let off = (0..m.saturating_sub(1))
            .map(|j| betas[j].max(0.0).sqrt() / alphas[j])
            .collect();
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for j in 0..self.len() {
            let off2 = if j > 0 { self.off[j - 1] * self.off[j - 1] } else { 0.0 };
            q = self.diag[j] - x - if j > 0 { off2 / q } else { 0.0 };
            if q == 0.0 {
                q = f64::EPSILON * (self.diag[j].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..self.len() {
            let mut r = 0.0;
            if j > 0 {
                r += self.off[j - 1].abs();
            }
            if j + 1 < self.len() {
                r += self.off[j].abs();
            }
            lo = lo.min(self.diag[j] - r);
            hi = hi.max(self.diag[j] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Extreme eigenvalues of the Lanczos matrix of a CG run.
pub fn lanczos_extremes(alphas: &[f64], betas: &[f64]) -> Result<(f64, f64), KrylovError> {
    if alphas.is_empty() {
        return Err(KrylovError::NoIterations);
    }
    let t = Tridiagonal::from_cg(alphas, betas);
    Ok((t.eigenvalue(0), t.eigenvalue(t.len() - 1)))
}

/// Like [`lanczos_extremes`], ignoring Ritz values below `RITZ_FILTER · λ_max`.
pub fn filtered_extremes(alphas: &[f64], betas: &[f64]) -> Result<(f64, f64), KrylovError> {
    if alphas.is_empty() {
        return Err(KrylovError::NoIterations);
    }
    let t = Tridiagonal::from_cg(alphas, betas);
    let max = t.eigenvalue(t.len() - 1);
    let skip = t.count_below(RITZ_FILTER * max).min(t.len() - 1);
    Ok((t.eigenvalue(skip), max))
}
