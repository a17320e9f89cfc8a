use super::SplineError;

/// Largest supported spline degree.
pub const MAX_DEGREE: usize = 30;

/// Open knot vector on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    /// Validates an open knot vector of the given degree.
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self, SplineError> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(SplineError::InvalidDegree(degree));
        }
        let p = degree;
        if knots.len() < 2 * (p + 1) {
            return Err(SplineError::InvalidKnots {
                index: knots.len(),
                reason: format!("need at least {} knots for degree {p}", 2 * (p + 1)),
            });
        }
        for (i, &t) in knots.iter().enumerate() {
            if !t.is_finite() || !(0.0..=1.0).contains(&t) {
                return Err(SplineError::InvalidKnots {
                    index: i,
                    reason: format!("knot {t} outside [0, 1]"),
                });
            }
            if i > 0 && t < knots[i - 1] {
                return Err(SplineError::InvalidKnots {
                    index: i,
                    reason: format!("knot {t} is smaller than its predecessor {}", knots[i - 1]),
                });
            }
        }
        let last = knots.len() - 1;
        if knots[..=p].iter().any(|&t| t != 0.0) {
            let index = knots[..=p].iter().position(|&t| t != 0.0).unwrap();
            return Err(SplineError::InvalidKnots {
                index,
                reason: format!("first {} knots must equal 0 (open knot vector)", p + 1),
            });
        }
        if knots[last - p..].iter().any(|&t| t != 1.0) {
            let index = last - p + knots[last - p..].iter().position(|&t| t != 1.0).unwrap();
            return Err(SplineError::InvalidKnots {
                index,
                reason: format!("last {} knots must equal 1 (open knot vector)", p + 1),
            });
        }
        let mut i = p + 1;
        while i < last - p {
            let mut j = i;
            while j + 1 < last - p && knots[j + 1] == knots[i] {
                j += 1;
            }
            if j - i + 1 > p {
                return Err(SplineError::InvalidKnots {
                    index: i,
                    reason: format!("interior knot {} repeated more than {p} times", knots[i]),
                });
            }
            i = j + 1;
        }
        Ok(Self { degree, knots })
    }

    /// Open uniform knot vector with `n_intervals` equal spans and maximal smoothness.
    pub fn uniform(degree: usize, n_intervals: usize) -> Result<Self, SplineError> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(SplineError::InvalidDegree(degree));
        }
        if n_intervals < 1 {
            return Err(SplineError::InvalidIntervals(n_intervals));
        }
        let mut knots = vec![0.0; degree + 1];
        knots.extend((1..n_intervals).map(|i| i as f64 / n_intervals as f64));
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        Ok(Self { degree, knots })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions.
    pub fn dim(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Distinct knot values (element boundaries).
    pub fn breaks(&self) -> Vec<f64> {
        let mut b: Vec<f64> = Vec::new();
        for &t in &self.knots {
            if b.last() != Some(&t) {
                b.push(t);
            }
        }
        b
    }

    pub fn num_intervals(&self) -> usize {
        self.breaks().len() - 1
    }

    /// Nonempty spans as `(span index, left, right)`.
    pub fn intervals(&self) -> Vec<(usize, f64, f64)> {
        let p = self.degree;
        (p..self.dim())
            .filter(|&mu| self.knots[mu] < self.knots[mu + 1])
            .map(|mu| (mu, self.knots[mu], self.knots[mu + 1]))
            .collect()
    }

    /// Span `μ` with `t_μ ≤ x < t_{μ+1}`; `x = 1` belongs to the last nonempty span.
    pub fn find_span(&self, x: f64) -> Result<usize, SplineError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(SplineError::OutOfDomain(x));
        }
        let n = self.dim();
        if x >= self.knots[n] {
            let mut mu = n - 1;
            while self.knots[mu] == self.knots[mu + 1] {
                mu -= 1;
            }
            return Ok(mu);
        }
        // largest mu in [p, n-1] with knots[mu] <= x
        let p = self.degree;
        let slice = &self.knots[p..n];
        let pos = slice.partition_point(|&t| t <= x);
        Ok(p + pos - 1)
    }

    /// Cox–de Boor values of the `p + 1` functions active in `span` at `x`.
    pub(crate) fn basis_in_span(&self, span: usize, degree: usize, x: f64, out: &mut [f64]) {
        let u = &self.knots;
        let mut left = [0.0f64; 32];
        let mut right = [0.0f64; 32];
        out[0] = 1.0;
        for j in 1..=degree {
            left[j] = x - u[span + 1 - j];
            right[j] = u[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = out[r] / (right[r + 1] + left[j - r]);
                out[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            out[j] = saved;
        }
    }

    /// Values and first derivatives of the active functions in `span`.
    pub(crate) fn basis_and_deriv_in_span(
        &self,
        span: usize,
        x: f64,
        vals: &mut [f64],
        ders: &mut [f64],
    ) {
        let p = self.degree;
        let u = &self.knots;
        self.basis_in_span(span, p, x, vals);
        let mut low = [0.0f64; 32];
        self.basis_in_span(span, p - 1, x, &mut low);
        let first = span - p;
        let pf = p as f64;
        for k in 0..=p {
            let i = first + k;
            let mut d = 0.0;
            if k >= 1 {
                let den = u[i + p] - u[i];
                if den > 0.0 {
                    d += low[k - 1] / den;
                }
            }
            if k < p {
                let den = u[i + p + 1] - u[i + 1];
                if den > 0.0 {
                    d -= low[k] / den;
                }
            }
            ders[k] = pf * d;
        }
    }

    /// Index of the first active function and the `p + 1` values at `x`.
    pub fn eval(&self, x: f64) -> Result<(usize, Vec<f64>), SplineError> {
        let span = self.find_span(x)?;
        let mut vals = vec![0.0; self.degree + 1];
        self.basis_in_span(span, self.degree, x, &mut vals);
        Ok((span - self.degree, vals))
    }

    /// Index of the first active function and the `p + 1` first derivatives at `x`.
    pub fn eval_deriv(&self, x: f64) -> Result<(usize, Vec<f64>), SplineError> {
        let (first, _, ders) = self.eval_with_deriv(x)?;
        Ok((first, ders))
    }

    pub fn eval_with_deriv(&self, x: f64) -> Result<(usize, Vec<f64>, Vec<f64>), SplineError> {
        let span = self.find_span(x)?;
        let mut vals = vec![0.0; self.degree + 1];
        let mut ders = vec![0.0; self.degree + 1];
        self.basis_and_deriv_in_span(span, x, &mut vals, &mut ders);
        Ok((span - self.degree, vals, ders))
    }

    /// Bisects every nonempty knot interval.
    pub fn refine_uniform(&self) -> KnotVector {
        let mut knots = Vec::with_capacity(2 * self.knots.len());
        for w in self.knots.windows(2) {
            knots.push(w[0]);
            if w[1] > w[0] {
                knots.push(0.5 * (w[0] + w[1]));
            }
        }
        knots.push(*self.knots.last().unwrap());
        KnotVector {
            degree: self.degree,
            knots,
        }
    }

    /// Knot averages `(t_{i+1} + … + t_{i+p}) / p`.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.dim())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// The knot vector of the reversed parameterization `x ↦ 1 − x`.
    pub fn reversed(&self) -> KnotVector {
        KnotVector {
            degree: self.degree,
            knots: self.knots.iter().rev().map(|t| 1.0 - t).collect(),
        }
    }

    /// Same degree and knots up to `tol`.
    pub fn matches(&self, other: &KnotVector, tol: f64) -> bool {
        self.degree == other.degree
            && self.knots.len() == other.knots.len()
            && self
                .knots
                .iter()
                .zip(&other.knots)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}
