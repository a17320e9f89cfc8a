use super::{KnotVector, SplineError};

/// Tensor product of univariate B-spline bases.
///
/// Dofs are numbered lexicographically with direction 0 running fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorBasis {
    knots: Vec<KnotVector>,
}

/// Active functions of a tensor basis at one parameter point.
#[derive(Clone, Debug, Default)]
pub struct TensorEval {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// parametric gradient of each active function
    pub gradients: Vec<Vec<f64>>,
}

impl TensorBasis {
    pub fn new(knots: Vec<KnotVector>) -> Result<Self, SplineError> {
        if knots.is_empty() || knots.len() > 3 {
            return Err(SplineError::InvalidDimension(knots.len()));
        }
        Ok(Self { knots })
    }

    /// Same uniform knot vector of degree `p` with `n_intervals` spans in every direction.
    pub fn uniform(dim: usize, degree: usize, n_intervals: usize) -> Result<Self, SplineError> {
        let kv = KnotVector::uniform(degree, n_intervals)?;
        Self::new(vec![kv; dim])
    }

    pub fn dim(&self) -> usize {
        self.knots.len()
    }

    pub fn knot_vector(&self, dir: usize) -> &KnotVector {
        &self.knots[dir]
    }

    pub fn knot_vectors(&self) -> &[KnotVector] {
        &self.knots
    }

    /// Univariate dimensions.
    pub fn sizes(&self) -> Vec<usize> {
        self.knots.iter().map(KnotVector::dim).collect()
    }

    pub fn size(&self) -> usize {
        self.knots.iter().map(KnotVector::dim).product()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.knots.iter().map(KnotVector::degree).collect()
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for (kv, &m) in self.knots.iter().zip(multi).rev() {
            idx = idx * kv.dim() + m;
        }
        idx
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        self.knots
            .iter()
            .map(|kv| {
                let m = idx % kv.dim();
                idx /= kv.dim();
                m
            })
            .collect()
    }

    /// Indices of the functions with nonzero trace on the side `ξ_axis = 0` (or 1 if `upper`),
    /// in lexicographic order of the remaining directions.
    pub fn side_indices(&self, axis: usize, upper: bool) -> Vec<usize> {
        let sizes = self.sizes();
        let fixed = if upper { sizes[axis] - 1 } else { 0 };
        let total = self.size() / sizes[axis];
        let mut multi = vec![0usize; self.dim()];
        (0..total)
            .map(|mut k| {
                for (a, m) in multi.iter_mut().enumerate() {
                    if a == axis {
                        *m = fixed;
                    } else {
                        *m = k % sizes[a];
                        k /= sizes[a];
                    }
                }
                self.index(&multi)
            })
            .collect()
    }

    /// Uniformly refined copy (every interval bisected in every direction).
    pub fn refine_uniform(&self) -> TensorBasis {
        TensorBasis {
            knots: self.knots.iter().map(KnotVector::refine_uniform).collect(),
        }
    }

    /// Values and parametric gradients of the active functions at `xi`.
    pub fn eval(&self, xi: &[f64]) -> Result<TensorEval, SplineError> {
        let d = self.dim();
        if xi.len() != d {
            return Err(SplineError::InvalidDimension(xi.len()));
        }
        let mut uni = Vec::with_capacity(d);
        for (kv, &x) in self.knots.iter().zip(xi) {
            uni.push(kv.eval_with_deriv(x)?);
        }
        let counts: Vec<usize> = self.knots.iter().map(|kv| kv.degree() + 1).collect();
        let total: usize = counts.iter().product();
        let mut out = TensorEval {
            indices: Vec::with_capacity(total),
            values: Vec::with_capacity(total),
            gradients: Vec::with_capacity(total),
        };
        let mut local = vec![0usize; d];
        let mut multi = vec![0usize; d];
        for _ in 0..total {
            let mut value = 1.0;
            let mut grad = vec![1.0; d];
            for k in 0..d {
                let (first, vals, ders) = &uni[k];
                multi[k] = first + local[k];
                value *= vals[local[k]];
                for (g, gk) in grad.iter_mut().enumerate() {
                    *gk *= if g == k { ders[local[k]] } else { vals[local[k]] };
                }
            }
            out.indices.push(self.index(&multi));
            out.values.push(value);
            out.gradients.push(grad);
            // advance the local multi-index, direction 0 fastest
            for k in 0..d {
                local[k] += 1;
                if local[k] < counts[k] {
                    break;
                }
                local[k] = 0;
            }
        }
        Ok(out)
    }
}
