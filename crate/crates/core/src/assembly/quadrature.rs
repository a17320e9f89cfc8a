use std::f64::consts::PI;

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The rule mapped to `[a, b]` as `(point, weight)` pairs.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = b - a;
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (a + h * x, h * w))
    }
}

/// `n`-point Gauss–Legendre rule on `[0, 1]`, exact for polynomials of degree `2n − 1`.
///
/// Nodes are Newton-refined roots of `P_n` starting from the Chebyshev-like guess.
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1, "a quadrature rule needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is in (0, 1]; store the pair symmetric about 1/2
        points[i] = 0.5 * (1.0 - x);
        points[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    GaussRule { points, weights }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor Gauss–Legendre rule on `[0, 1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule {
    pub dim: usize,
    /// flat, `dim` coordinates per point; direction 0 runs fastest
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, q: usize) -> &[f64] {
        &self.points[q * self.dim..(q + 1) * self.dim]
    }

    /// `Σ w_q f(x_q)`
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|q| self.weights[q] * f(self.point(q))).sum()
    }
}

/// Tensor rule with `n` points per direction on `[0, 1]^d`.
pub fn gauss_rule(n: usize, d: usize) -> QuadRule {
    let g = gauss_legendre(n);
    let total = n.pow(d as u32);
    let mut points = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    for k in 0..total {
        let mut rem = k;
        let mut w = 1.0;
        for _ in 0..d {
            let i = rem % n;
            rem /= n;
            points.push(g.points[i]);
            w *= g.weights[i];
        }
        weights.push(w);
    }
    QuadRule {
        dim: d,
        points,
        weights,
    }
}
