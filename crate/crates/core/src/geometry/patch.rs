use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GeometryError;
use crate::assembly::gauss_legendre;
use crate::spline::TensorBasis;

/// Threshold on `|det ∇G|` below which a geometry map is reported degenerate.
pub const DEGENERATE_DET_TOL: f64 = 1e-14;

/// One side of the parameter box: the facet where coordinate `axis` is 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side {
    pub axis: usize,
    pub upper: bool,
}

const SIDE_NAMES: [&str; 6] = ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"];

impl Side {
    pub const fn new(axis: usize, upper: bool) -> Self {
        Self { axis, upper }
    }

    pub fn all(dim: usize) -> impl Iterator<Item = Side> {
        (0..dim).flat_map(|axis| [Side::new(axis, false), Side::new(axis, true)])
    }

    pub fn name(&self) -> &'static str {
        SIDE_NAMES[2 * self.axis + usize::from(self.upper)]
    }

    pub fn from_name(name: &str) -> Option<Side> {
        SIDE_NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| Side::new(i / 2, i % 2 == 1))
    }

    /// Parameter value of the side along its normal axis.
    pub fn coordinate(&self) -> f64 {
        if self.upper {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Side {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Side {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Side::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown side `{name}`")))
    }
}

/// Point, Jacobian and inverse-transpose Jacobian of a geometry map.
///
/// Matrices are row-major `d × d`; `jacobian[i * d + j] = ∂x_i / ∂ξ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryEval {
    pub point: Vec<f64>,
    pub jacobian: Vec<f64>,
    pub det: f64,
    pub inv_transpose: Vec<f64>,
}

/// Determinant and inverse of a row-major 1×1, 2×2 or 3×3 matrix.
pub fn det_and_inverse(m: &[f64], d: usize) -> (f64, Vec<f64>) {
    match d {
        1 => (m[0], vec![1.0 / m[0]]),
        2 => {
            let det = m[0] * m[3] - m[1] * m[2];
            let s = 1.0 / det;
            (det, vec![m[3] * s, -m[1] * s, -m[2] * s, m[0] * s])
        }
        3 => {
            let c00 = m[4] * m[8] - m[5] * m[7];
            let c01 = m[5] * m[6] - m[3] * m[8];
            let c02 = m[3] * m[7] - m[4] * m[6];
            let det = m[0] * c00 + m[1] * c01 + m[2] * c02;
            let s = 1.0 / det;
            let inv = vec![
                c00 * s,
                (m[2] * m[7] - m[1] * m[8]) * s,
                (m[1] * m[5] - m[2] * m[4]) * s,
                c01 * s,
                (m[0] * m[8] - m[2] * m[6]) * s,
                (m[2] * m[3] - m[0] * m[5]) * s,
                c02 * s,
                (m[1] * m[6] - m[0] * m[7]) * s,
                (m[0] * m[4] - m[1] * m[3]) * s,
            ];
            (det, inv)
        }
        _ => panic!("unsupported dimension {d}"),
    }
}

/// Tensor B-spline map `G: [0,1]^d → R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    id: usize,
    basis: TensorBasis,
    /// flat, `dim` coordinates per control point, lexicographic order
    coefs: Vec<f64>,
}

impl Patch {
    pub fn new(id: usize, basis: TensorBasis, control_points: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        let d = basis.dim();
        if control_points.len() != basis.size() {
            return Err(GeometryError::InvalidPatch {
                patch: id,
                reason: format!(
                    "{} control points given, basis has dimension {}",
                    control_points.len(),
                    basis.size()
                ),
            });
        }
        if let Some(i) = control_points.iter().position(|c| c.len() != d) {
            return Err(GeometryError::InvalidPatch {
                patch: id,
                reason: format!("control point {i} does not have {d} coordinates"),
            });
        }
        if let Some(i) = control_points.iter().position(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(GeometryError::InvalidPatch {
                patch: id,
                reason: format!("control point {i} is not finite"),
            });
        }
        Ok(Self {
            id,
            basis,
            coefs: control_points.into_iter().flatten().collect(),
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub(crate) fn set_id(&mut self, id: usize) {
        self.id = id;
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &TensorBasis {
        &self.basis
    }

    pub fn control_point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coefs[i * d..(i + 1) * d]
    }

    pub fn control_points(&self) -> impl Iterator<Item = &[f64]> {
        self.coefs.chunks(self.dim())
    }

    /// `x = G(ξ)` without Jacobian.
    pub fn map_point(&self, xi: &[f64]) -> Result<Vec<f64>, GeometryError> {
        let d = self.dim();
        let e = self.basis.eval(xi)?;
        let mut x = vec![0.0; d];
        for (&i, &v) in e.indices.iter().zip(&e.values) {
            for (xk, ck) in x.iter_mut().zip(self.control_point(i)) {
                *xk += v * ck;
            }
        }
        Ok(x)
    }

    /// Point and Jacobian data; fails on `|det J| < 1e-14`.
    pub fn eval(&self, xi: &[f64]) -> Result<GeometryEval, GeometryError> {
        let d = self.dim();
        let e = self.basis.eval(xi)?;
        let mut point = vec![0.0; d];
        let mut jac = vec![0.0; d * d];
        for ((&i, &v), g) in e.indices.iter().zip(&e.values).zip(&e.gradients) {
            let c = self.control_point(i);
            for r in 0..d {
                point[r] += v * c[r];
                for s in 0..d {
                    jac[r * d + s] += c[r] * g[s];
                }
            }
        }
        let (det, inv) = det_and_inverse(&jac, d);
        if !(det.abs() >= DEGENERATE_DET_TOL) {
            return Err(GeometryError::Degenerate {
                patch: self.id,
                xi: xi.to_vec(),
                det,
            });
        }
        let mut inv_transpose = vec![0.0; d * d];
        for r in 0..d {
            for s in 0..d {
                inv_transpose[r * d + s] = inv[s * d + r];
            }
        }
        Ok(GeometryEval {
            point,
            jacobian: jac,
            det,
            inv_transpose,
        })
    }

    /// Checks that `det ∇G` keeps one sign on a uniform `5^d` grid.
    pub fn check_regular(&self) -> Result<(), GeometryError> {
        let d = self.dim();
        let mut sign = 0.0f64;
        for k in 0..5usize.pow(d as u32) {
            let xi: Vec<f64> = (0..d)
                .map(|a| ((k / 5usize.pow(a as u32)) % 5) as f64 / 4.0)
                .collect();
            let g = self.eval(&xi)?;
            if sign == 0.0 {
                sign = g.det.signum();
            } else if g.det.signum() != sign {
                return Err(GeometryError::InvalidPatch {
                    patch: self.id,
                    reason: format!("Jacobian determinant changes sign near {xi:?}"),
                });
            }
        }
        Ok(())
    }

    /// `∫ |det ∇G|` over the parameter box with `n` Gauss points per knot span and direction.
    pub fn volume(&self, n: usize) -> Result<f64, GeometryError> {
        let d = self.dim();
        let rule = gauss_legendre(n);
        let spans: Vec<Vec<(f64, f64)>> = self
            .basis
            .knot_vectors()
            .iter()
            .map(|kv| kv.intervals().into_iter().map(|(_, a, b)| (a, b)).collect())
            .collect();
        let pts_1d: Vec<Vec<(f64, f64)>> = spans
            .iter()
            .map(|s| {
                s.iter()
                    .flat_map(|&(a, b)| {
                        rule.points
                            .iter()
                            .zip(&rule.weights)
                            .map(move |(&x, &w)| (a + (b - a) * x, (b - a) * w))
                    })
                    .collect()
            })
            .collect();
        let counts: Vec<usize> = pts_1d.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        let mut vol = 0.0;
        let mut xi = vec![0.0; d];
        for k in 0..total {
            let mut rem = k;
            let mut w = 1.0;
            for a in 0..d {
                let (x, wa) = pts_1d[a][rem % counts[a]];
                rem /= counts[a];
                xi[a] = x;
                w *= wa;
            }
            vol += w * self.eval(&xi)?.det.abs();
        }
        Ok(vol)
    }
}
