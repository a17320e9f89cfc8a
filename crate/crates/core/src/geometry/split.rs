use super::{GeometryError, MultiPatch, Patch, Side};
use crate::spline::{KnotVector, TensorBasis};

/// Inserts `u` once (Boehm). `coefs` holds one row of coefficients per control point.
fn insert_knot(knots: &mut Vec<f64>, p: usize, coefs: &mut Vec<Vec<f64>>, u: f64) {
    let n = coefs.len();
    // span k with knots[k] <= u < knots[k+1]
    let k = (p..n).rev().find(|&k| knots[k] <= u).expect("u inside the domain");
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i + p <= k {
            out.push(coefs[i].clone());
        } else if i > k {
            out.push(coefs[i - 1].clone());
        } else {
            let alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
            out.push(
                coefs[i]
                    .iter()
                    .zip(&coefs[i - 1])
                    .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                    .collect(),
            );
        }
    }
    knots.insert(k + 1, u);
    *coefs = out;
}

/// Restriction of a spline space to `[a, b] ⊂ [0, 1]`, reparameterized to `[0, 1]`.
///
/// Returns the new knot vector and the matrix `R` (one row per new function,
/// one column per old one) with `c_new = R c_old`.
pub fn restrict_knots(kv: &KnotVector, a: f64, b: f64) -> (KnotVector, Vec<Vec<f64>>) {
    assert!(0.0 <= a && a < b && b <= 1.0, "invalid sub-interval [{a}, {b}]");
    let p = kv.degree();
    let n = kv.dim();
    let mut knots = kv.knots().to_vec();
    let mut coefs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for u in [a, b] {
        if u <= 0.0 || u >= 1.0 {
            continue;
        }
        let mult = knots.iter().filter(|&&t| t == u).count();
        for _ in mult..=p {
            insert_knot(&mut knots, p, &mut coefs, u);
        }
    }
    let s = knots.iter().position(|&t| t == a).expect("a is a knot");
    let e = knots.iter().position(|&t| t == b).expect("b is a knot");
    let h = b - a;
    let mut sub: Vec<f64> = knots[s..=e + p].iter().map(|&t| (t - a) / h).collect();
    for t in &mut sub[..=p] {
        *t = 0.0;
    }
    let len = sub.len();
    for t in &mut sub[len - p - 1..] {
        *t = 1.0;
    }
    for t in &mut sub {
        *t = t.clamp(0.0, 1.0);
    }
    let kv = KnotVector::new(p, sub).expect("restricted knot vector is valid");
    (kv, coefs[s..e].to_vec())
}

/// Restriction of `patch` to the box `Π [lo_i, hi_i]`.
fn restrict_patch(patch: &Patch, lo: &[f64], hi: &[f64], id: usize) -> Result<Patch, GeometryError> {
    let d = patch.dim();
    let basis = patch.basis();
    let mut new_kvs = Vec::with_capacity(d);
    let mut mats = Vec::with_capacity(d);
    for a in 0..d {
        let (kv, r) = restrict_knots(basis.knot_vector(a), lo[a], hi[a]);
        new_kvs.push(kv);
        mats.push(r);
    }
    let new_basis = TensorBasis::new(new_kvs)?;
    // apply the per-direction matrices one mode at a time
    let mut sizes = basis.sizes();
    let mut data: Vec<Vec<f64>> = patch.control_points().map(<[f64]>::to_vec).collect();
    for (a, r) in mats.iter().enumerate() {
        let n_new = r.len();
        let mut new_sizes = sizes.clone();
        new_sizes[a] = n_new;
        let total: usize = new_sizes.iter().product();
        let stride: usize = sizes[..a].iter().product();
        let new_stride = stride;
        let mut out = vec![vec![0.0; d]; total];
        for (idx, o) in out.iter_mut().enumerate() {
            let inner = idx % new_stride;
            let j = (idx / new_stride) % n_new;
            let outer = idx / (new_stride * n_new);
            for (i, &w) in r[j].iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let src = &data[inner + stride * (i + sizes[a] * outer)];
                for (ov, sv) in o.iter_mut().zip(src) {
                    *ov += w * sv;
                }
            }
        }
        data = out;
        sizes = new_sizes;
    }
    Patch::new(id, new_basis, data)
}

/// Replaces every patch by `m^d` sub-patches on a uniform partition of its parameter box.
///
/// Sub-patches of patch `k` get consecutive ids starting at `k · m^d`,
/// ordered lexicographically (direction 0 fastest).
pub fn split_patches(mp: &MultiPatch, m: usize) -> Result<MultiPatch, GeometryError> {
    assert!(m >= 1, "subdivision factor must be positive");
    let d = mp.dim();
    let per = m.pow(d as u32);
    let mut patches = Vec::with_capacity(mp.len() * per);
    let mut dirichlet = Vec::new();
    for (k, patch) in mp.patches().iter().enumerate() {
        for c in 0..per {
            let id = k * per + c;
            let cell: Vec<usize> = (0..d).map(|a| (c / m.pow(a as u32)) % m).collect();
            let lo: Vec<f64> = cell.iter().map(|&i| i as f64 / m as f64).collect();
            let hi: Vec<f64> = cell.iter().map(|&i| (i + 1) as f64 / m as f64).collect();
            patches.push(if m == 1 {
                let mut p = patch.clone();
                p.set_id(id);
                p
            } else {
                restrict_patch(patch, &lo, &hi, id)?
            });
            for side in Side::all(d) {
                let on_parent_side = if side.upper {
                    cell[side.axis] + 1 == m
                } else {
                    cell[side.axis] == 0
                };
                if on_parent_side && mp.is_dirichlet(k, side) {
                    dirichlet.push((id, side));
                }
            }
        }
    }
    MultiPatch::new(patches, dirichlet)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_of_linear_is_interpolation() {
        let kv = KnotVector::uniform(1, 1).unwrap();
        let (sub, r) = restrict_knots(&kv, 0.25, 0.5);
        assert_eq!(sub.knots(), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(r, vec![vec![0.75, 0.25], vec![0.5, 0.5]]);
    }

    #[test]
    fn restriction_keeps_interior_knots() {
        let kv = KnotVector::uniform(2, 4).unwrap();
        let (sub, r) = restrict_knots(&kv, 0.0, 0.5);
        assert_eq!(sub, KnotVector::uniform(2, 2).unwrap());
        assert_eq!(r.len(), 4);
    }
}
