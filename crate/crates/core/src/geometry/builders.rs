use super::{MultiPatch, Patch, Side};
use crate::spline::{KnotVector, TensorBasis};

/// Axis-aligned box `[lo, hi]` as a single-element multilinear patch.
fn box_patch(id: usize, lo: &[f64], hi: &[f64]) -> Patch {
    let d = lo.len();
    let basis = TensorBasis::uniform(d, 1, 1).expect("valid linear basis");
    let points = (0..1usize << d)
        .map(|c| {
            (0..d)
                .map(|a| if c >> a & 1 == 1 { hi[a] } else { lo[a] })
                .collect()
        })
        .collect();
    Patch::new(id, basis, points).expect("corner count matches the basis")
}

/// `G(ξ) = ξ` on `[0, 1]^d`.
pub fn identity_patch(d: usize) -> Patch {
    box_patch(0, &vec![0.0; d], &vec![1.0; d])
}

/// `Π splits[i]` affine patches tiling `(0, 1)^d`, outer boundary Dirichlet.
///
/// Patches are ordered lexicographically by cell index, direction 0 fastest.
pub fn unit_hypercube(d: usize, splits: &[usize]) -> MultiPatch {
    assert_eq!(splits.len(), d, "one split count per direction");
    assert!(splits.iter().all(|&s| s >= 1), "split counts must be positive");
    let total: usize = splits.iter().product();
    let mut patches = Vec::with_capacity(total);
    let mut dirichlet = Vec::new();
    for k in 0..total {
        let mut rem = k;
        let cell: Vec<usize> = splits
            .iter()
            .map(|&s| {
                let c = rem % s;
                rem /= s;
                c
            })
            .collect();
        let lo: Vec<f64> = cell.iter().zip(splits).map(|(&c, &s)| c as f64 / s as f64).collect();
        let hi: Vec<f64> = cell
            .iter()
            .zip(splits)
            .map(|(&c, &s)| (c + 1) as f64 / s as f64)
            .collect();
        patches.push(box_patch(k, &lo, &hi));
        for side in Side::all(d) {
            let outer = if side.upper {
                cell[side.axis] + 1 == splits[side.axis]
            } else {
                cell[side.axis] == 0
            };
            if outer {
                dirichlet.push((k, side));
            }
        }
    }
    MultiPatch::new(patches, dirichlet).expect("generated multipatch is valid")
}

/// Seven unit cubes tiling `(−1, 1)³ \ [0, 1)³`, outer boundary Dirichlet.
///
/// A nonzero `twist` rotates every point about the z-axis by `twist · (z + 1) / 2`;
/// the rotation is interpolated quadratically in z, so those patches have
/// geometry degree `(1, 1, 2)`.
pub fn fichera(twist: f64) -> MultiPatch {
    let mut lows = Vec::new();
    for k in 0i32..2 {
        for j in 0i32..2 {
            for i in 0i32..2 {
                if (i, j, k) != (1, 1, 1) {
                    lows.push([i - 1, j - 1, k - 1]);
                }
            }
        }
    }
    let occupied = |c: [i32; 3]| c.iter().all(|&v| v == -1 || v == 0) && c != [0, 0, 0];
    let mut patches = Vec::with_capacity(lows.len());
    let mut dirichlet = Vec::new();
    for (id, lo) in lows.iter().enumerate() {
        let lo_f = lo.map(f64::from);
        patches.push(if twist == 0.0 {
            box_patch(id, &lo_f, &lo_f.map(|v| v + 1.0))
        } else {
            twisted_cube(id, lo_f, twist)
        });
        for side in Side::all(3) {
            let mut nb = *lo;
            nb[side.axis] += if side.upper { 1 } else { -1 };
            if !occupied(nb) {
                dirichlet.push((id, side));
            }
        }
    }
    MultiPatch::new(patches, dirichlet).expect("generated multipatch is valid")
}

fn twist_map(x: [f64; 3], twist: f64) -> [f64; 3] {
    let theta = twist * (x[2] + 1.0) / 2.0;
    let (s, c) = theta.sin_cos();
    [c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]]
}

/// Unit cube at `lo` composed with the twist, bilinear in (x, y) and quadratic in z.
fn twisted_cube(id: usize, lo: [f64; 3], twist: f64) -> Patch {
    let lin = KnotVector::uniform(1, 1).expect("valid");
    let quad = KnotVector::uniform(2, 1).expect("valid");
    let basis = TensorBasis::new(vec![lin.clone(), lin, quad]).expect("valid");
    let mut points = Vec::with_capacity(12);
    for kz in 0..3 {
        for j in 0..2 {
            for i in 0..2 {
                let at = |zeta: f64| {
                    twist_map([lo[0] + i as f64, lo[1] + j as f64, lo[2] + zeta], twist)
                };
                let (f0, fh, f1) = (at(0.0), at(0.5), at(1.0));
                // Bernstein coefficients of the quadratic interpolant at 0, 1/2, 1
                let c: Vec<f64> = (0..3)
                    .map(|a| match kz {
                        0 => f0[a],
                        1 => 2.0 * fh[a] - 0.5 * (f0[a] + f1[a]),
                        _ => f1[a],
                    })
                    .collect();
                points.push(c);
            }
        }
    }
    Patch::new(id, basis, points).expect("control point count matches the basis")
}
