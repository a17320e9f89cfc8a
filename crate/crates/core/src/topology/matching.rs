use std::collections::BTreeMap;

use super::{
    tangential_axes, AxisPos, EntityClass, EntityKind, Interface, LocalEntity, Orientation, Topology,
    TopologyError, UnionFind,
};
use crate::geometry::{MultiPatch, Side};

/// Default coincidence tolerance for sampled side points.
pub const MATCH_TOL: f64 = 1e-8;

/// Samples per tangential direction when verifying a match.
const SAMPLES: usize = 5;

fn side_point(d: usize, side: Side, s: &[f64]) -> Vec<f64> {
    let mut xi = vec![0.0; d];
    xi[side.axis] = side.coordinate();
    for (&a, &v) in tangential_axes(d, side.axis).iter().zip(s) {
        xi[a] = v;
    }
    xi
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Tangential sample grid `{0, 1/4, …, 1}^{d−1}`.
fn sample_grid(d: usize) -> Vec<Vec<f64>> {
    let m = d - 1;
    (0..SAMPLES.pow(m as u32))
        .map(|k| {
            (0..m)
                .map(|j| ((k / SAMPLES.pow(j as u32)) % SAMPLES) as f64 / (SAMPLES - 1) as f64)
                .collect()
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn orientations(m: usize) -> Vec<Orientation> {
    let mut out = Vec::new();
    for perm in permutations(m) {
        for bits in 0..1usize << m {
            out.push(Orientation {
                perm: perm.clone(),
                flip: (0..m).map(|j| bits >> j & 1 == 1).collect(),
            });
        }
    }
    out
}

struct SideSamples {
    patch: usize,
    side: Side,
    /// physical points on the tangential sample grid
    points: Vec<Vec<f64>>,
}

/// Matches patch sides geometrically and builds the vertex/edge/face classes.
///
/// Dirichlet-tagged sides never take part in matching. Every other side must
/// coincide with exactly one side of another patch under some orientation.
pub fn build_topology(mp: &MultiPatch, tol: f64) -> Result<Topology, TopologyError> {
    let d = mp.dim();
    let n = mp.len();
    let grid = sample_grid(d);
    let corner_ids: Vec<usize> = (0..grid.len())
        .filter(|&k| grid[k].iter().all(|&v| v == 0.0 || v == 1.0))
        .collect();

    let mut sides = Vec::new();
    for (k, patch) in mp.patches().iter().enumerate() {
        for side in Side::all(d) {
            if mp.is_dirichlet(k, side) {
                continue;
            }
            let points = grid
                .iter()
                .map(|s| patch.map_point(&side_point(d, side, s)))
                .collect::<Result<Vec<_>, _>>()?;
            sides.push(SideSamples { patch: k, side, points });
        }
    }

    // sweep over the side centers sorted by their first coordinate
    let centre = grid.len() / 2;
    let mut order: Vec<usize> = (0..sides.len()).collect();
    order.sort_by(|&a, &b| sides[a].points[centre][0].total_cmp(&sides[b].points[centre][0]));
    let orients = orientations(d - 1);
    let mut partner: Vec<Option<(usize, Orientation)>> = vec![None; sides.len()];
    for (pos, &a) in order.iter().enumerate() {
        if partner[a].is_some() {
            continue;
        }
        for &b in &order[pos + 1..] {
            let (sa, sb) = (&sides[a], &sides[b]);
            if sb.points[centre][0] - sa.points[centre][0] > tol {
                break;
            }
            if partner[b].is_some()
                || sa.patch == sb.patch
                || !close(&sa.points[centre], &sb.points[centre], tol)
            {
                continue;
            }
            let found = orients.iter().find(|o| {
                let check = |k: usize| {
                    let mapped = o.map(&grid[k]);
                    let j = grid
                        .iter()
                        .position(|g| close(g, &mapped, 1e-12))
                        .expect("grid is closed under orientation maps");
                    close(&sa.points[k], &sb.points[j], tol)
                };
                corner_ids.iter().all(|&k| check(k)) && (0..grid.len()).all(check)
            });
            if let Some(o) = found {
                partner[a] = Some((b, o.clone()));
                partner[b] = Some((a, o.inverse()));
                break;
            }
        }
    }

    // unmatched free sides are errors
    for (a, s) in sides.iter().enumerate() {
        if partner[a].is_some() {
            continue;
        }
        let interior: Vec<&Vec<f64>> = grid
            .iter()
            .zip(&s.points)
            .filter(|(g, _)| g.iter().all(|&v| v > 0.0 && v < 1.0))
            .map(|(_, p)| p)
            .collect();
        for other in &sides {
            if other.patch != s.patch
                && interior
                    .iter()
                    .any(|p| other.points.iter().any(|q| close(p, q, tol)))
            {
                return Err(TopologyError::NonMatching {
                    patch: s.patch,
                    side: s.side,
                    other: other.patch,
                });
            }
        }
        return Err(TopologyError::UnassignedBoundary {
            patch: s.patch,
            side: s.side,
        });
    }

    let mut interfaces = Vec::new();
    let mut side_interface = vec![vec![None; 2 * d]; n];
    let mut pairs: Vec<(usize, usize)> = (0..sides.len())
        .filter_map(|a| partner[a].as_ref().map(|(b, _)| (a, *b)))
        .filter(|&(a, b)| (sides[a].patch, sides[a].side) < (sides[b].patch, sides[b].side))
        .collect();
    pairs.sort_by_key(|&(a, _)| (sides[a].patch, sides[a].side));
    for (a, b) in pairs {
        let (sa, sb) = (&sides[a], &sides[b]);
        let idx = interfaces.len();
        side_interface[sa.patch][2 * sa.side.axis + usize::from(sa.side.upper)] = Some(idx);
        side_interface[sb.patch][2 * sb.side.axis + usize::from(sb.side.upper)] = Some(idx);
        interfaces.push(Interface {
            patch_a: sa.patch,
            side_a: sa.side,
            patch_b: sb.patch,
            side_b: sb.side,
            orientation: partner[a].as_ref().expect("matched").1.clone(),
        });
    }

    // entity classes by transitive closure of interface gluing
    let n_codes = 3usize.pow(d as u32);
    let mut uf = UnionFind::new(n * n_codes);
    for itf in &interfaces {
        for e in LocalEntity::all(d) {
            let pos = e.positions(d);
            if pos[itf.side_a.axis] != side_pos(itf.side_a) {
                continue;
            }
            let f = map_entity(d, itf, &pos);
            uf.union(itf.patch_a * n_codes + e.0, itf.patch_b * n_codes + f.0);
        }
    }
    let mut class_of_root = BTreeMap::new();
    let mut classes: Vec<EntityClass> = Vec::new();
    let mut entity_class = vec![vec![None; n_codes]; n];
    for k in 0..n {
        for e in LocalEntity::all(d) {
            let root = uf.find(k * n_codes + e.0);
            let c = *class_of_root.entry(root).or_insert_with(|| {
                classes.push(EntityClass {
                    kind: EntityKind::from_codim(e.codim(d), d),
                    members: Vec::new(),
                    dirichlet: false,
                });
                classes.len() - 1
            });
            entity_class[k][e.0] = Some(c);
            let pos = e.positions(d);
            let on_dirichlet = pos.iter().enumerate().any(|(a, &p)| match p {
                AxisPos::Free => false,
                AxisPos::Lower => mp.is_dirichlet(k, Side::new(a, false)),
                AxisPos::Upper => mp.is_dirichlet(k, Side::new(a, true)),
            });
            let class = &mut classes[c];
            class.members.push((k, e));
            class.dirichlet |= on_dirichlet;
        }
    }
    for c in &classes {
        if c.members.iter().any(|&(_, e)| EntityKind::from_codim(e.codim(d), d) != c.kind) {
            return Err(TopologyError::Invalid(
                "interfaces glue entities of different dimension".into(),
            ));
        }
    }
    Ok(Topology {
        dim: d,
        interfaces,
        side_interface,
        entity_class,
        classes,
    })
}

fn side_pos(side: Side) -> AxisPos {
    if side.upper {
        AxisPos::Upper
    } else {
        AxisPos::Lower
    }
}

/// Image on patch b of a local entity of patch a lying in side a.
fn map_entity(d: usize, itf: &Interface, pos: &[AxisPos]) -> LocalEntity {
    let ta = tangential_axes(d, itf.side_a.axis);
    let tb = tangential_axes(d, itf.side_b.axis);
    let mut out = vec![AxisPos::Free; d];
    out[itf.side_b.axis] = side_pos(itf.side_b);
    for (j, &a) in ta.iter().enumerate() {
        let o = &itf.orientation;
        out[tb[o.perm[j]]] = match (pos[a], o.flip[j]) {
            (AxisPos::Lower, true) => AxisPos::Upper,
            (AxisPos::Upper, true) => AxisPos::Lower,
            (p, _) => p,
        };
    }
    LocalEntity::from_positions(&out)
}
