mod common;

use std::collections::BTreeSet;

use common::*;
use ietidp::assembly::sine_source;
use ietidp::geometry::{fichera, split_patches, unit_hypercube, MultiPatch, Patch, Side};
use ietidp::ieti::{Discretization, EdgeAverageSupport, IetiSystem, PrimalChoice};
use ietidp::krylov::pcg;
use ietidp::spline::TensorBasis;
use ietidp::topology::{build_topology, classify_dofs, EntityKind, TopologyError, MATCH_TOL};

/// Multilinear patch through the images of the unit box corners.
fn linear_patch(id: usize, d: usize, map: impl Fn(&[f64]) -> Vec<f64>) -> Patch {
    let basis = TensorBasis::uniform(d, 1, 1).unwrap();
    let pts = (0..1usize << d)
        .map(|c| {
            let xi: Vec<f64> = (0..d).map(|a| (c >> a & 1) as f64).collect();
            map(&xi)
        })
        .collect();
    Patch::new(id, basis, pts).unwrap()
}

fn outer_dirichlet(patches: &[Patch], lo: &[f64], hi: &[f64]) -> Vec<(usize, Side)> {
    let d = patches[0].dim();
    let mut tags = Vec::new();
    for (k, p) in patches.iter().enumerate() {
        for side in Side::all(d) {
            // a side lies on the outer boundary if its centre lies on a bounding plane
            let mut xi = vec![0.5; d];
            xi[side.axis] = side.coordinate();
            let x = p.map_point(&xi).unwrap();
            if (0..d).any(|a| (x[a] - lo[a]).abs() < 1e-12 || (x[a] - hi[a]).abs() < 1e-12) {
                tags.push((k, side));
            }
        }
    }
    tags
}

/// Two patches of the unit square, the right one with swapped and reversed axes.
fn rotated_square() -> MultiPatch {
    let a = linear_patch(0, 2, |xi| vec![0.5 * xi[0], xi[1]]);
    let b = linear_patch(1, 2, |xi| vec![0.5 + 0.5 * xi[1], 1.0 - xi[0]]);
    let patches = vec![a, b];
    let tags = outer_dirichlet(&patches, &[0.0, 0.0], &[1.0, 1.0]);
    MultiPatch::new(patches, tags).unwrap()
}

/// Four patches of the unit cube, the upper one with cyclically permuted axes.
fn rotated_cube() -> MultiPatch {
    let a = linear_patch(0, 3, |xi| vec![0.5 * xi[0], xi[1], xi[2]]);
    let b = linear_patch(1, 3, |xi| vec![0.5 + 0.5 * xi[2], xi[0], xi[1]]);
    let c = linear_patch(2, 3, |xi| vec![0.5 + 0.5 * xi[2], 1.0 - xi[1], 1.0 + xi[0]]);
    let d = linear_patch(3, 3, |xi| vec![0.5 * xi[0], xi[1], 1.0 + xi[2]]);
    let patches = vec![a, b, c, d];
    let tags = outer_dirichlet(&patches, &[0.0; 3], &[1.0, 1.0, 2.0]);
    MultiPatch::new(patches, tags).unwrap()
}

#[test]
fn two_patch_square() {
    let topo = build_topology(&unit_hypercube(2, &[2, 1]), MATCH_TOL).unwrap();
    assert_eq!(topo.interfaces().len(), 1);
    let vertices = topo.shared(EntityKind::Vertex);
    assert_eq!(vertices.len(), 2);
    assert!(vertices.iter().all(|&c| topo.classes()[c].dirichlet));
    assert!(topo.edges().is_empty());
    let d = Discretization::new(unit_hypercube(2, &[2, 1]), 1, 1, &sine_source).unwrap();
    let cls = d.classification();
    let shared: Vec<_> = cls.classes().iter().filter(|c| c.multiplicity() == 2).collect();
    assert_eq!(shared.len(), 3);
    assert_eq!(shared.iter().filter(|c| !c.dirichlet).count(), 1);
    for k in 0..2 {
        assert_eq!(cls.patch(k).gamma.len(), 1);
        assert_eq!(cls.multiplicity(k, cls.patch(k).gamma[0]), 2);
    }
}

#[test]
fn eight_patch_cube() {
    let topo = build_topology(&unit_hypercube(3, &[2, 2, 2]), MATCH_TOL).unwrap();
    assert_eq!(topo.interfaces().len(), 12);
    assert_eq!(topo.interior(EntityKind::Face).len(), 12);
    assert_eq!(topo.interior(EntityKind::Edge).len(), 6);
    assert_eq!(topo.interior(EntityKind::Vertex).len(), 1);
    for &e in &topo.interior(EntityKind::Edge) {
        assert_eq!(topo.classes()[e].patches().len(), 4);
    }
    let v = topo.interior(EntityKind::Vertex)[0];
    assert_eq!(topo.classes()[v].patches().len(), 8);
}

#[test]
fn fichera_interfaces() {
    let topo = build_topology(&fichera(0.0), MATCH_TOL).unwrap();
    assert_eq!(topo.interfaces().len(), 9);
    let twisted = build_topology(&fichera(0.3), MATCH_TOL).unwrap();
    assert_eq!(twisted.interfaces().len(), 9);
    let split = build_topology(&split_patches(&fichera(0.0), 2).unwrap(), MATCH_TOL).unwrap();
    // 9 coarse faces split in 4, plus 12 internal faces in each of 7 cubes
    assert_eq!(split.interfaces().len(), 9 * 4 + 7 * 12);
}

#[test]
fn orientations_invert() {
    for mp in [rotated_square(), rotated_cube(), fichera(0.3)] {
        let topo = build_topology(&mp, MATCH_TOL).unwrap();
        for iface in topo.interfaces() {
            let o = &iface.orientation;
            assert_eq!(&o.inverse().inverse(), o);
            let s: Vec<f64> = (0..mp.dim() - 1).map(|j| 0.25 + 0.5 * j as f64).collect();
            assert_eq!(o.inverse().map(&o.map(&s)), s);
        }
    }
    let topo = build_topology(&rotated_square(), MATCH_TOL).unwrap();
    assert!(topo.interfaces()[0].orientation.flip[0]);
}

#[test]
fn counting_identity_matches_greville_oracle() {
    let cases = [
        (unit_hypercube(2, &[2, 1]), 1, 1),
        (unit_hypercube(2, &[3, 3]), 2, 1),
        (unit_hypercube(3, &[2, 2, 2]), 2, 1),
        (unit_hypercube(3, &[2, 2, 1]), 3, 0),
        (fichera(0.0), 2, 1),
        (fichera(0.3), 1, 2),
        (rotated_square(), 3, 1),
        (rotated_cube(), 2, 1),
    ];
    for (mp, p, r) in cases {
        let d = Discretization::new(mp, p, r, &sine_source).unwrap();
        let id = identify(&d);
        let cls = d.classification();
        assert_eq!(cls.counting_identity(), id.n_global);
        assert_eq!(cls.n_global(), id.n_global);
        for k in 0..d.n_patches() {
            for t in 0..d.bases()[k].size() {
                assert_eq!(cls.multiplicity(k, t), id.multiplicity[k][t], "patch {k} dof {t} p{p} r{r} n{}", d.n_patches());
                assert_eq!(cls.global_index(k, t).is_none(), id.global[k][t].is_none());
            }
        }
    }
}

#[test]
fn central_vertex_multiplicity() {
    let d = Discretization::new(unit_hypercube(3, &[2, 2, 2]), 2, 1, &sine_source).unwrap();
    let cls = d.classification();
    let max = cls.classes().iter().map(|c| c.multiplicity()).max().unwrap();
    assert_eq!(max, 8);
    assert_eq!(cls.classes().iter().filter(|c| c.multiplicity() == 8).count(), 1);
}

#[test]
fn single_patch_has_empty_interface() {
    let d = Discretization::new(unit_hypercube(3, &[1, 1, 1]), 2, 1, &sine_source).unwrap();
    let p = d.classification().patch(0);
    assert!(p.gamma.is_empty());
    assert_eq!(p.interior.len(), 8);
}

#[test]
fn dof_sets_partition_each_patch() {
    let d = Discretization::new(fichera(0.3), 2, 1, &sine_source).unwrap();
    for (k, p) in d.classification().patches().iter().enumerate() {
        let mut all: Vec<usize> = p.interior.iter().chain(&p.gamma).copied().collect();
        all.extend((0..p.eliminated.len()).filter(|&i| p.eliminated[i]));
        all.sort_unstable();
        assert_eq!(all, (0..d.bases()[k].size()).collect::<Vec<_>>());
        for &g in &p.gamma {
            assert!(d.classification().multiplicity(k, g) >= 2);
        }
    }
}

#[test]
fn rotated_patches_solve_correctly() {
    for mp in [rotated_square(), rotated_cube()] {
        let d = Discretization::new(mp, 2, 1, &skew_source).unwrap();
        let id = identify(&d);
        let (a, f) = monolithic(&d, &id, &skew_source);
        let exact = gauss_solve(&a, &f);
        for choice in PrimalChoice::all(d.dim()) {
            let s = match IetiSystem::new(&d, choice, EdgeAverageSupport::Auto) {
                Ok(s) => s,
                Err(e) => panic!("{choice}: {e}"),
            };
            let (lambda, rep) = pcg(&s.f_operator(), &s.preconditioner(), &s.rhs(), None, 1e-10, 200).unwrap();
            assert!(rep.converged);
            let u = to_oracle_numbering(&d, &id, &s.recover(&lambda));
            let diff: Vec<f64> = u.iter().zip(&exact).map(|(x, y)| x - y).collect();
            assert!(max_abs(&diff) <= 1e-8 * max_abs(&exact), "{choice}");
        }
    }
}

#[test]
fn matching_errors() {
    let a = linear_patch(0, 2, |xi| vec![xi[0], xi[1]]);
    let b = linear_patch(1, 2, |xi| vec![1.0 + xi[0], 0.5 + xi[1]]);
    let patches = vec![a.clone(), b];
    let (xmax, xmin) = (Side { axis: 0, upper: true }, Side { axis: 0, upper: false });
    let tags: Vec<_> = Side::all(2)
        .flat_map(|s| [(0, s), (1, s)])
        .filter(|&t| t != (0, xmax) && t != (1, xmin))
        .collect();
    let mp = MultiPatch::new(patches, tags).unwrap();
    let r = build_topology(&mp, MATCH_TOL);
    assert!(matches!(r, Err(TopologyError::NonMatching { patch: 0, .. })), "{r:?}");
    let open = MultiPatch::new(vec![a], vec![]).unwrap();
    assert!(matches!(
        build_topology(&open, MATCH_TOL),
        Err(TopologyError::UnassignedBoundary { patch: 0, .. })
    ));
}

#[test]
fn mismatched_bases_are_rejected() {
    let mp = unit_hypercube(2, &[2, 1]);
    let topo = build_topology(&mp, MATCH_TOL).unwrap();
    let bases = vec![TensorBasis::uniform(2, 2, 2).unwrap(), TensorBasis::uniform(2, 2, 4).unwrap()];
    let err = classify_dofs(&mp, &bases, &topo).unwrap_err();
    assert!(matches!(err, TopologyError::NotFullyMatching { interface: 0, .. }), "{err}");
}

#[test]
fn classification_is_invariant_under_reordering() {
    let base = fichera(0.3);
    let n = base.len();
    let perm: Vec<usize> = (0..n).map(|k| (3 * k + 2) % n).collect();
    let patches: Vec<Patch> = perm.iter().map(|&k| base.patch(k).clone()).collect();
    let inv: Vec<usize> = {
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        inv
    };
    let tags: Vec<_> = base.dirichlet().iter().map(|&(k, s)| (inv[k], s)).collect();
    let shuffled = MultiPatch::new(patches, tags).unwrap();
    let classes = |mp: MultiPatch, relabel: &dyn Fn(usize) -> usize| {
        let d = Discretization::new(mp, 2, 1, &sine_source).unwrap();
        d.classification()
            .classes()
            .iter()
            .map(|c| {
                let mut m: Vec<(usize, usize)> = c.members.iter().map(|&(k, t)| (relabel(k), t)).collect();
                m.sort_unstable();
                (m, c.dirichlet)
            })
            .collect::<BTreeSet<_>>()
    };
    let a = classes(base, &|k| k);
    let b = classes(shuffled, &|k| perm[k]);
    assert_eq!(a, b);
}

#[test]
fn rotated_patches_are_regular() {
    rotated_square().check_regular().unwrap();
    rotated_cube().check_regular().unwrap();
}
