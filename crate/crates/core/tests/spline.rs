use ietidp::spline::{KnotVector, TensorBasis};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

/// Textbook Cox–de Boor recursion with the right endpoint assigned to the last span.
fn cox_de_boor(t: &[f64], i: usize, p: usize, x: f64) -> f64 {
    if p == 0 {
        let last = t.iter().rposition(|&v| v < 1.0).unwrap();
        return if (t[i] <= x && x < t[i + 1]) || (x == 1.0 && i == last) {
            1.0
        } else {
            0.0
        };
    }
    let mut v = 0.0;
    if t[i + p] > t[i] {
        v += (x - t[i]) / (t[i + p] - t[i]) * cox_de_boor(t, i, p - 1, x);
    }
    if t[i + p + 1] > t[i + 1] {
        v += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * cox_de_boor(t, i + 1, p - 1, x);
    }
    v
}

fn full(kv: &KnotVector, x: f64) -> Vec<f64> {
    let (first, vals) = kv.eval(x).unwrap();
    let mut out = vec![0.0; kv.dim()];
    out[first..first + vals.len()].copy_from_slice(&vals);
    out
}

#[test]
fn uniform_knot_vectors() {
    let kv = KnotVector::uniform(1, 1).unwrap();
    assert_eq!(kv.knots(), &[0.0, 0.0, 1.0, 1.0]);
    assert_eq!(kv.dim(), 2);
    let kv = KnotVector::uniform(2, 2).unwrap();
    assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]);
    let kv = KnotVector::uniform(3, 4).unwrap();
    assert_eq!(kv.dim(), 7);
    assert_eq!(&kv.knots()[4..7], &[0.25, 0.5, 0.75]);
}

#[test]
fn hat_functions() {
    let kv = KnotVector::uniform(1, 1).unwrap();
    assert_eq!(kv.eval(0.5).unwrap().1, vec![0.5, 0.5]);
    assert_eq!(kv.eval_deriv(0.5).unwrap().1, vec![-1.0, 1.0]);
}

#[test]
fn matches_recursive_oracle() {
    let kv = KnotVector::uniform(3, 5).unwrap();
    for x in [0.37, 0.0, 1.0, 0.2, 0.99] {
        let v = full(&kv, x);
        for (i, vi) in v.iter().enumerate() {
            assert!((vi - cox_de_boor(kv.knots(), i, 3, x)).abs() <= 1e-13, "x={x} i={i}");
        }
    }
}

#[test]
fn derivative_matches_finite_differences() {
    let kv = KnotVector::uniform(4, 3).unwrap();
    let x = 0.61;
    let h = 1e-6;
    let (first, d) = kv.eval_deriv(x).unwrap();
    let (lo, hi) = (full(&kv, x - h), full(&kv, x + h));
    for (j, dj) in d.iter().enumerate() {
        let fd = (hi[first + j] - lo[first + j]) / (2.0 * h);
        assert!((dj - fd).abs() <= 1e-5);
    }
}

#[test]
fn partition_of_unity_and_support() {
    let mut rng = SmallRng::seed_from_u64(1);
    for p in 1..=7 {
        for n in [1, 2, 5] {
            let kv = KnotVector::uniform(p, n).unwrap();
            for _ in 0..100 {
                let x: f64 = rng.random_range(0.0..=1.0);
                let (first, vals) = kv.eval(x).unwrap();
                assert_eq!(vals.len(), p + 1);
                assert!(first + p < kv.dim());
                assert!((vals.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
                assert!(vals.iter().all(|&v| v >= 0.0));
                let (_, ders) = kv.eval_deriv(x).unwrap();
                assert!(ders.iter().sum::<f64>().abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn greville_reproduces_linear_functions() {
    for p in 1..=5 {
        let kv = KnotVector::uniform(p, 4).unwrap();
        let g = kv.greville();
        for x in [0.0, 0.13, 0.5, 0.77, 1.0] {
            let v = full(&kv, x);
            let s: f64 = v.iter().zip(&g).map(|(a, b)| a * b).sum();
            assert!((s - x).abs() <= 1e-13);
        }
    }
}

#[test]
fn refinement() {
    assert_eq!(
        KnotVector::uniform(2, 1).unwrap().refine_uniform(),
        KnotVector::uniform(2, 2).unwrap()
    );
    for p in 1..=4 {
        let mut kv = KnotVector::uniform(p, 1).unwrap();
        for r in 1..=3 {
            kv = kv.refine_uniform();
            assert_eq!(kv, KnotVector::uniform(p, 1 << r).unwrap());
        }
    }
}

#[test]
fn coarse_space_is_nested() {
    for p in 1..=4 {
        let coarse = KnotVector::uniform(p, 3).unwrap();
        let fine = coarse.refine_uniform();
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let a = DMatrix::from_fn(50, fine.dim(), |i, j| full(&fine, xs[i])[j]);
        for c in 0..coarse.dim() {
            let b = DVector::from_fn(50, |i, _| full(&coarse, xs[i])[c]);
            let coef = a.clone().svd(true, true).solve(&b, 1e-14).unwrap();
            let res = (&a * coef - &b).amax();
            assert!(res <= 1e-10, "p={p} c={c}: {res}");
        }
    }
}

#[test]
fn tensor_basis_values() {
    let b = TensorBasis::uniform(2, 1, 1).unwrap();
    let e = b.eval(&[0.5, 0.5]).unwrap();
    assert_eq!(e.values, vec![0.25; 4]);
    let b = TensorBasis::uniform(3, 2, 2).unwrap();
    let kv = b.knot_vector(0).clone();
    let xi = [0.3, 0.71, 0.05];
    let e = b.eval(&xi).unwrap();
    assert!((e.values.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
    let uni: Vec<Vec<f64>> = xi.iter().map(|&x| full(&kv, x)).collect();
    let mut dense = vec![0.0; b.size()];
    for (i, v) in e.indices.iter().zip(&e.values) {
        dense[*i] = *v;
    }
    let n = kv.dim();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let naive = uni[0][i] * uni[1][j] * uni[2][k];
                assert!((dense[b.index(&[i, j, k])] - naive).abs() <= 1e-13);
            }
        }
    }
}

#[test]
fn invalid_input_is_rejected() {
    assert!(KnotVector::uniform(0, 1).is_err());
    assert!(KnotVector::uniform(2, 0).is_err());
    assert!(KnotVector::new(1, vec![0.0, 0.0, 0.6, 0.4, 1.0, 1.0]).is_err());
    assert!(KnotVector::uniform(2, 2).unwrap().eval(1.5).is_err());
}

proptest! {
    #[test]
    fn partition_of_unity_everywhere(p in 1usize..=7, n in 1usize..=9, x in 0.0f64..=1.0) {
        let kv = KnotVector::uniform(p, n).unwrap();
        let (_, vals) = kv.eval(x).unwrap();
        prop_assert!((vals.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
        prop_assert!(vals.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn multi_index_round_trip(n in 1usize..=4, p in 1usize..=3, seed in 0usize..1000) {
        let b = TensorBasis::uniform(3, p, n).unwrap();
        let t = seed % b.size();
        prop_assert_eq!(b.index(&b.multi_index(t)), t);
    }
}
