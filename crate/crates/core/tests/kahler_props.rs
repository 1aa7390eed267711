mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use chpolar::kahler::{self, canonical_subspace, congruent, decompose, RealSubspace};
use chpolar::linalg::realify_matrix;
use chpolar::sampling;
use chpolar::Tolerances;
use nalgebra::{DMatrix, DVector};
use common::{oracle_angle, oracle_normalizer_dim};
use proptest::prelude::*;


fn signature_strategy(m: usize) -> impl Strategy<Value = Vec<(f64, usize)>> {
    // (complex pairs, angle pairs with angle, totally real count) that fit in C^m
    (0..=m, 0..=m / 2, 0..=m, 0.05f64..1.5)
        .prop_filter("fits", move |(a, p, c, _)| a + 2 * p + c <= m && a + p + c > 0)
        .prop_map(|(a, p, c, phi)| {
            let mut sig = Vec::new();
            if a > 0 {
                sig.push((0.0, 2 * a));
            }
            if p > 0 {
                sig.push((phi, 2 * p));
            }
            if c > 0 {
                sig.push((FRAC_PI_2, c));
            }
            sig
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decompose_recovers_signature(m in 2usize..=6, seed in any::<u64>(), sig in signature_strategy(6)) {
        let total: usize = sig.iter().map(|&(a, d)| if a == FRAC_PI_2 { d } else if a == 0.0 { d / 2 } else { d }).sum();
        prop_assume!(total <= m);
        let tol = Tolerances::default();
        let mut rng = sampling::rng(seed);
        let u = sampling::unitary(&mut rng, m);
        let v = canonical_subspace(m, &sig).unwrap().transform(&u).unwrap();
        let dec = decompose(&v, &tol);
        prop_assert_eq!(dec.factors.len(), sig.len());
        for (f, &(angle, dim)) in dec.factors.iter().zip(&sig) {
            prop_assert!((f.angle - angle).abs() < 1e-6);
            prop_assert_eq!(f.subspace.dim(), dim);
            // every vector of a factor has that factor's angle
            let x = sampling::unit_vector_in(&mut rng, f.subspace.basis());
            prop_assert!((oracle_angle(v.basis(), &x) - f.angle).abs() < 1e-6);
        }
        prop_assert!(dec.assemble(m).approx_eq(&v, 1e-8));
    }

    #[test]
    fn factors_have_orthogonal_complex_spans(m in 2usize..=5, k in 1usize..=6, seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = sampling::rng(seed);
        let k = k.min(2 * m);
        let v = RealSubspace::new(m, (0..k).map(|_| sampling::gaussian_vector(&mut rng, 2 * m)).collect()).unwrap();
        let dec = decompose(&v, &tol);
        prop_assert_eq!(dec.dim(), v.dim());
        for (i, f) in dec.factors.iter().enumerate() {
            for g in &dec.factors[i + 1..] {
                let cf = kahler::complex_span(&f.subspace);
                let cg = kahler::complex_span(&g.subspace);
                prop_assert!((cf.basis().transpose() * cg.basis()).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn congruence_under_unitary(m in 2usize..=5, k in 1usize..=5, seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = sampling::rng(seed);
        let k = k.min(2 * m);
        let v = RealSubspace::new(m, (0..k).map(|_| sampling::gaussian_vector(&mut rng, 2 * m)).collect()).unwrap();
        let a = sampling::unitary(&mut rng, m);
        let w = v.transform(&a).unwrap();
        let c = congruent(&v, &w, &tol).unwrap();
        prop_assert!(c.congruent);
        let x = c.witness.unwrap();
        prop_assert!((x.adjoint() * &x - DMatrix::identity(m, m)).norm() < 1e-9);
        let xr = realify_matrix(&x);
        for col in v.basis().column_iter() {
            prop_assert!(w.distance_ratio(&(&xr * col)) < 1e-9);
        }
    }

    #[test]
    fn normalizer_formula_matches_nullspace(m in 1usize..=4, k in 0usize..=8, seed in any::<u64>(), structured in any::<bool>()) {
        let tol = Tolerances::default();
        let mut rng = sampling::rng(seed);
        let v = if structured {
            let sigs = [vec![(0.0, 2)], vec![(FRAC_PI_2, m)], vec![(FRAC_PI_3, 2)], vec![]];
            let sig = &sigs[(seed % 4) as usize];
            match canonical_subspace(m, sig) { Ok(v) => v, Err(_) => RealSubspace::zero(m) }
        } else {
            let k = k.min(2 * m);
            RealSubspace::new(m, (0..k).map(|_| sampling::gaussian_vector(&mut rng, 2 * m)).collect()).unwrap()
        };
        let oracle = kahler::normalizer_algebra(&v, &tol).len();
        prop_assert_eq!(kahler::normalizer_dimension_formula(&v, &tol), oracle);
        prop_assert_eq!(oracle_normalizer_dim(m, v.basis()), oracle);
    }

    #[test]
    fn complement_inside_complex_span_has_same_angles(m in 2usize..=5, k in 1usize..=5, seed in any::<u64>()) {
        // CV ⊖ V has the same nonzero Kähler angles as V
        let tol = Tolerances::default();
        let mut rng = sampling::rng(seed);
        let k = k.min(2 * m - 1);
        let v = RealSubspace::new(m, (0..k).map(|_| sampling::gaussian_vector(&mut rng, 2 * m)).collect()).unwrap();
        let cv = kahler::complex_span(&v);
        let rest = kahler::ominus(&cv, &v, &tol).unwrap();
        let dv = decompose(&v, &tol);
        let dr = decompose(&rest, &tol);
        let a: Vec<f64> = dv.angles().into_iter().filter(|&x| x > 0.0).collect();
        let b: Vec<f64> = dr.angles().into_iter().filter(|&x| x > 0.0).collect();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-6);
        }
    }
}

#[test]
fn json_layout_of_decomposition() {
    let v = RealSubspace::new(2, vec![DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])]).unwrap();
    let dec = decompose(&v, &Tolerances::default());
    let json = serde_json::to_value(&dec).unwrap();
    assert_eq!(json["factors"][0]["subspace"]["ambient_complex_dim"], 2);
    assert!((json["factors"][0]["angle_rad"].as_f64().unwrap() - FRAC_PI_2).abs() < 1e-12);
}
