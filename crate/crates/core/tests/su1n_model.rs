use chpolar::linalg::{self, C64};
use chpolar::sampling::{self, SeededRng};
use chpolar::su1n::{bracket, inner, k_part, p_part, theta, AlgElement, RootDecomposition, RootSpace};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn random_in(n: usize, rng: &mut SeededRng, basis: &[AlgElement]) -> AlgElement {
    let c = sampling::gaussian_vector(rng, basis.len());
    AlgElement::combination(n, c.as_slice(), basis)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn theta_is_an_involutive_automorphism(n in 2usize..=5, seed in any::<u64>()) {
        let rd = RootDecomposition::cached(n).unwrap();
        let mut rng = sampling::rng(seed);
        let x = random_in(n, &mut rng, rd.basis());
        let y = random_in(n, &mut rng, rd.basis());
        let lhs = bracket(&theta(&x), &theta(&y)).unwrap();
        let rhs = theta(&bracket(&x, &y).unwrap());
        prop_assert!((&lhs - &rhs).norm() < 1e-10);
        prop_assert!((&theta(&theta(&x)) - &x).norm() < 1e-14);
        prop_assert!((&(&k_part(&x) + &p_part(&x)) - &x).norm() < 1e-14);
        prop_assert!(inner(&k_part(&x), &p_part(&x)).unwrap().abs() < 1e-12);
        // everything produced stays inside su(1,n)
        prop_assert!(AlgElement::new(n, bracket(&x, &y).unwrap().matrix().clone()).is_ok());
    }

    #[test]
    fn jacobi_identity(n in 2usize..=4, seed in any::<u64>()) {
        let rd = RootDecomposition::cached(n).unwrap();
        let mut rng = sampling::rng(seed);
        let x = random_in(n, &mut rng, rd.basis());
        let y = random_in(n, &mut rng, rd.basis());
        let z = random_in(n, &mut rng, rd.basis());
        let b = |a: &AlgElement, c: &AlgElement| bracket(a, c).unwrap();
        let s = &(&b(&x, &b(&y, &z)) + &b(&y, &b(&z, &x))) + &b(&z, &b(&x, &y));
        prop_assert!(s.norm() < 1e-10);
    }

    #[test]
    fn structure_identities_on_g_alpha(n in 2usize..=5, seed in any::<u64>()) {
        let rd = RootDecomposition::cached(n).unwrap();
        let mut rng = sampling::rng(seed);
        let x = random_in(n, &mut rng, rd.g_alpha_basis());
        let y = random_in(n, &mut rng, rd.g_alpha_basis());
        let t = random_in(n, &mut rng, rd.k0_basis());
        let jx = rd.j(&x).unwrap();
        prop_assert!((&bracket(&theta(&x), rd.z()).unwrap() + &jx).norm() < 1e-10);
        let txy = bracket(&theta(&x), &y).unwrap();
        let lhs = rd.inner(&t, &(&txy + &theta(&txy)));
        let rhs = 2.0 * rd.inner(&bracket(&t, &x).unwrap(), &y);
        prop_assert!((lhs - rhs).abs() < 1e-10);
        // [X, Y] = ½⟨JX, Y⟩ Z
        let xy = bracket(&x, &y).unwrap();
        prop_assert!((&xy - &rd.z().scale(0.5 * rd.inner(&jx, &y))).norm() < 1e-10);
        // J is an isometry commuting with k_0
        prop_assert!((rd.inner(&jx, &jx) - rd.inner(&x, &x)).abs() < 1e-10);
        let tjx = bracket(&t, &jx).unwrap();
        let jtx = rd.j(&bracket(&t, &x).unwrap()).unwrap();
        prop_assert!((&tjx - &jtx).norm() < 1e-10);
    }

    #[test]
    fn adjoint_exponential_two_routes(n in 2usize..=4, seed in any::<u64>(), scale in 0.01f64..1.0) {
        let rd = RootDecomposition::cached(n).unwrap();
        let mut rng = sampling::rng(seed);
        let x = random_in(n, &mut rng, rd.basis()).normalized().scale(scale);
        let y = random_in(n, &mut rng, rd.basis());
        let a = rd.element(&(rd.ad_exp(&x) * rd.coords(&y)));
        let b = rd.ad_exp_conjugation(&x, &y);
        prop_assert!((&a - &b).norm() < 1e-9 * (1.0 + y.norm()));
    }

    #[test]
    fn k0_acts_by_skew_hermitian_matrices(n in 2usize..=5, seed in any::<u64>()) {
        let rd = RootDecomposition::cached(n).unwrap();
        let mut rng = sampling::rng(seed);
        let t = random_in(n, &mut rng, rd.k0_basis());
        let u = rd.k0_to_unitary(&t);
        prop_assert!(linalg::cnorm(&(u.adjoint() + &u)) < 1e-10);
        // matches the action on coordinates
        let xi = sampling::gaussian_vector(&mut rng, 2 * (n - 1));
        let x = rd.alpha_vector(&xi).unwrap();
        let image = rd.alpha_coords(&bracket(&t, &x).unwrap());
        prop_assert!((image - linalg::realify_matrix(&u) * xi).norm() < 1e-10);
        let back = rd.k0_from_unitary(&u).unwrap();
        prop_assert!((&back - &t).norm() < 1e-9);
    }
}

#[test]
fn root_space_dimensions() {
    for n in [2, 3, 5] {
        let rd = RootDecomposition::cached(n).unwrap();
        assert_eq!(rd.root_space_dim(RootSpace::Alpha), 2 * n - 2);
        assert_eq!(rd.root_space_dim(RootSpace::MinusAlpha), 2 * n - 2);
        assert_eq!(rd.root_space_dim(RootSpace::TwoAlpha), 1);
        assert_eq!(rd.k0_basis().len(), (n - 1) * (n - 1));
        assert!((rd.inner(rd.b(), rd.b()) - 1.0).abs() < 1e-12);
        assert!((rd.inner(rd.z(), rd.z()) - 2.0).abs() < 1e-12);
        assert!((rd.metric_scale() - 2.0).abs() < 1e-14);
    }
}

#[test]
fn ad_b_acts_by_root_eigenvalues() {
    let rd = RootDecomposition::cached(3).unwrap();
    for r in RootSpace::ALL {
        for x in rd.root_space_basis(r) {
            let bx = bracket(rd.b(), &x).unwrap();
            assert!((&bx - &x.scale(r.eigenvalue())).norm() < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn tangent_model_of_p() {
    let rd = RootDecomposition::cached(3).unwrap();
    let z = DVector::from_vec(vec![C64::new(0.5, -1.0), C64::new(0.0, 2.0), C64::new(1.0, 0.0)]);
    let x = rd.tangent_vector(&z).unwrap();
    assert!((&p_part(&x) - &x).norm() < 1e-15);
    assert_eq!(rd.tangent_coords(&x), z);
    // ⟨X, X⟩ = 4|z|² in the matrix model
    let z2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    assert!((rd.inner(&x, &x) - 4.0 * z2).abs() < 1e-12);
}

#[test]
fn membership_errors() {
    let bad = DMatrix::from_element(4, 4, C64::new(1.0, 0.0));
    assert!(AlgElement::new(3, bad).is_err());
    let rd2 = RootDecomposition::cached(2).unwrap();
    let rd3 = RootDecomposition::cached(3).unwrap();
    assert!(bracket(rd2.b(), rd3.b()).is_err());
    assert!(inner(rd2.b(), rd3.b()).is_err());
    assert!(rd3.j(rd3.b()).is_err());
    assert!(RootDecomposition::build(1).is_err());
}
