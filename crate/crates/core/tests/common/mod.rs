//! Shared catalog of polar actions for the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use chpolar::kahler::{canonical_subspace, RealSubspace};
use chpolar::linalg::{realify_matrix, C64};
use chpolar::su1n::{AlgElement, RootDecomposition};
use chpolar::polar::{BFlag, PolarActionSpec, QChoice};
use chpolar::Tolerances;
use nalgebra::{DMatrix, DVector};

pub fn diagonal_torus(m: usize) -> Vec<DMatrix<C64>> {
    (0..m)
        .map(|j| {
            let mut d = DMatrix::zeros(m, m);
            d[(j, j)] = C64::new(0.0, 1.0);
            d
        })
        .collect()
}

pub fn real_axes(m: usize, from: usize) -> RealSubspace {
    let v = (from..m).map(|j| DVector::from_fn(2 * m, |i, _| if i == 2 * j { 1.0 } else { 0.0 })).collect();
    RealSubspace::new(m, v).unwrap()
}

fn ii(n: usize, b: BFlag, sig: &[(f64, usize)]) -> PolarActionSpec {
    let w = canonical_subspace(n - 1, sig).unwrap();
    PolarActionSpec::canonical_family_ii(n, b, w, &Tolerances::default()).unwrap()
}

/// Polar actions from both families, with a short description each.
pub fn catalog() -> Vec<(&'static str, PolarActionSpec)> {
    use BFlag::{Full, Zero};
    let i = |n, k, c| PolarActionSpec::canonical_family_i(n, k, c).unwrap();
    let mixed = [(0.0, 2), (FRAC_PI_3, 2), (FRAC_PI_2, 1)];
    vec![
        ("I n=2 k=0 U(2)", i(2, 0, QChoice::Unitary)),
        ("I n=2 k=1 T^1", i(2, 1, QChoice::Torus)),
        ("I n=2 k=2", i(2, 2, QChoice::Trivial)),
        ("I n=3 k=0 T^3", i(3, 0, QChoice::Torus)),
        ("I n=3 k=1 U(2)", i(3, 1, QChoice::Unitary)),
        ("I n=4 k=2 T^2", i(4, 2, QChoice::Torus)),
        ("I n=4 k=4", i(4, 4, QChoice::Trivial)),
        ("II n=2 b=0 w=0", ii(2, Zero, &[])),
        ("II n=2 b=0 w=C", ii(2, Zero, &[(0.0, 2)])),
        ("II n=3 b=a w=0", ii(3, Full, &[])),
        ("II n=3 b=0 w totally real", ii(3, Zero, &[(FRAC_PI_2, 2)])),
        ("II n=3 b=a w angle pi/3", ii(3, Full, &[(FRAC_PI_3, 2)])),
        ("II n=4 b=0 w angle pi/3", ii(4, Zero, &[(FRAC_PI_3, 2)])),
        ("II n=4 b=a w=C+R", ii(4, Full, &[(0.0, 2), (FRAC_PI_2, 1)])),
        ("II n=5 b=a w mixed", ii(5, Full, &mixed)),
        ("II n=5 b=0 w mixed", ii(5, Zero, &mixed)),
        (
            "II n=3 b=0 w=0 torus",
            PolarActionSpec::family_ii(3, Zero, RealSubspace::zero(2), diagonal_torus(2), real_axes(2, 0)),
        ),
    ]
}

/// Kähler angle of `v` in span(gens), by least squares on the raw generators.
pub fn oracle_angle(gens: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    let jv = DVector::from_fn(v.len(), |i, _| if i % 2 == 0 { -v[i + 1] } else { v[i - 1] });
    let x = gens.clone().svd(true, true).solve(&jv, 1e-12).unwrap();
    ((gens * x).norm() / v.norm()).clamp(0.0, 1.0).acos()
}

/// `dim {T ∈ u(m) : T V ⊆ V}` from a hand-built `u(m)` basis and an SVD rank.
pub fn oracle_normalizer_dim(m: usize, gens: &DMatrix<f64>) -> usize {
    let realify = |t: &DMatrix<C64>| {
        DMatrix::from_fn(2 * m, 2 * m, |i, j| {
            let z = t[(i / 2, j / 2)];
            match (i % 2, j % 2) {
                (0, 0) | (1, 1) => z.re,
                (1, 0) => z.im,
                _ => -z.im,
            }
        })
    };
    let mut basis = Vec::new();
    for j in 0..m {
        for k in j..m {
            let mut a = DMatrix::zeros(m, m);
            let mut b = DMatrix::zeros(m, m);
            if j == k {
                a[(j, j)] = C64::new(0.0, 1.0);
                basis.push(a);
            } else {
                a[(j, k)] = C64::new(1.0, 0.0);
                a[(k, j)] = C64::new(-1.0, 0.0);
                b[(j, k)] = C64::new(0.0, 1.0);
                b[(k, j)] = C64::new(0.0, 1.0);
                basis.push(a);
                basis.push(b);
            }
        }
    }
    if gens.ncols() == 0 {
        return basis.len();
    }
    let svd = gens.clone().svd(true, false);
    let u = svd.u.unwrap();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-9).collect();
    let q = DMatrix::from_fn(2 * m, keep.len(), |i, j| u[(i, keep[j])]);
    let off = DMatrix::identity(2 * m, 2 * m) - &q * q.transpose();
    let cols: Vec<DVector<f64>> = basis
        .iter()
        .map(|t| {
            let img = &off * realify(t) * &q;
            DVector::from_column_slice(img.as_slice())
        })
        .collect();
    if cols.is_empty() || q.ncols() == 0 {
        return basis.len();
    }
    let mut c = DMatrix::from_columns(&cols);
    if c.nrows() < c.ncols() {
        let cols = c.ncols();
        c = c.resize_vertically(cols, 0.0);
    }
    basis.len() - c.rank(1e-8)
}

/// Isotropy dimension as `dim q − rank` of the realified action on `ξ`.
pub fn isotropy_oracle(rd: &RootDecomposition, q: &[AlgElement], xi: &DVector<f64>) -> usize {
    let k = q.len();
    // independent generators only
    let flat = DMatrix::from_columns(&q.iter().map(|t| rd.coords(t)).collect::<Vec<_>>());
    let qdim = flat.rank(1e-9);
    let cols: Vec<DVector<f64>> = q.iter().map(|t| realify_matrix(&rd.k0_to_unitary(t)) * xi).collect();
    let act = DMatrix::from_columns(&cols);
    // kernel of the action restricted to span(q) = dim span(q) − rank of the action on it
    let s = flat.clone().svd(true, true);
    let keep: Vec<usize> = (0..k).filter(|&i| s.singular_values[i] > 1e-9).collect();
    let vt = s.v_t.unwrap();
    let coeffs = DMatrix::from_fn(k, keep.len(), |i, j| vt[(keep[j], i)]);
    let r = (&act * coeffs).rank(1e-9 * xi.norm().max(1.0));
    qdim - r
}

