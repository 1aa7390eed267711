//! Identity suite for the `su(1,n)` and `AN` models, run by `chpolar selfcheck`.

use serde::{Deserialize, Serialize};

use crate::an_geometry::{self, ANVector};
use crate::error::Result;
use crate::linalg::C64;
use crate::sampling::{self, SeededRng};
use crate::su1n::{bracket_unchecked, theta, AlgElement, RootDecomposition, RootSpace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub n: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfcheckReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

struct Recorder {
    n: usize,
    checks: Vec<CheckResult>,
}

impl Recorder {
    fn record(&mut self, name: &str, max_residual: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            n: self.n,
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
        });
    }
}

fn random_in(rd: &RootDecomposition, rng: &mut SeededRng, basis: &[AlgElement]) -> AlgElement {
    let c = sampling::gaussian_vector(rng, basis.len());
    AlgElement::combination(rd.n(), c.as_slice(), basis)
}

fn random_an(n: usize, rng: &mut SeededRng) -> ANVector {
    ANVector::from_orthonormal_coords(&sampling::gaussian_vector(rng, 2 * n))
}

fn run_one(n: usize, samples: usize, rng: &mut SeededRng) -> Result<Vec<CheckResult>> {
    let rd = RootDecomposition::cached(n)?;
    let mut rec = Recorder { n, checks: Vec::new() };
    let alpha = rd.g_alpha_basis();

    rec.record("metric <B,B> = 1", (rd.inner(rd.b(), rd.b()) - 1.0).abs(), 1e-12);
    rec.record("metric <Z,Z> = 2", (rd.inner(rd.z(), rd.z()) - 2.0).abs(), 1e-12);
    let dims = [
        (RootSpace::Alpha, 2 * n - 2),
        (RootSpace::TwoAlpha, 1),
        (RootSpace::Zero, (n - 1) * (n - 1) + 1),
    ];
    let dim_err = dims.iter().map(|&(r, d)| rd.root_space_dim(r).abs_diff(d)).sum::<usize>();
    rec.record("root space dimensions", dim_err as f64, 0.0);

    let (mut lem_a, mut lem_b, mut j2, mut cx, mut eqv, mut skew) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = random_in(&rd, rng, alpha);
        let y = random_in(&rd, rng, alpha);
        let t = random_in(&rd, rng, rd.k0_basis());
        let jx = rd.j(&x)?;
        // [θX, Z] = −JX
        lem_a = lem_a.max((&bracket_unchecked(&theta(&x), rd.z()) + &jx).norm());
        // ⟨T, (1+θ)[θX, Y]⟩ = 2⟨[T, X], Y⟩
        let txy = bracket_unchecked(&theta(&x), &y);
        let lhs = rd.inner(&t, &(&txy + &theta(&txy)));
        let rhs = 2.0 * rd.inner(&bracket_unchecked(&t, &x), &y);
        lem_b = lem_b.max((lhs - rhs).abs());
        j2 = j2.max((&rd.j(&jx)? + &x).norm());
        // i(1−θ)U = (1−θ)JU on p
        let lhs = rd.tangent_coords(&(&x - &theta(&x))) * C64::new(0.0, 1.0);
        let rhs = rd.tangent_coords(&(&jx - &theta(&jx)));
        cx = cx.max((lhs - rhs).norm());
        // ½(1−θ): (a ⊕ n, AN) → (p, g) is an isometry
        let u = random_an(n, rng);
        let v = random_an(n, rng);
        let pu = (&u.to_alg(&rd) - &theta(&u.to_alg(&rd))).scale(0.5);
        let pv = (&v.to_alg(&rd) - &theta(&v.to_alg(&rd))).scale(0.5);
        eqv = eqv.max((rd.inner(&pu, &pv) - an_geometry::inner_an(&u, &v)).abs());
        // ⟨[X,Y],W⟩ = −⟨Y,[θX,W]⟩
        let g = random_in(&rd, rng, rd.basis());
        let h = random_in(&rd, rng, rd.basis());
        let w = random_in(&rd, rng, rd.basis());
        let l = rd.inner(&bracket_unchecked(&g, &h), &w);
        let r = rd.inner(&h, &bracket_unchecked(&theta(&g), &w));
        skew = skew.max((l + r).abs() / (1.0 + l.abs()));
    }
    let two_ib = rd.tangent_coords(&rd.b().scale(2.0)) * C64::new(0.0, 1.0);
    cx = cx.max((two_ib - rd.tangent_coords(&(rd.z() - &theta(rd.z())))).norm());
    rec.record("[theta X, Z] = -JX", lem_a, 1e-10);
    rec.record("<T,(1+theta)[theta X,Y]> = 2<[T,X],Y>", lem_b, 1e-10);
    rec.record("J^2 = -1 on g_alpha", j2, 1e-10);
    rec.record("complex structure on p: 2iB = (1-theta)Z, i(1-theta)U = (1-theta)JU", cx, 1e-10);
    rec.record("(1-theta)/2 is an isometry a+n -> p", eqv, 1e-10);
    rec.record("<ad(X)Y,W> = -<Y,ad(theta X)W>", skew, 1e-10);

    let (mut br, mut tors, mut metric, mut hol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = random_an(n, rng);
        let y = random_an(n, rng);
        let w = random_an(n, rng);
        let lhs = an_geometry::an_bracket(&x, &y)?.to_alg(&rd);
        br = br.max((&lhs - &bracket_unchecked(&x.to_alg(&rd), &y.to_alg(&rd))).norm());
        let t = an_geometry::levi_civita(&x, &y)?
            .sub(&an_geometry::levi_civita(&y, &x)?)
            .sub(&an_geometry::an_bracket(&x, &y)?);
        tors = tors.max(t.norm());
        let m = an_geometry::inner_an(&an_geometry::levi_civita(&x, &y)?, &w)
            + an_geometry::inner_an(&y, &an_geometry::levi_civita(&x, &w)?);
        metric = metric.max(m.abs());
        hol = hol.max((an_geometry::holomorphic_sectional_curvature(&x)? + 1.0).abs());
    }
    rec.record("a+n bracket formula matches matrix commutator", br, 1e-10);
    rec.record("Levi-Civita torsion-free", tors, 1e-10);
    rec.record("Levi-Civita metric-compatible", metric, 1e-10);
    rec.record("holomorphic sectional curvature = -1", hol, 1e-7);
    Ok(rec.checks)
}

/// Runs the identity suite for each `n` with `samples` random inputs per identity.
pub fn run_selfcheck(ns: &[usize], samples: usize, seed: u64) -> Result<SelfcheckReport> {
    let mut rng = sampling::rng(seed);
    let mut checks = Vec::new();
    for &n in ns {
        checks.extend(run_one(n, samples, &mut rng)?);
    }
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(SelfcheckReport { checks, all_passed })
}
