//! Polar actions on `CH^n`: the two constructive families, a numerical polarity
//! criterion, regular vectors, orbit-equivalence invariants and a small moduli catalog.
//!
//! * Family I: `h = q ⊕ so(1,k)` with `q ⊆ u(n−k)` acting on the last `n−k`
//!   coordinates and `so(1,k)` the real matrices of the upper-left block.
//! * Family II: `h = q ⊕ b ⊕ w ⊕ g_{2α}` with `b ∈ {0, a}`, `w ⊆ g_α` and
//!   `q ⊆ k_0 ≅ u(n−1)` normalizing `w`, section `(a ⊖ b) ⊕ (1−θ)s`.
//!
//! The criterion ([`check_polarity`]) checks that the section lies in the normal
//! space of `H·o`, that `h ⊥ T_oΣ ⊕ [T_oΣ, T_oΣ]`, and that `T_oΣ` is a section of
//! the slice representation in the weak sense: `[h_o, Σ] ⊥ Σ` and
//! `Σ ⊕ [h_o, ξ]` fills the normal space at a sampled `ξ`. The last check is
//! necessary but is not a classification-based certificate, so the report keeps
//! `verdict` apart from `certified_by_construction`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::kahler::{self, canonical_subspace, decompose, normalizer_algebra, RealSubspace};
use crate::linalg::{self, complexify, null_space, orthonormalize, rank, realify_matrix, C64};
use crate::sampling;
use crate::su1n::{bracket_unchecked, p_part, theta, AlgElement, RootDecomposition};
use crate::Tolerances;

/// Number of random vectors used for rank maximisation.
pub const DEFAULT_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    I,
    II,
}

/// `b = 0` or `b = a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BFlag {
    Zero,
    Full,
}

/// Input data of a polar action of one of the two families.
///
/// `q_basis` holds skew-Hermitian matrices acting on `C^{n−k}` (family I) or on
/// `g_α ≅ C^{n−1}` (family II). `q_section` lives in the same space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarActionSpec {
    pub n: usize,
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<BFlag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<RealSubspace>,
    #[serde(with = "linalg::complex_matrices_serde")]
    pub q_basis: Vec<DMatrix<C64>>,
    pub q_section: RealSubspace,
    #[serde(default)]
    pub seed: u64,
}

/// Choices of `Q ⊆ U(m)` used for family I in the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QChoice {
    /// `Q = {1}`; only polar on `C^0`.
    Trivial,
    /// `Q = U(m)`, section `R e₁`.
    Unitary,
    /// Diagonal torus `T^m`, section `R^m`.
    Torus,
}

fn e_real(m: usize, j: usize) -> DVector<f64> {
    DVector::from_fn(2 * m, |i, _| if i == 2 * j { 1.0 } else { 0.0 })
}

fn torus_basis(m: usize) -> Vec<DMatrix<C64>> {
    (0..m)
        .map(|j| {
            let mut d = DMatrix::zeros(m, m);
            d[(j, j)] = C64::new(0.0, 1.0);
            d
        })
        .collect()
}

/// One line from each factor of the Kähler decomposition of `w⊥`.
pub fn canonical_section(w: &RealSubspace, tol: &Tolerances) -> RealSubspace {
    let comp = kahler::orthogonal_complement(w);
    let lines: Vec<DVector<f64>> = decompose(&comp, tol)
        .factors
        .iter()
        .map(|f| f.subspace.basis().column(0).into_owned())
        .collect();
    RealSubspace::new(w.ambient_complex_dim(), lines).expect("dimensions agree")
}

impl PolarActionSpec {
    pub fn family_i(n: usize, k: usize, q_basis: Vec<DMatrix<C64>>, q_section: RealSubspace) -> Self {
        Self { n, family: Family::I, k: Some(k), b: None, w: None, q_basis, q_section, seed: 0 }
    }

    pub fn family_ii(n: usize, b: BFlag, w: RealSubspace, q_basis: Vec<DMatrix<C64>>, q_section: RealSubspace) -> Self {
        Self { n, family: Family::II, k: None, b: Some(b), w: Some(w), q_basis, q_section, seed: 0 }
    }

    /// Family I with `Q` from the fixed table.
    pub fn canonical_family_i(n: usize, k: usize, choice: QChoice) -> Result<Self> {
        if k > n {
            return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
        }
        let m = n - k;
        let (q, s) = match choice {
            QChoice::Trivial if m == 0 => (Vec::new(), RealSubspace::zero(0)),
            QChoice::Trivial => return Err(Error::domain("the trivial group is not polar on C^m for m ≥ 1")),
            QChoice::Unitary => (linalg::unitary_algebra_basis(m), RealSubspace::new(m, vec![e_real(m, 0)])?),
            QChoice::Torus => (torus_basis(m), RealSubspace::new(m, (0..m).map(|j| e_real(m, j)).collect())?),
        };
        Ok(Self::family_i(n, k, q, s))
    }

    /// Family II with `q` the full normalizer of `w` in `k_0` and the section of
    /// [`canonical_section`].
    pub fn canonical_family_ii(n: usize, b: BFlag, w: RealSubspace, tol: &Tolerances) -> Result<Self> {
        ensure_dim(n - 1, w.ambient_complex_dim())?;
        let q = normalizer_algebra(&w, tol);
        let s = canonical_section(&w, tol);
        Ok(Self::family_ii(n, b, w, q, s))
    }

    /// Complex dimension of the space `q` acts on.
    pub fn q_module_dim(&self) -> usize {
        match self.family {
            Family::I => self.n - self.k.unwrap_or(0),
            Family::II => self.n - 1,
        }
    }

    /// Structural checks; see the module docs for which failures are preconditions.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain("n must be at least 2"));
        }
        match self.family {
            Family::I => {
                let k = self.k.ok_or_else(|| Error::domain("family I needs k"))?;
                if k > self.n {
                    return Err(Error::domain(format!("k = {k} exceeds n = {}", self.n)));
                }
                if self.b.is_some() || self.w.is_some() {
                    return Err(Error::domain("family I takes no b or w"));
                }
            }
            Family::II => {
                if self.k.is_some() {
                    return Err(Error::domain("family II takes no k"));
                }
                self.b.ok_or_else(|| Error::domain("family II needs b"))?;
                let w = self.w.as_ref().ok_or_else(|| Error::domain("family II needs w"))?;
                ensure_dim(self.n - 1, w.ambient_complex_dim())?;
            }
        }
        let m = self.q_module_dim();
        for t in &self.q_basis {
            ensure_dim(m, t.nrows())?;
            ensure_dim(m, t.ncols())?;
            if linalg::cnorm(&(t.adjoint() + t)) > tol.member * linalg::cnorm(t).max(1.0) {
                return Err(Error::domain("q_basis entries must be skew-Hermitian"));
            }
        }
        ensure_dim(m, self.q_section.ambient_complex_dim())?;
        let q = linalg::orthonormal_matrix_span(&self.q_basis, m, m, 1e-9);
        if linalg::closure_residual(&q) > tol.residual {
            return Err(Error::precondition("q is not closed under the bracket"));
        }
        if let Some(w) = &self.w {
            let wp = w.projector();
            let off = DMatrix::identity(2 * m, 2 * m) - &wp;
            for t in &q {
                let leak = (&off * realify_matrix(t) * w.basis()).norm();
                if leak > tol.residual.max(tol.member) {
                    return Err(Error::precondition("q does not normalize w: [q, w] ⊄ w"));
                }
            }
            if (w.basis().transpose() * self.q_section.basis()).norm() > tol.member {
                return Err(Error::precondition("section s must be orthogonal to w"));
            }
        }
        Ok(())
    }

    /// Whether the spec is one of the constructions known to be polar: a table entry for
    /// family I, or the full normalizer of `w` with one section line per factor of `w⊥`.
    pub fn certified_by_construction(&self, tol: &Tolerances) -> bool {
        let m = self.q_module_dim();
        let q = linalg::orthonormal_matrix_span(&self.q_basis, m, m, 1e-9);
        let same_span = |other: &[DMatrix<C64>]| {
            let other = linalg::orthonormal_matrix_span(other, m, m, 1e-9);
            other.len() == q.len() && other.iter().all(|t| linalg::matrix_span_residual(&q, t) <= tol.member)
        };
        let s = &self.q_section;
        match self.family {
            Family::I => {
                if m == 0 {
                    return true;
                }
                if same_span(&linalg::unitary_algebra_basis(m)) {
                    return s.dim() == 1;
                }
                let real = RealSubspace::new(m, (0..m).map(|j| e_real(m, j)).collect()).expect("dims");
                same_span(&torus_basis(m)) && s.approx_eq(&real, tol.member)
            }
            Family::II => {
                let Some(w) = &self.w else { return false };
                if !same_span(&normalizer_algebra(w, tol)) {
                    return false;
                }
                let factors = decompose(&kahler::orthogonal_complement(w), tol).factors;
                if s.dim() != factors.len() {
                    return false;
                }
                let mut covered = 0;
                for f in &factors {
                    let both = RealSubspace::sum(&[s, &f.subspace]).expect("dims");
                    let meet = s.dim() + f.subspace.dim() - both.dim();
                    if meet != 1 {
                        return false;
                    }
                    covered += meet;
                }
                covered == s.dim()
            }
        }
    }

    /// Short human-readable description.
    pub fn label(&self, tol: &Tolerances) -> String {
        match self.family {
            Family::I => format!("I k={} dim q={} dim s={}", self.k.unwrap_or(0), self.q_basis.len(), self.q_section.dim()),
            Family::II => {
                let b = match self.b {
                    Some(BFlag::Full) => "a",
                    _ => "0",
                };
                let sig = self
                    .w
                    .as_ref()
                    .map(|w| {
                        decompose(w, tol)
                            .signature()
                            .iter()
                            .map(|(a, d)| format!("{:.4}:{d}", a))
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .unwrap_or_default();
                format!("II b={b} w=[{sig}] dim q={}", self.q_basis.len())
            }
        }
    }
}

/// Subalgebra `h` and section tangent `T_oΣ ⊆ p`.
#[derive(Clone, Debug)]
pub struct BuiltAction {
    pub h: Vec<AlgElement>,
    pub section: Vec<AlgElement>,
}

fn embed_q_family_i(rd: &RootDecomposition, k: usize, t: &DMatrix<C64>) -> AlgElement {
    let n = rd.n();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((k + 1, k + 1), (n - k, n - k)).copy_from(t);
    let shift = t.trace() / C64::new((n + 1) as f64, 0.0);
    for i in 0..=n {
        m[(i, i)] -= shift;
    }
    AlgElement::from_matrix_unchecked(n, m)
}

fn closure_residual_alg(rd: &RootDecomposition, basis: &[AlgElement]) -> f64 {
    let coords: Vec<DVector<f64>> = basis.iter().map(|x| rd.coords(x)).collect();
    let h = linalg::columns_to_matrix(&coords, rd.dim());
    let mut worst: f64 = 0.0;
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i + 1..] {
            let c = rd.coords(&bracket_unchecked(x, y));
            let r = &c - &h * (h.transpose() * &c);
            worst = worst.max(r.norm());
        }
    }
    worst
}

/// `h = q ⊕ so(1,k)` and `T_oΣ = ℓ ⊕ s`, `ℓ = R·(z₁ = i)` for `k ≥ 1`.
pub fn build_family_i(
    rd: &RootDecomposition,
    k: usize,
    q_basis: &[DMatrix<C64>],
    q_section: &RealSubspace,
    tol: &Tolerances,
) -> Result<BuiltAction> {
    let n = rd.n();
    let spec = PolarActionSpec::family_i(n, k, q_basis.to_vec(), q_section.clone());
    spec.validate(tol)?;
    let one = C64::new(1.0, 0.0);
    let mut h = Vec::new();
    for j in 1..=k {
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m[(0, j)] = one;
        m[(j, 0)] = one;
        h.push(AlgElement::from_matrix_unchecked(n, m));
    }
    for i in 1..=k {
        for j in i + 1..=k {
            let mut m = DMatrix::zeros(n + 1, n + 1);
            m[(i, j)] = one;
            m[(j, i)] = -one;
            h.push(AlgElement::from_matrix_unchecked(n, m));
        }
    }
    h.extend(q_basis.iter().map(|t| embed_q_family_i(rd, k, t)));
    let h = rd.orthonormalize(&h);
    let res = closure_residual_alg(rd, &h);
    if res > tol.residual {
        return Err(Error::consistency(format!("h is not a subalgebra (residual {res:.3e})")));
    }

    let mut section = Vec::new();
    if k >= 1 {
        let mut z = DVector::zeros(n);
        z[0] = C64::new(0.0, 1.0);
        section.push(rd.tangent_vector(&z)?);
    }
    for v in q_section.basis_vectors() {
        let c = complexify(&v);
        let mut z = DVector::zeros(n);
        z.rows_mut(k, n - k).copy_from(&c);
        section.push(rd.tangent_vector(&z)?);
    }
    Ok(BuiltAction { h, section: rd.orthonormalize(&section) })
}

/// `h = q ⊕ b ⊕ w ⊕ g_{2α}` and `T_oΣ = (a ⊖ b) ⊕ (1−θ)s`.
pub fn build_family_ii(
    rd: &RootDecomposition,
    b: BFlag,
    w: &RealSubspace,
    q_basis: &[DMatrix<C64>],
    q_section: &RealSubspace,
    tol: &Tolerances,
) -> Result<BuiltAction> {
    let n = rd.n();
    let spec = PolarActionSpec::family_ii(n, b, w.clone(), q_basis.to_vec(), q_section.clone());
    spec.validate(tol)?;
    let mut h = Vec::new();
    for t in q_basis {
        h.push(rd.k0_from_unitary(t)?);
    }
    if b == BFlag::Full {
        h.push(rd.b().clone());
    }
    for v in w.basis_vectors() {
        h.push(rd.alpha_vector(&v)?);
    }
    h.push(rd.z().clone());
    let h = rd.orthonormalize(&h);
    let res = closure_residual_alg(rd, &h);
    if res > tol.residual {
        return Err(Error::consistency(format!("h is not a subalgebra (residual {res:.3e})")));
    }

    let mut section = Vec::new();
    if b == BFlag::Zero {
        section.push(rd.b().clone());
    }
    for v in q_section.basis_vectors() {
        let xi = rd.alpha_vector(&v)?;
        section.push(&xi - &theta(&xi));
    }
    Ok(BuiltAction { h, section: rd.orthonormalize(&section) })
}

impl PolarActionSpec {
    pub fn build(&self, rd: &RootDecomposition, tol: &Tolerances) -> Result<BuiltAction> {
        ensure_dim(self.n, rd.n())?;
        match self.family {
            Family::I => build_family_i(rd, self.k.unwrap_or(0), &self.q_basis, &self.q_section, tol),
            Family::II => {
                let w = self.w.as_ref().ok_or_else(|| Error::domain("family II needs w"))?;
                let b = self.b.ok_or_else(|| Error::domain("family II needs b"))?;
                build_family_ii(rd, b, w, &self.q_basis, &self.q_section, tol)
            }
        }
    }
}

/// Outcome of [`check_polarity`]. Residuals are absolute values for orthonormal inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarityReport {
    pub is_subalgebra: bool,
    pub closure_residual: f64,
    pub h_dim: usize,
    /// `dim H·o = dim proj_p(h)`.
    pub orbit_dim: usize,
    pub normal_dim: usize,
    pub section_dim: usize,
    pub isotropy_dim: usize,
    pub section_in_normal: bool,
    pub section_normal_residual: f64,
    pub bracket_condition: bool,
    pub bracket_residual: f64,
    pub slice_condition: bool,
    pub slice_orthogonality_residual: f64,
    /// Largest `dim(Σ ⊕ [h_o, ξ])` over sampled `ξ ∈ Σ`.
    pub slice_dimension_achieved: usize,
    pub cohomogeneity: usize,
    /// `H` is transitive on `CH^n`; the empty section is accepted vacuously.
    pub transitive: bool,
    pub verdict: bool,
    /// Set when the input came from a construction known to be polar.
    pub certified_by_construction: bool,
    pub samples: usize,
    pub seed: u64,
}

fn coords_matrix(rd: &RootDecomposition, elems: &[AlgElement]) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = elems.iter().map(|x| rd.coords(x)).collect();
    linalg::columns_to_matrix(&cols, rd.dim())
}

/// Numerical polarity criterion for the connected subgroup with Lie algebra `h`
/// and candidate section tangent `section ⊆ p`.
pub fn check_polarity(
    rd: &RootDecomposition,
    h: &[AlgElement],
    section: &[AlgElement],
    tol: &Tolerances,
    samples: usize,
    seed: u64,
) -> Result<PolarityReport> {
    for x in h.iter().chain(section) {
        ensure_dim(rd.n(), x.n())?;
    }
    let h = rd.orthonormalize(h);
    let closure = closure_residual_alg(rd, &h);
    if closure > tol.residual {
        return Err(Error::precondition(format!("h is not a subalgebra (residual {closure:.3e})")));
    }
    let sigma = rd.orthonormalize(section);
    for s in &sigma {
        if (&p_part(s) - s).norm() > tol.member {
            return Err(Error::domain("section tangent must lie in p"));
        }
    }
    let hm = coords_matrix(rd, &h);
    let sm = coords_matrix(rd, &sigma);
    let p_parts: Vec<DVector<f64>> = h.iter().map(|x| rd.coords(&p_part(x))).collect();
    let pm = linalg::columns_to_matrix(&p_parts, rd.dim());
    let hp = linalg::column_space(&pm, tol.rank);
    let orbit_dim = hp.ncols();
    let mut pool = linalg::matrix_columns(&hp);
    pool.extend(rd.p_basis().iter().map(|x| rd.coords(x)));
    let all = orthonormalize(pool, rd.dim(), 1e-8);
    let nu = all.columns(orbit_dim, all.ncols() - orbit_dim).into_owned();
    let normal_dim = nu.ncols();

    let section_normal_residual = (hp.transpose() * &sm).iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let section_in_normal = section_normal_residual <= tol.member;

    let mut bracket_residual = (hm.transpose() * &sm).iter().fold(0.0f64, |a, x| a.max(x.abs()));
    for (i, x) in sigma.iter().enumerate() {
        for y in &sigma[i + 1..] {
            let c = rd.coords(&bracket_unchecked(x, y));
            bracket_residual = bracket_residual.max((hm.transpose() * c).amax());
        }
    }
    let bracket_condition = bracket_residual <= tol.residual;

    // h_o = h ∩ k
    let ho_coeffs = null_space(&pm, tol.rank);
    let h_o: Vec<AlgElement> = ho_coeffs
        .column_iter()
        .map(|c| AlgElement::combination(rd.n(), c.as_slice(), &h))
        .collect();
    let h_o = rd.orthonormalize(&h_o);

    let mut slice_orth: f64 = 0.0;
    for t in &h_o {
        for s in &sigma {
            let c = rd.coords(&bracket_unchecked(t, s));
            slice_orth = slice_orth.max((sm.transpose() * c).amax());
        }
    }

    let mut rng = sampling::rng(seed);
    let orbit_directions = |xi: &AlgElement| -> DMatrix<f64> { coords_matrix(rd, &h_o.iter().map(|t| bracket_unchecked(t, xi)).collect::<Vec<_>>()) };
    let mut achieved = 0;
    if sigma.is_empty() {
        achieved = 0;
    } else {
        for _ in 0..samples.max(1) {
            let c = sampling::unit_vector(&mut rng, sigma.len());
            let xi = AlgElement::combination(rd.n(), c.as_slice(), &sigma);
            let dirs = orbit_directions(&xi);
            let mut cols = linalg::matrix_columns(&sm);
            cols.extend(linalg::matrix_columns(&dirs));
            achieved = achieved.max(rank(&linalg::columns_to_matrix(&cols, rd.dim()), tol.rank));
        }
    }
    let slice_condition = slice_orth <= tol.residual && achieved == normal_dim;

    let mut principal = 0;
    if normal_dim > 0 && !h_o.is_empty() {
        for _ in 0..samples.max(1) {
            let c = sampling::unit_vector_in(&mut rng, &nu);
            let xi = rd.element(&c);
            principal = principal.max(rank(&orbit_directions(&xi), tol.rank));
        }
    }
    let cohomogeneity = normal_dim - principal;
    let transitive = normal_dim == 0;

    Ok(PolarityReport {
        is_subalgebra: true,
        closure_residual: closure,
        h_dim: h.len(),
        orbit_dim,
        normal_dim,
        section_dim: sigma.len(),
        isotropy_dim: h_o.len(),
        section_in_normal,
        section_normal_residual,
        bracket_condition,
        bracket_residual,
        slice_condition,
        slice_orthogonality_residual: slice_orth,
        slice_dimension_achieved: achieved,
        cohomogeneity,
        transitive,
        verdict: section_in_normal && bracket_condition && slice_condition,
        certified_by_construction: false,
        samples,
        seed,
    })
}

/// Build and check a spec; sets `certified_by_construction`.
pub fn verify(spec: &PolarActionSpec, tol: &Tolerances) -> Result<PolarityReport> {
    spec.validate(tol)?;
    let rd = RootDecomposition::cached(spec.n)?;
    let built = spec.build(&rd, tol)?;
    let mut report = check_polarity(&rd, &built.h, &built.section, tol, DEFAULT_SAMPLES, spec.seed)?;
    report.certified_by_construction = spec.certified_by_construction(tol);
    Ok(report)
}

/// The non-polar configuration `h = a ⊕ g_{2α}` with candidate section `p_α = (1−θ)g_α`.
pub fn crafted_negative_example(rd: &RootDecomposition) -> BuiltAction {
    let h = vec![rd.b().clone(), rd.z().normalized()];
    let section = rd.g_alpha_basis().iter().map(|x| x - &theta(x)).collect::<Vec<_>>();
    BuiltAction { h, section: rd.orthonormalize(&section) }
}

/// A sampled vector of `s` and whether `[q, ξ] = g_α ⊖ (w ⊕ s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularSample {
    #[serde(with = "linalg::dvector_serde")]
    pub xi: DVector<f64>,
    pub rank: usize,
    pub target: usize,
    pub regular: bool,
}

/// Samples unit vectors of `s` (or `ξ = 0` when `s = 0`) and flags the regular ones.
pub fn regular_vectors(
    q_basis: &[DMatrix<C64>],
    w: &RealSubspace,
    s: &RealSubspace,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<RegularSample>> {
    let m = w.ambient_complex_dim();
    ensure_dim(m, s.ambient_complex_dim())?;
    for t in q_basis {
        ensure_dim(m, t.nrows())?;
        ensure_dim(m, t.ncols())?;
    }
    if (w.basis().transpose() * s.basis()).norm() > tol.member {
        return Err(Error::precondition("s must be orthogonal to w"));
    }
    let target = 2 * m - w.dim() - s.dim();
    let ws = RealSubspace::sum(&[w, s])?;
    let reals: Vec<DMatrix<f64>> = q_basis.iter().map(realify_matrix).collect();
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let xi = if s.is_zero() { DVector::zeros(2 * m) } else { sampling::unit_vector_in(&mut rng, s.basis()) };
        let cols: Vec<DVector<f64>> = reals.iter().map(|t| t * &xi).collect();
        let dirs = linalg::columns_to_matrix(&cols, 2 * m);
        let r = rank(&dirs, tol.rank);
        let leak = cols.iter().map(|c| ws.project(c).norm()).fold(0.0, f64::max);
        let regular = r == target && leak <= tol.residual.max(tol.member);
        out.push(RegularSample { xi, rank: r, target, regular });
    }
    Ok(out)
}

/// Three-valued answer of [`orbit_equivalence_invariants`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trilean {
    Yes,
    No,
    Undetermined,
}

impl fmt::Display for Trilean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trilean::Yes => "yes",
            Trilean::No => "no",
            Trilean::Undetermined => "undetermined",
        })
    }
}

/// Generic orbit dimension and cohomogeneity of a linear `Q`-action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitProfile {
    pub space_dim: usize,
    pub generic_orbit_dim: usize,
    pub cohomogeneity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub equivalent: Trilean,
    /// The check that settled the answer.
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<[OrbitProfile; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_unitarity_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_mapping_residual: Option<f64>,
}

impl EquivalenceReport {
    fn settled(equivalent: Trilean, reason: impl Into<String>) -> Self {
        Self { equivalent, reason: reason.into(), profiles: None, witness_unitarity_residual: None, witness_mapping_residual: None }
    }
}

/// Orbit profile of `q` acting on the `q`-invariant subspace `v ⊆ C^m`.
pub fn q_orbit_profile(q_basis: &[DMatrix<C64>], v: &RealSubspace, samples: usize, seed: u64, tol: &Tolerances) -> OrbitProfile {
    let reals: Vec<DMatrix<f64>> = q_basis.iter().map(realify_matrix).collect();
    let m2 = 2 * v.ambient_complex_dim();
    let mut rng = sampling::rng(seed);
    let mut best = 0;
    if !v.is_zero() {
        for _ in 0..samples.max(1) {
            let xi = sampling::unit_vector_in(&mut rng, v.basis());
            let cols: Vec<DVector<f64>> = reals.iter().map(|t| t * &xi).collect();
            best = best.max(rank(&linalg::columns_to_matrix(&cols, m2), tol.rank));
        }
    }
    OrbitProfile { space_dim: v.dim(), generic_orbit_dim: best, cohomogeneity: v.dim() - best }
}

fn same_matrix_span(a: &[DMatrix<C64>], b: &[DMatrix<C64>], m: usize, tol: &Tolerances) -> bool {
    let sa = linalg::orthonormal_matrix_span(a, m, m, 1e-9);
    let sb = linalg::orthonormal_matrix_span(b, m, m, 1e-9);
    sa.len() == sb.len() && sa.iter().all(|t| linalg::matrix_span_residual(&sb, t) <= tol.member)
}

/// Structural orbit-equivalence test of two polar actions.
///
/// `no` answers are certain (they come from invariants); `yes` needs an explicit
/// conjugation of the data; everything else is `undetermined`.
pub fn orbit_equivalence_invariants(a: &PolarActionSpec, b: &PolarActionSpec, tol: &Tolerances) -> Result<EquivalenceReport> {
    ensure_dim(a.n, b.n)?;
    a.validate(tol)?;
    b.validate(tol)?;
    if a.family != b.family {
        return Ok(EquivalenceReport::settled(Trilean::No, "different families"));
    }
    let samples = DEFAULT_SAMPLES;
    let seed = a.seed ^ b.seed.rotate_left(17);
    match a.family {
        Family::I => {
            if a.k != b.k {
                return Ok(EquivalenceReport::settled(Trilean::No, "different k"));
            }
            let m = a.q_module_dim();
            let full = RealSubspace::full(m);
            let pa = q_orbit_profile(&a.q_basis, &full, samples, seed, tol);
            let pb = q_orbit_profile(&b.q_basis, &full, samples, seed, tol);
            let mut report = if pa != pb {
                EquivalenceReport::settled(Trilean::No, "Q-orbit profiles on C^(n-k) differ")
            } else if same_matrix_span(&a.q_basis, &b.q_basis, m, tol) {
                EquivalenceReport::settled(Trilean::Yes, "identical Q")
            } else {
                EquivalenceReport::settled(Trilean::Undetermined, "Q-orbit profiles agree but no conjugation found")
            };
            report.profiles = Some([pa, pb]);
            Ok(report)
        }
        Family::II => {
            if a.b != b.b {
                return Ok(EquivalenceReport::settled(Trilean::No, "different b"));
            }
            let (wa, wb) = (a.w.as_ref().expect("validated"), b.w.as_ref().expect("validated"));
            if wa.dim() != wb.dim() {
                return Ok(EquivalenceReport::settled(Trilean::No, "dim w differs"));
            }
            let cong = kahler::congruent(wa, wb, tol)?;
            let Some(witness) = cong.witness.filter(|_| cong.congruent) else {
                return Ok(EquivalenceReport::settled(Trilean::No, "w not congruent (Kähler angles differ)"));
            };
            let m = a.q_module_dim();
            let unitarity = linalg::cnorm(&(witness.adjoint() * &witness - DMatrix::identity(m, m)));
            let ar = realify_matrix(&witness);
            let mapping = wa
                .basis_vectors()
                .iter()
                .map(|v| wb.distance_ratio(&(&ar * v)))
                .fold(0.0, f64::max);
            let pa = q_orbit_profile(&a.q_basis, &kahler::orthogonal_complement(wa), samples, seed, tol);
            let pb = q_orbit_profile(&b.q_basis, &kahler::orthogonal_complement(wb), samples, seed, tol);
            let moved: Vec<DMatrix<C64>> = a.q_basis.iter().map(|t| &witness * t * witness.adjoint()).collect();
            let mut report = if pa != pb {
                EquivalenceReport::settled(Trilean::No, "Q-orbit profiles on w-perp differ")
            } else if same_matrix_span(&moved, &b.q_basis, m, tol) {
                EquivalenceReport::settled(Trilean::Yes, "w congruent and Q conjugate by the witness")
            } else {
                EquivalenceReport::settled(Trilean::Undetermined, "w congruent, Q-orbit profiles agree, no conjugation found")
            };
            report.profiles = Some([pa, pb]);
            report.witness_unitarity_residual = Some(unitarity);
            report.witness_mapping_residual = Some(mapping);
            Ok(report)
        }
    }
}

/// One representative of a moduli class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub label: String,
    pub spec: PolarActionSpec,
}

fn signatures(m: usize, grid: &[f64]) -> Vec<Vec<(f64, usize)>> {
    // (complex pairs a, totally real c, pairs p_φ per grid angle), a + c + 2Σp ≤ m
    fn rec(grid: &[f64], budget: usize, acc: &mut Vec<(f64, usize)>, out: &mut Vec<Vec<(f64, usize)>>) {
        match grid.split_first() {
            None => out.push(acc.clone()),
            Some((&phi, rest)) => {
                for p in 0..=budget / 2 {
                    if p > 0 {
                        acc.push((phi, 2 * p));
                    }
                    rec(rest, budget - 2 * p, acc, out);
                    if p > 0 {
                        acc.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for a in 0..=m {
        for c in 0..=m - a {
            let mut acc = Vec::new();
            if a > 0 {
                acc.push((0.0, 2 * a));
            }
            let mut tail = Vec::new();
            rec(grid, m - a - c, &mut acc, &mut tail);
            for mut sig in tail {
                if c > 0 {
                    sig.push((FRAC_PI_2, c));
                }
                out.push(sig);
            }
        }
    }
    out
}

/// Representatives of the structural classes of polar actions on `CH^n`, with
/// continuous Kähler-angle moduli discretised by `angle_grid ⊂ (0, π/2)`.
///
/// Transitive actions are left out, as are family I entries whose `Q` has no
/// section on `C^(n−k)`. Candidates are merged when
/// [`orbit_equivalence_invariants`] answers `yes`.
pub fn enumerate_moduli(n: usize, angle_grid: &[f64], tol: &Tolerances) -> Result<Vec<CatalogEntry>> {
    if n < 2 {
        return Err(Error::domain("n must be at least 2"));
    }
    let mut grid: Vec<f64> = Vec::new();
    for &phi in angle_grid {
        if !(phi > 0.0 && phi < FRAC_PI_2) {
            return Err(Error::domain(format!("grid angle {phi} is not in (0, π/2)")));
        }
        if !grid.iter().any(|g| (g - phi).abs() <= tol.angle) {
            grid.push(phi);
        }
    }
    grid.sort_by(f64::total_cmp);

    let mut candidates = Vec::new();
    for k in 0..=n {
        let choices: &[QChoice] = if k == n { &[QChoice::Trivial] } else { &[QChoice::Unitary, QChoice::Torus] };
        for &c in choices {
            candidates.push(PolarActionSpec::canonical_family_i(n, k, c)?);
        }
    }
    for sig in signatures(n - 1, &grid) {
        let w = canonical_subspace(n - 1, &sig)?;
        for b in [BFlag::Full, BFlag::Zero] {
            if b == BFlag::Full && w.dim() == 2 * (n - 1) {
                continue;
            }
            candidates.push(PolarActionSpec::canonical_family_ii(n, b, w.clone(), tol)?);
        }
    }

    let mut out: Vec<CatalogEntry> = Vec::new();
    for spec in candidates {
        let mut duplicate = false;
        for e in &out {
            if orbit_equivalence_invariants(&e.spec, &spec, tol)?.equivalent == Trilean::Yes {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            out.push(CatalogEntry { label: spec.label(tol), spec });
        }
    }
    Ok(out)
}
