//! Matrix model of `g = su(1,n)` and its restricted root space decomposition.
//!
//! Elements are complex `(n+1)×(n+1)` matrices `X` with `tr X = 0` and
//! `X* I₁ₙ + I₁ₙ X = 0`, `I₁ₙ = diag(−1, 1, …, 1)`. The Cartan involution is
//! `θX = I₁ₙ X I₁ₙ`, so `k` is block diagonal and `p` is the space of Hermitian
//! matrices supported on the first row and column:
//!
//! ```text
//!     | 0   z̄₁ … z̄ₙ |
//!     | z₁  0  …  0 |
//!     | ⋮          ⋮ |
//!     | zₙ  0  …  0 |
//! ```
//!
//! which is the model of `T_o CH^n` used by [`RootDecomposition::tangent_vector`].
//!
//! Conventions fixed here (nothing downstream reads raw coordinates):
//! * `a = R·H₀` with `H₀ = E₀₁ + E₁₀`, and `B = H₀/2`, so `ad(B)` is `1/2` on `g_α`.
//! * `⟨X,Y⟩ = −c·Re tr(θ(X)Y)` with `c` solved from `⟨B,B⟩ = 1` (this gives `c = 2`).
//! * The complex structure on `p` is `z ↦ iz`; `Z` is the `g_{2α}` component of
//!   `2iB`, which yields `(1−θ)Z = 2iB` and `⟨Z,Z⟩ = 2`.
//! * `J X = −[θX, Z]` on `g_α`.
//!
//! The skew-adjointness identity implemented and tested is
//! `⟨ad(X)Y, W⟩ = −⟨Y, ad(θX)W⟩`; the frequently quoted form with `Y` in the last
//! slot is a misprint.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{self, complex_matrix_coords, complexify_matrix, orthonormalize, C64};

/// Metric scale `c` in `⟨X,Y⟩ = −c·Re tr(θ(X)Y)`; [`RootDecomposition::build`] re-derives it.
pub const METRIC_SCALE: f64 = 2.0;

const MEMBERSHIP_TOL: f64 = 1e-12;

/// An element of `su(1,n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElement {
    n: usize,
    matrix: DMatrix<C64>,
}

fn signature_matrix(n: usize) -> DMatrix<C64> {
    let mut d = DMatrix::identity(n + 1, n + 1);
    d[(0, 0)] = C64::new(-1.0, 0.0);
    d
}

impl AlgElement {
    /// Validates shape, tracelessness and the `su(1,n)` condition to `1e−12` (relative).
    pub fn new(n: usize, matrix: DMatrix<C64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("su(1,n) needs n ≥ 1"));
        }
        ensure_dim(n + 1, matrix.nrows())?;
        ensure_dim(n + 1, matrix.ncols())?;
        let scale = linalg::cnorm(&matrix).max(1.0);
        if matrix.trace().norm() > MEMBERSHIP_TOL * scale {
            return Err(Error::domain("matrix is not traceless"));
        }
        let i = signature_matrix(n);
        let defect = linalg::cnorm(&(matrix.adjoint() * &i + &i * &matrix));
        if defect > MEMBERSHIP_TOL * scale {
            return Err(Error::domain("matrix does not preserve the form diag(-1, 1, ..., 1)"));
        }
        Ok(Self { n, matrix })
    }

    pub(crate) fn from_matrix_unchecked(n: usize, matrix: DMatrix<C64>) -> Self {
        Self { n, matrix }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_matrix_unchecked(n, DMatrix::zeros(n + 1, n + 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_matrix_unchecked(self.n, &self.matrix * C64::new(s, 0.0))
    }

    /// Norm induced by [`inner`].
    pub fn norm(&self) -> f64 {
        inner_unchecked(self, self).max(0.0).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / n)
        }
    }

    /// Real linear combination.
    pub fn combination(n: usize, coeffs: &[f64], elems: &[AlgElement]) -> Self {
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for (c, e) in coeffs.iter().zip(elems) {
            m += &e.matrix * C64::new(*c, 0.0);
        }
        Self::from_matrix_unchecked(n, m)
    }
}

impl Add for &AlgElement {
    type Output = AlgElement;
    fn add(self, rhs: &AlgElement) -> AlgElement {
        assert_eq!(self.n, rhs.n, "adding elements of different algebras");
        AlgElement::from_matrix_unchecked(self.n, &self.matrix + &rhs.matrix)
    }
}

impl Sub for &AlgElement {
    type Output = AlgElement;
    fn sub(self, rhs: &AlgElement) -> AlgElement {
        assert_eq!(self.n, rhs.n, "subtracting elements of different algebras");
        AlgElement::from_matrix_unchecked(self.n, &self.matrix - &rhs.matrix)
    }
}

impl Neg for &AlgElement {
    type Output = AlgElement;
    fn neg(self) -> AlgElement {
        self.scale(-1.0)
    }
}

impl Mul<&AlgElement> for f64 {
    type Output = AlgElement;
    fn mul(self, rhs: &AlgElement) -> AlgElement {
        rhs.scale(self)
    }
}

/// `[X, Y] = XY − YX`.
pub fn bracket(x: &AlgElement, y: &AlgElement) -> Result<AlgElement> {
    ensure_dim(x.n, y.n)?;
    Ok(bracket_unchecked(x, y))
}

pub(crate) fn bracket_unchecked(x: &AlgElement, y: &AlgElement) -> AlgElement {
    AlgElement::from_matrix_unchecked(x.n, linalg::commutator(&x.matrix, &y.matrix))
}

/// Cartan involution `θX = I₁ₙ X I₁ₙ`.
pub fn theta(x: &AlgElement) -> AlgElement {
    let n = x.n;
    let mut m = x.matrix.clone();
    for j in 1..=n {
        m[(0, j)] = -m[(0, j)];
        m[(j, 0)] = -m[(j, 0)];
    }
    AlgElement::from_matrix_unchecked(n, m)
}

/// `⟨X, Y⟩ = −c·Re tr(θ(X) Y)`, positive definite on `su(1,n)`.
pub fn inner(x: &AlgElement, y: &AlgElement) -> Result<f64> {
    ensure_dim(x.n, y.n)?;
    Ok(inner_unchecked(x, y))
}

pub(crate) fn inner_unchecked(x: &AlgElement, y: &AlgElement) -> f64 {
    let tx = theta(x);
    -METRIC_SCALE * (tx.matrix.component_mul(&y.matrix.transpose())).iter().map(|z| z.re).sum::<f64>()
}

/// Projection onto `k`: `(1+θ)/2`.
pub fn k_part(x: &AlgElement) -> AlgElement {
    (x + &theta(x)).scale(0.5)
}

/// Projection onto `p`: `(1−θ)/2`.
pub fn p_part(x: &AlgElement) -> AlgElement {
    (x - &theta(x)).scale(0.5)
}

/// The five restricted root spaces, indexed by the eigenvalue of `ad(B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootSpace {
    MinusTwoAlpha,
    MinusAlpha,
    Zero,
    Alpha,
    TwoAlpha,
}

impl RootSpace {
    pub const ALL: [RootSpace; 5] = [
        RootSpace::MinusTwoAlpha,
        RootSpace::MinusAlpha,
        RootSpace::Zero,
        RootSpace::Alpha,
        RootSpace::TwoAlpha,
    ];

    /// Eigenvalue of `ad(B)`.
    pub fn eigenvalue(self) -> f64 {
        match self {
            RootSpace::MinusTwoAlpha => -1.0,
            RootSpace::MinusAlpha => -0.5,
            RootSpace::Zero => 0.0,
            RootSpace::Alpha => 0.5,
            RootSpace::TwoAlpha => 1.0,
        }
    }

    /// Multiple of `α` (`-2..=2`).
    pub fn weight(self) -> i32 {
        (self.eigenvalue() * 2.0).round() as i32
    }

    pub fn from_weight(w: i32) -> Option<RootSpace> {
        RootSpace::ALL.into_iter().find(|r| r.weight() == w)
    }

    fn index(self) -> usize {
        (self.weight() + 2) as usize
    }
}

/// `su(1,n)` with its Cartan and restricted root space decompositions.
#[derive(Debug)]
pub struct RootDecomposition {
    n: usize,
    /// Orthonormal real basis of `su(1,n)` used for coordinates.
    basis: Vec<AlgElement>,
    k: Vec<AlgElement>,
    p: Vec<AlgElement>,
    k0: Vec<AlgElement>,
    g_alpha: Vec<AlgElement>,
    g_minus_alpha: Vec<AlgElement>,
    b: AlgElement,
    z: AlgElement,
    projectors: [DMatrix<f64>; 5],
    j_alpha: DMatrix<f64>,
    scale: f64,
    k0_rep_pinv: DMatrix<f64>,
    k0_rep_matrix: DMatrix<f64>,
}

fn e(n: usize, i: usize, j: usize, v: C64) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m[(i, j)] = v;
    m
}

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Standard spanning sets of `k` and `p`.
fn candidates(n: usize) -> (Vec<DMatrix<C64>>, Vec<DMatrix<C64>>) {
    let mut k = Vec::new();
    let mut p = Vec::new();
    for j in 1..=n {
        p.push(e(n, 0, j, ONE) + e(n, j, 0, ONE));
        p.push(e(n, j, 0, I) - e(n, 0, j, I));
    }
    for j in 1..=n {
        k.push(e(n, 0, 0, I) - e(n, j, j, I));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            k.push(e(n, i, j, ONE) - e(n, j, i, ONE));
            k.push(e(n, i, j, I) + e(n, j, i, I));
        }
    }
    (k, p)
}

fn orthonormal_elements(n: usize, mats: Vec<DMatrix<C64>>) -> Vec<AlgElement> {
    let mut out: Vec<AlgElement> = Vec::new();
    for m in mats {
        let mut v = AlgElement::from_matrix_unchecked(n, m);
        let n0 = v.norm().max(1.0);
        for _ in 0..2 {
            for q in &out {
                let c = inner_unchecked(q, &v);
                v = &v - &q.scale(c);
            }
        }
        let nv = v.norm();
        if nv > 1e-9 * n0 {
            out.push(v.scale(1.0 / nv));
        }
    }
    out
}

static CACHE: OnceLock<Mutex<HashMap<usize, Arc<RootDecomposition>>>> = OnceLock::new();

impl RootDecomposition {
    /// Shared, lazily built decomposition for `n`.
    pub fn cached(n: usize) -> Result<Arc<RootDecomposition>> {
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rd) = cache.lock().expect("cache poisoned").get(&n) {
            return Ok(rd.clone());
        }
        let rd = Arc::new(RootDecomposition::build(n)?);
        cache.lock().expect("cache poisoned").entry(n).or_insert_with(|| rd.clone());
        Ok(rd)
    }

    pub fn build(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("complex hyperbolic dimension must be at least 2"));
        }
        let (kc, pc) = candidates(n);
        let k = orthonormal_elements(n, kc);
        let p = orthonormal_elements(n, pc);
        let mut basis = k.clone();
        basis.extend(p.iter().cloned());
        let dim = (n + 1) * (n + 1) - 1;
        if basis.len() != dim {
            return Err(Error::consistency(format!("su(1,{n}) basis has {} elements, expected {dim}", basis.len())));
        }

        let h0 = AlgElement::from_matrix_unchecked(n, e(n, 0, 1, ONE) + e(n, 1, 0, ONE));
        let b = h0.scale(0.5);
        let scale = 1.0 / (-(theta(&b).matrix * &b.matrix).trace().re);
        if (scale - METRIC_SCALE).abs() > 1e-14 {
            return Err(Error::consistency(format!("metric scale solved as {scale}")));
        }

        let mut rd = RootDecomposition {
            n,
            basis,
            k,
            p,
            k0: Vec::new(),
            g_alpha: Vec::new(),
            g_minus_alpha: Vec::new(),
            b,
            z: AlgElement::zero(n),
            projectors: std::array::from_fn(|_| DMatrix::zeros(0, 0)),
            j_alpha: DMatrix::zeros(0, 0),
            scale,
            k0_rep_pinv: DMatrix::zeros(0, 0),
            k0_rep_matrix: DMatrix::zeros(0, 0),
        };

        // eigenspaces of the symmetric operator ad(B)
        let adb = rd.ad(&rd.b);
        let sym = (&adb + adb.transpose()) * 0.5;
        if linalg::max_abs_diff(&adb, &sym) > 1e-12 {
            return Err(Error::consistency("ad(B) is not symmetric in an orthonormal basis"));
        }
        let eig = SymmetricEigen::new(sym);
        let mut groups: [Vec<DVector<f64>>; 5] = std::array::from_fn(|_| Vec::new());
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            let root = RootSpace::ALL
                .into_iter()
                .find(|r| (r.eigenvalue() - lam).abs() <= 1e-8)
                .ok_or_else(|| Error::consistency(format!("unexpected ad(B) eigenvalue {lam}")))?;
            groups[root.index()].push(eig.eigenvectors.column(i).into_owned());
        }
        for r in RootSpace::ALL {
            let v = linalg::columns_to_matrix(&groups[r.index()], dim);
            rd.projectors[r.index()] = &v * v.transpose();
        }

        // Z: g_{2α}-component of 2iB, where iB has z₁ = i/2
        let two_ib = AlgElement::from_matrix_unchecked(n, e(n, 1, 0, I) - e(n, 0, 1, I));
        rd.z = rd.component(&two_ib, RootSpace::TwoAlpha);

        // g_α basis e_j, J e_j from the p-vectors with z_j = 1, j ≥ 2
        let mut g_alpha = Vec::with_capacity(2 * (n - 1));
        for j in 2..=n {
            let y = AlgElement::from_matrix_unchecked(n, e(n, 0, j, ONE) + e(n, j, 0, ONE));
            let ej = rd.component(&y, RootSpace::Alpha).normalized();
            let jej = rd.j_unchecked(&ej);
            g_alpha.push(ej);
            g_alpha.push(jej);
        }
        rd.g_minus_alpha = g_alpha.iter().map(theta).collect();
        rd.g_alpha = g_alpha;

        let k0_candidates: Vec<DMatrix<C64>> = rd
            .k
            .iter()
            .map(|x| rd.component(x, RootSpace::Zero).matrix)
            .collect();
        rd.k0 = orthonormal_elements(n, k0_candidates);

        let m = 2 * (n - 1);
        rd.j_alpha = DMatrix::from_fn(m, m, |i, j| inner_unchecked(&rd.g_alpha[i], &rd.j_unchecked(&rd.g_alpha[j])));

        let rep_cols: Vec<DVector<f64>> = rd.k0.iter().map(|t| complex_matrix_coords(&rd.k0_to_unitary(t))).collect();
        rd.k0_rep_matrix = linalg::columns_to_matrix(&rep_cols, 2 * (n - 1) * (n - 1));
        rd.k0_rep_pinv = rd
            .k0_rep_matrix
            .clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::consistency(e.to_string()))?;

        rd.verify_structure()?;
        Ok(rd)
    }

    fn verify_structure(&self) -> Result<()> {
        let n = self.n;
        let dims = [
            (RootSpace::Alpha, 2 * n - 2),
            (RootSpace::TwoAlpha, 1),
            (RootSpace::MinusAlpha, 2 * n - 2),
            (RootSpace::MinusTwoAlpha, 1),
            (RootSpace::Zero, (n - 1) * (n - 1) + 1),
        ];
        for (r, d) in dims {
            if self.root_space_dim(r) != d {
                return Err(Error::consistency(format!("dim {r:?} = {}, expected {d}", self.root_space_dim(r))));
            }
        }
        if self.k0.len() != (n - 1) * (n - 1) {
            return Err(Error::consistency("dim k_0 mismatch"));
        }
        if (self.inner(&self.z, &self.z) - 2.0).abs() > 1e-12 {
            return Err(Error::consistency("⟨Z,Z⟩ ≠ 2"));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension of `su(1,n)`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Metric scale `c` solved from `⟨B,B⟩ = 1`.
    pub fn metric_scale(&self) -> f64 {
        self.scale
    }

    pub fn inner(&self, x: &AlgElement, y: &AlgElement) -> f64 {
        inner_unchecked(x, y)
    }

    pub fn basis(&self) -> &[AlgElement] {
        &self.basis
    }

    pub fn k_basis(&self) -> &[AlgElement] {
        &self.k
    }

    pub fn p_basis(&self) -> &[AlgElement] {
        &self.p
    }

    pub fn k0_basis(&self) -> &[AlgElement] {
        &self.k0
    }

    /// Orthonormal basis `e₁, Je₁, …, e_{n−1}, Je_{n−1}` of `g_α`.
    pub fn g_alpha_basis(&self) -> &[AlgElement] {
        &self.g_alpha
    }

    pub fn g_minus_alpha_basis(&self) -> &[AlgElement] {
        &self.g_minus_alpha
    }

    /// Unit vector `B ∈ a`.
    pub fn b(&self) -> &AlgElement {
        &self.b
    }

    /// `Z = JB ∈ g_{2α}`, `⟨Z,Z⟩ = 2`.
    pub fn z(&self) -> &AlgElement {
        &self.z
    }

    /// Orthonormal basis of a root space.
    pub fn root_space_basis(&self, r: RootSpace) -> Vec<AlgElement> {
        match r {
            RootSpace::Alpha => self.g_alpha.clone(),
            RootSpace::MinusAlpha => self.g_minus_alpha.clone(),
            RootSpace::TwoAlpha => vec![self.z.normalized()],
            RootSpace::MinusTwoAlpha => vec![theta(&self.z).normalized()],
            RootSpace::Zero => {
                let mut v = self.k0.clone();
                v.push(self.b.clone());
                v
            }
        }
    }

    pub fn root_space_dim(&self, r: RootSpace) -> usize {
        self.projectors[r.index()].trace().round() as usize
    }

    /// `J` on `g_α` in the basis of [`Self::g_alpha_basis`].
    pub fn j_alpha_matrix(&self) -> &DMatrix<f64> {
        &self.j_alpha
    }

    /// Coordinates in the orthonormal basis of `su(1,n)`.
    pub fn coords(&self, x: &AlgElement) -> DVector<f64> {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|b| inner_unchecked(b, x)))
    }

    pub fn element(&self, coords: &DVector<f64>) -> AlgElement {
        AlgElement::combination(self.n, coords.as_slice(), &self.basis)
    }

    /// Orthogonal projection onto a root space.
    pub fn component(&self, x: &AlgElement, r: RootSpace) -> AlgElement {
        self.element(&(&self.projectors[r.index()] * self.coords(x)))
    }

    pub fn projector(&self, r: RootSpace) -> &DMatrix<f64> {
        &self.projectors[r.index()]
    }

    /// Matrix of `ad(X)` on `su(1,n)` in coordinates.
    pub fn ad(&self, x: &AlgElement) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.basis.iter().map(|b| self.coords(&bracket_unchecked(x, b))).collect();
        linalg::columns_to_matrix(&cols, self.basis.len())
    }

    /// `exp(ad X)`, computed as the exponential of the coordinate matrix of `ad X`.
    pub fn ad_exp(&self, x: &AlgElement) -> DMatrix<f64> {
        self.ad(x).exp()
    }

    /// `Ad(exp X) Y = exp(X) Y exp(−X)` computed in the matrix group.
    pub fn ad_exp_conjugation(&self, x: &AlgElement, y: &AlgElement) -> AlgElement {
        let g = x.matrix.exp();
        let gi = (-&x.matrix).exp();
        AlgElement::from_matrix_unchecked(self.n, g * &y.matrix * gi)
    }

    /// `J` on `g_α`: `JX = −[θX, Z]`.
    pub fn j(&self, x: &AlgElement) -> Result<AlgElement> {
        self.require_in(x, &[RootSpace::Alpha], "J is defined on g_α")?;
        Ok(self.j_unchecked(x))
    }

    fn j_unchecked(&self, x: &AlgElement) -> AlgElement {
        -&bracket_unchecked(&theta(x), &self.z)
    }

    /// Relative size of the part of `x` outside the given root spaces.
    pub fn outside_residual(&self, x: &AlgElement, spaces: &[RootSpace]) -> f64 {
        let norm = x.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let c = self.coords(x);
        let inside = spaces.iter().fold(DVector::zeros(c.len()), |acc, r| acc + &self.projectors[r.index()] * &c);
        (c - inside).norm() / norm
    }

    fn require_in(&self, x: &AlgElement, spaces: &[RootSpace], what: &str) -> Result<()> {
        ensure_dim(self.n, x.n)?;
        if self.outside_residual(x, spaces) > 1e-9 {
            return Err(Error::domain(what.to_string()));
        }
        Ok(())
    }

    /// Component of `x ∈ g_0` along `k_0`, i.e. with the `a` part removed.
    pub fn k0_residual(&self, x: &AlgElement) -> f64 {
        let norm = x.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let c = self.coords(x);
        let mut r = c.clone();
        for t in &self.k0 {
            let tc = self.coords(t);
            r.axpy(-tc.dot(&c), &tc, 1.0);
        }
        r.norm() / norm
    }

    /// Element of `g_α` with the given coordinates in [`Self::g_alpha_basis`].
    pub fn alpha_vector(&self, u: &DVector<f64>) -> Result<AlgElement> {
        ensure_dim(2 * (self.n - 1), u.len())?;
        Ok(AlgElement::combination(self.n, u.as_slice(), &self.g_alpha))
    }

    /// Coordinates of the `g_α` component of `x`.
    pub fn alpha_coords(&self, x: &AlgElement) -> DVector<f64> {
        DVector::from_iterator(self.g_alpha.len(), self.g_alpha.iter().map(|e| inner_unchecked(e, x)))
    }

    /// `⟨X,Y⟩_AN = ⟨X_a, Y_a⟩ + ½⟨X_n, Y_n⟩` for `X, Y ∈ a ⊕ n`.
    pub fn inner_an(&self, x: &AlgElement, y: &AlgElement) -> Result<f64> {
        let an = [RootSpace::Alpha, RootSpace::TwoAlpha];
        for v in [x, y] {
            ensure_dim(self.n, v.n)?;
            let c = self.coords(v);
            let a_part = self.b.scale(inner_unchecked(&self.b, v));
            let n_part = an.iter().fold(DVector::zeros(c.len()), |acc, r| acc + &self.projectors[r.index()] * &c);
            let rest = c - n_part - self.coords(&a_part);
            if rest.norm() > 1e-9 * v.norm().max(1e-300) {
                return Err(Error::domain("inner_an requires elements of a ⊕ n"));
            }
        }
        let a = inner_unchecked(&self.b, x) * inner_unchecked(&self.b, y);
        let nx = self.element(&an.iter().fold(DVector::zeros(self.dim()), |acc, r| acc + &self.projectors[r.index()] * self.coords(x)));
        let ny = self.element(&an.iter().fold(DVector::zeros(self.dim()), |acc, r| acc + &self.projectors[r.index()] * self.coords(y)));
        Ok(a + 0.5 * inner_unchecked(&nx, &ny))
    }

    /// Action of `T ∈ k_0` on `g_α ≅ C^{n−1}` as a skew-Hermitian matrix.
    pub fn k0_to_unitary(&self, t: &AlgElement) -> DMatrix<C64> {
        let m = self.g_alpha.len();
        let real = DMatrix::from_fn(m, m, |i, j| inner_unchecked(&self.g_alpha[i], &bracket_unchecked(t, &self.g_alpha[j])));
        complexify_matrix(&real)
    }

    /// Element of `k_0` acting on `g_α ≅ C^{n−1}` by the skew-Hermitian matrix `u`.
    pub fn k0_from_unitary(&self, u: &DMatrix<C64>) -> Result<AlgElement> {
        ensure_dim(self.n - 1, u.nrows())?;
        ensure_dim(self.n - 1, u.ncols())?;
        let target = complex_matrix_coords(u);
        let c = &self.k0_rep_pinv * &target;
        let res = (&self.k0_rep_matrix * &c - &target).norm();
        if res > 1e-9 * target.norm().max(1.0) {
            return Err(Error::domain("matrix is not skew-Hermitian"));
        }
        Ok(AlgElement::combination(self.n, c.as_slice(), &self.k0))
    }

    /// Vector of `p ≅ T_o CH^n` with complex coordinates `z₁, …, zₙ`.
    pub fn tangent_vector(&self, z: &DVector<C64>) -> Result<AlgElement> {
        ensure_dim(self.n, z.len())?;
        let mut m = DMatrix::zeros(self.n + 1, self.n + 1);
        for j in 1..=self.n {
            m[(j, 0)] = z[j - 1];
            m[(0, j)] = z[j - 1].conj();
        }
        Ok(AlgElement::from_matrix_unchecked(self.n, m))
    }

    /// Complex coordinates `z₁, …, zₙ` of the `p` component of `x`.
    pub fn tangent_coords(&self, x: &AlgElement) -> DVector<C64> {
        let p = p_part(x);
        DVector::from_fn(self.n, |j, _| p.matrix[(j + 1, 0)])
    }

    /// Orthonormal basis (for [`inner`]) of the span of `elems`.
    pub fn orthonormalize(&self, elems: &[AlgElement]) -> Vec<AlgElement> {
        let coords = elems.iter().map(|x| self.coords(x));
        let q = orthonormalize(coords, self.dim(), 1e-9);
        q.column_iter().map(|c| self.element(&c.into_owned())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn random_element(rd: &RootDecomposition, rng: &mut sampling::SeededRng, spaces: &[AlgElement]) -> AlgElement {
        let c = sampling::gaussian_vector(rng, spaces.len());
        AlgElement::combination(rd.n(), c.as_slice(), spaces)
    }

    #[test]
    fn dimensions_match_formulas() {
        for n in 2..=5 {
            let rd = RootDecomposition::build(n).unwrap();
            assert_eq!(rd.g_alpha_basis().len(), 2 * n - 2);
            assert_eq!(rd.root_space_dim(RootSpace::TwoAlpha), 1);
            assert_eq!(rd.k0_basis().len(), (n - 1) * (n - 1));
            assert_eq!(rd.dim(), n * n + 2 * n);
        }
        assert!(RootDecomposition::build(1).is_err());
    }

    #[test]
    fn metric_normalisation() {
        let rd = RootDecomposition::build(3).unwrap();
        assert!((rd.inner(rd.b(), rd.b()) - 1.0).abs() < 1e-12);
        assert!((rd.inner(rd.z(), rd.z()) - 2.0).abs() < 1e-12);
        assert!((rd.inner_an(rd.z(), rd.z()).unwrap() - 1.0).abs() < 1e-12);
        assert!((rd.inner_an(rd.b(), rd.b()).unwrap() - 1.0).abs() < 1e-12);
        assert!(rd.inner_an(&rd.k0_basis()[0], rd.b()).is_err());
    }

    #[test]
    fn bracket_basics() {
        let rd = RootDecomposition::build(3).unwrap();
        let mut rng = sampling::rng(5);
        let x = random_element(&rd, &mut rng, rd.basis());
        assert!(bracket(&x, &x).unwrap().norm() < 1e-14);
        let u = random_element(&rd, &mut rng, rd.g_alpha_basis());
        let bu = bracket(rd.b(), &u).unwrap();
        assert!((&bu - &u.scale(0.5)).norm() < 1e-12);
        let ju = rd.j(&u).unwrap();
        let uju = bracket(&u, &ju).unwrap();
        let expected = rd.z().scale(0.5 * rd.inner(&u, &u));
        assert!((&uju - &expected).norm() < 1e-12);
        let other = RootDecomposition::build(2).unwrap();
        assert!(bracket(&x, other.b()).is_err());
    }

    #[test]
    fn theta_on_k_and_p() {
        let rd = RootDecomposition::build(3).unwrap();
        for x in rd.k_basis() {
            assert!((&theta(x) - x).norm() < 1e-15);
        }
        for x in rd.p_basis() {
            assert!((&theta(x) + x).norm() < 1e-15);
        }
        for x in rd.g_alpha_basis() {
            assert!(rd.outside_residual(&theta(x), &[RootSpace::MinusAlpha]) < 1e-12);
        }
    }

    #[test]
    fn skew_adjointness() {
        let rd = RootDecomposition::build(3).unwrap();
        let mut rng = sampling::rng(9);
        for _ in 0..20 {
            let x = random_element(&rd, &mut rng, rd.basis());
            let y = random_element(&rd, &mut rng, rd.basis());
            let w = random_element(&rd, &mut rng, rd.basis());
            let lhs = rd.inner(&bracket_unchecked(&x, &y), &w);
            let rhs = rd.inner(&y, &bracket_unchecked(&theta(&x), &w));
            assert!((lhs + rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn j_squares_to_minus_one_and_matches_i_on_p() {
        let rd = RootDecomposition::build(4).unwrap();
        let j = rd.j_alpha_matrix();
        let m = j.nrows();
        assert!(linalg::max_abs_diff(&(j * j), &(-DMatrix::identity(m, m))) < 1e-12);
        assert!(linalg::max_abs_diff(j, &linalg::j_matrix(m / 2)) < 1e-12);
        // i(1−θ)U = (1−θ)JU, with i the multiplication z ↦ iz on p
        for u in rd.g_alpha_basis() {
            let lhs = rd.tangent_coords(&(u - &theta(u))) * I;
            let ju = rd.j(u).unwrap();
            let rhs = rd.tangent_coords(&(&ju - &theta(&ju)));
            assert!((lhs - rhs).norm() < 1e-12);
        }
        let twoib = rd.tangent_coords(&rd.b().scale(2.0)) * I;
        assert!((twoib - rd.tangent_coords(&(rd.z() - &theta(rd.z())))).norm() < 1e-12);
    }

    #[test]
    fn root_grading() {
        let rd = RootDecomposition::build(3).unwrap();
        for r in RootSpace::ALL {
            for s in RootSpace::ALL {
                for x in rd.root_space_basis(r) {
                    for y in rd.root_space_basis(s) {
                        let br = bracket_unchecked(&x, &y);
                        match RootSpace::from_weight(r.weight() + s.weight()) {
                            Some(t) => assert!(rd.outside_residual(&br, &[t]) < 1e-10 || br.norm() < 1e-12),
                            None => assert!(br.norm() < 1e-12),
                        }
                    }
                }
            }
        }
        let sum = RootSpace::ALL.iter().fold(DMatrix::zeros(rd.dim(), rd.dim()), |acc, r| acc + rd.projector(*r));
        assert!(linalg::max_abs_diff(&sum, &DMatrix::identity(rd.dim(), rd.dim())) < 1e-10);
    }

    #[test]
    fn ad_exp_routes_agree() {
        let rd = RootDecomposition::build(3).unwrap();
        let mut rng = sampling::rng(2);
        let x = random_element(&rd, &mut rng, rd.basis()).scale(0.3);
        let y = random_element(&rd, &mut rng, rd.basis());
        let via_ad = rd.element(&(rd.ad_exp(&x) * rd.coords(&y)));
        let via_group = rd.ad_exp_conjugation(&x, &y);
        assert!((&via_ad - &via_group).norm() < 1e-9);
        let zero = AlgElement::zero(3);
        let id = DMatrix::identity(rd.dim(), rd.dim());
        assert!(linalg::max_abs_diff(&rd.ad_exp(&zero), &id) < 1e-14);
        let prod = rd.ad_exp(&x) * rd.ad_exp(&-&x);
        assert!(linalg::max_abs_diff(&prod, &id) < 1e-10);
    }

    #[test]
    fn k0_representation_round_trip() {
        let rd = RootDecomposition::build(4).unwrap();
        for t in rd.k0_basis() {
            let u = rd.k0_to_unitary(t);
            assert!(linalg::cnorm(&(u.adjoint() + &u)) < 1e-12);
            let back = rd.k0_from_unitary(&u).unwrap();
            assert!((&back - t).norm() < 1e-10);
        }
        let not_skew = DMatrix::from_element(3, 3, ONE);
        assert!(rd.k0_from_unitary(&not_skew).is_err());
    }

    #[test]
    fn alg_element_validation() {
        assert!(AlgElement::new(2, DMatrix::identity(3, 3)).is_err());
        let rd = RootDecomposition::build(2).unwrap();
        assert!(AlgElement::new(2, rd.z().matrix().clone()).is_ok());
        assert!(AlgElement::new(2, DMatrix::zeros(2, 2)).is_err());
    }
}
