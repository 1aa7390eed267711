//! The solvable group `AN` acting simply transitively on `CH^n`, with the
//! left-invariant metric `⟨·,·⟩_AN`.
//!
//! Left-invariant fields are identified with `a ⊕ n = RB ⊕ g_α ⊕ RZ`. An
//! [`ANVector`] `aB + U + xZ` stores `U` by its coordinates in the
//! `g`-orthonormal basis of [`RootDecomposition::g_alpha_basis`], so
//!
//! ```text
//! ⟨aB + U + xZ, bB + V + yZ⟩_AN = ab + ½ u·v + xy.
//! ```
//!
//! Two metrics appear in the structure equations, and both are used as stated:
//! the bracket `[U, V] = ½⟨JU, V⟩ Z` on `g_α` uses the `g`-metric (where
//! `⟨Z, Z⟩ = 2`), the connection formula uses the `AN` metric. Everything in
//! this module is computed intrinsically on `a ⊕ n`; [`ANVector::to_alg`] and
//! [`ANVector::from_alg`] are the bridge to the matrix model.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::kahler::RealSubspace;
use crate::linalg::{self, apply_j, null_space, orthonormalize};
use crate::su1n::{bracket_unchecked, AlgElement, RootDecomposition, RootSpace};

const MEMBER_TOL: f64 = 1e-9;

/// Left-invariant vector field `aB + U + xZ` on `AN`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ANVector {
    pub a_part: f64,
    /// Coordinates of `U ∈ g_α` in the `g`-orthonormal basis `e₁, Je₁, …`.
    #[serde(with = "linalg::dvector_serde")]
    pub u_part: DVector<f64>,
    pub z_part: f64,
}

impl ANVector {
    pub fn new(a: f64, u: DVector<f64>, z: f64) -> Self {
        Self { a_part: a, u_part: u, z_part: z }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(0.0, DVector::zeros(2 * (n - 1)), 0.0)
    }

    /// The unit vector `B ∈ a`.
    pub fn b(n: usize) -> Self {
        Self::new(1.0, DVector::zeros(2 * (n - 1)), 0.0)
    }

    /// `Z ∈ g_{2α}`, a unit vector for the `AN` metric.
    pub fn z(n: usize) -> Self {
        Self::new(0.0, DVector::zeros(2 * (n - 1)), 1.0)
    }

    pub fn alpha(u: DVector<f64>) -> Self {
        Self::new(0.0, u, 0.0)
    }

    /// Complex hyperbolic dimension `n`.
    pub fn n(&self) -> usize {
        self.u_part.len() / 2 + 1
    }

    /// Real dimension of `a ⊕ n`.
    pub fn dim(&self) -> usize {
        self.u_part.len() + 2
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.a_part, &self.u_part * s, s * self.z_part)
    }

    pub fn add(&self, other: &ANVector) -> Self {
        Self::new(self.a_part + other.a_part, &self.u_part + &other.u_part, self.z_part + other.z_part)
    }

    pub fn sub(&self, other: &ANVector) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn norm(&self) -> f64 {
        inner_an(self, self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a_part.is_finite() && self.z_part.is_finite() && self.u_part.iter().all(|x| x.is_finite())
    }

    /// Coordinates in an `AN`-orthonormal basis `(B, e₁/√½, …, Z)`.
    pub fn orthonormal_coords(&self) -> DVector<f64> {
        let m = self.u_part.len();
        DVector::from_fn(m + 2, |i, _| match i {
            0 => self.a_part,
            i if i == m + 1 => self.z_part,
            i => self.u_part[i - 1] * std::f64::consts::FRAC_1_SQRT_2,
        })
    }

    pub fn from_orthonormal_coords(c: &DVector<f64>) -> Self {
        let m = c.len() - 2;
        let u = DVector::from_fn(m, |i, _| c[i + 1] * std::f64::consts::SQRT_2);
        Self::new(c[0], u, c[m + 1])
    }

    /// The corresponding element of `su(1,n)`.
    pub fn to_alg(&self, rd: &RootDecomposition) -> AlgElement {
        let u = AlgElement::combination(rd.n(), self.u_part.as_slice(), rd.g_alpha_basis());
        &(&rd.b().scale(self.a_part) + &u) + &rd.z().scale(self.z_part)
    }

    /// Inverse of [`Self::to_alg`]; fails outside `a ⊕ n`.
    pub fn from_alg(rd: &RootDecomposition, x: &AlgElement) -> Result<Self> {
        ensure_dim(rd.n(), x.n())?;
        let a = rd.inner(rd.b(), x);
        let u = rd.alpha_coords(x);
        let z = rd.inner(rd.z(), x) / 2.0;
        let back = ANVector::new(a, u, z).to_alg(rd);
        if (&back - x).norm() > MEMBER_TOL * x.norm().max(1.0) {
            return Err(Error::domain("element does not lie in a ⊕ n"));
        }
        Ok(ANVector::new(a, rd.alpha_coords(x), z))
    }
}

fn check_pair(x: &ANVector, y: &ANVector) -> Result<()> {
    ensure_dim(x.u_part.len(), y.u_part.len())
}

/// `⟨X, Y⟩_AN`.
pub fn inner_an(x: &ANVector, y: &ANVector) -> f64 {
    x.a_part * y.a_part + 0.5 * x.u_part.dot(&y.u_part) + x.z_part * y.z_part
}

/// `J U` for `U ∈ g_α` in basis coordinates.
pub fn j_alpha(u: &DVector<f64>) -> DVector<f64> {
    apply_j(u)
}

/// Complex structure of `CH^n` transported to `a ⊕ n`: `B ↦ Z`, `Z ↦ −B`, `U ↦ JU`.
pub fn j_an(x: &ANVector) -> ANVector {
    ANVector::new(-x.z_part, j_alpha(&x.u_part), x.a_part)
}

/// Lie bracket of `a ⊕ n`:
/// `[aB+U+xZ, bB+V+yZ] = −(b/2)U + (a/2)V + (ay − bx + ½⟨JU,V⟩)Z`
/// with `⟨·,·⟩` the `g`-metric on `g_α`.
pub fn an_bracket(x: &ANVector, y: &ANVector) -> Result<ANVector> {
    check_pair(x, y)?;
    Ok(an_bracket_unchecked(x, y))
}

fn an_bracket_unchecked(x: &ANVector, y: &ANVector) -> ANVector {
    let (a, b) = (x.a_part, y.a_part);
    let u = &y.u_part * (a / 2.0) - &x.u_part * (b / 2.0);
    let zc = a * y.z_part - b * x.z_part + 0.5 * j_alpha(&x.u_part).dot(&y.u_part);
    ANVector::new(0.0, u, zc)
}

/// Levi-Civita connection on left-invariant fields:
///
/// ```text
/// ∇_{aB+U+xZ}(bB+V+yZ) = (½⟨U,V⟩ + xy)B − ½(bU + yJU + xJV) + (½⟨JU,V⟩ − bx)Z
/// ```
///
/// with all products in the `AN` metric.
pub fn levi_civita(x: &ANVector, y: &ANVector) -> Result<ANVector> {
    check_pair(x, y)?;
    Ok(levi_civita_unchecked(x, y))
}

fn levi_civita_unchecked(x: &ANVector, y: &ANVector) -> ANVector {
    let (u, v) = (&x.u_part, &y.u_part);
    let (xz, yz, b) = (x.z_part, y.z_part, y.a_part);
    let ju = j_alpha(u);
    let jv = j_alpha(v);
    let a_coef = 0.25 * u.dot(v) + xz * yz;
    let u_coef = (u * b + &ju * yz + &jv * xz) * -0.5;
    let z_coef = 0.25 * ju.dot(v) - b * xz;
    ANVector::new(a_coef, u_coef, z_coef)
}

/// `R(X,Y)W = ∇_X∇_Y W − ∇_Y∇_X W − ∇_{[X,Y]}W`.
pub fn curvature_operator(x: &ANVector, y: &ANVector, w: &ANVector) -> Result<ANVector> {
    check_pair(x, y)?;
    check_pair(x, w)?;
    let lc = levi_civita_unchecked;
    let t1 = lc(x, &lc(y, w));
    let t2 = lc(y, &lc(x, w));
    let t3 = lc(&an_bracket_unchecked(x, y), w);
    Ok(t1.sub(&t2).sub(&t3))
}

/// `⟨R(X,Y)W, V⟩_AN`.
pub fn curvature(x: &ANVector, y: &ANVector, w: &ANVector, v: &ANVector) -> Result<f64> {
    check_pair(x, v)?;
    Ok(inner_an(&curvature_operator(x, y, w)?, v))
}

/// Sectional curvature of the plane spanned by `x, y`.
pub fn sectional_curvature(x: &ANVector, y: &ANVector) -> Result<f64> {
    let area = inner_an(x, x) * inner_an(y, y) - inner_an(x, y).powi(2);
    if area <= 1e-300 {
        return Err(Error::domain("vectors span a degenerate plane"));
    }
    Ok(curvature(x, y, y, x)? / area)
}

/// Sectional curvature of the complex line spanned by `x` and `J x`.
pub fn holomorphic_sectional_curvature(x: &ANVector) -> Result<f64> {
    sectional_curvature(x, &j_an(x))
}

/// Which of the two supported orbit shapes an [`OrbitModel`] has.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OrbitShape {
    /// `R(aB + X) ⊕ w ⊕ g_{2α}`, `X ∈ g_α ⊖ w`, `a ≠ 0`.
    Tilted {
        a: f64,
        #[serde(with = "linalg::dvector_serde")]
        x: DVector<f64>,
        w_dim: usize,
    },
    /// `w ⊕ g_{2α}`.
    Flag { w_dim: usize },
}

/// Orbit through `o` of a connected subgroup of `AN`, represented by its
/// tangent subalgebra (left-invariance makes this enough).
#[derive(Clone, Debug)]
pub struct OrbitModel {
    n: usize,
    shape: OrbitShape,
    /// `AN`-orthonormal coordinates (columns) of a tangent basis.
    tangent: DMatrix<f64>,
    normal: DMatrix<f64>,
}

impl OrbitModel {
    /// Orbit with tangent space `R(aB + X) ⊕ w ⊕ g_{2α}`.
    ///
    /// `x` is given in `g_α` coordinates and must be orthogonal to `w`. With
    /// `a = 0` the orbit is the flag orbit of `w ⊕ RX`.
    pub fn tilted(n: usize, a: f64, x: &DVector<f64>, w: &RealSubspace) -> Result<Self> {
        ensure_dim(n - 1, w.ambient_complex_dim())?;
        ensure_dim(2 * (n - 1), x.len())?;
        if !a.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite orbit parameters"));
        }
        if a == 0.0 && x.norm() == 0.0 {
            return Err(Error::domain("aB + X must be nonzero"));
        }
        if w.project(x).norm() > MEMBER_TOL * x.norm().max(1.0) {
            return Err(Error::domain("X must be orthogonal to w"));
        }
        let mut tangent = vec![ANVector::new(a, x.clone(), 0.0)];
        tangent.extend(w.basis_vectors().into_iter().map(ANVector::alpha));
        tangent.push(ANVector::z(n));
        let shape = if a == 0.0 {
            OrbitShape::Flag { w_dim: w.dim() + 1 }
        } else {
            OrbitShape::Tilted { a, x: x.clone(), w_dim: w.dim() }
        };
        Self::assemble(n, shape, &tangent)
    }

    /// Orbit with tangent space `b ⊕ w ⊕ g_{2α}` for `b = a` (`full`) or `b = 0`.
    pub fn flag(n: usize, w: &RealSubspace, b_full: bool) -> Result<Self> {
        if b_full {
            return Self::tilted(n, 1.0, &DVector::zeros(2 * (n - 1)), w);
        }
        ensure_dim(n - 1, w.ambient_complex_dim())?;
        let mut tangent: Vec<ANVector> = w.basis_vectors().into_iter().map(ANVector::alpha).collect();
        tangent.push(ANVector::z(n));
        Self::assemble(n, OrbitShape::Flag { w_dim: w.dim() }, &tangent)
    }

    /// Classify a subalgebra of `a ⊕ n` given by a spanning set.
    pub fn from_tangent(n: usize, vectors: &[ANVector]) -> Result<Self> {
        for v in vectors {
            ensure_dim(2 * (n - 1), v.u_part.len())?;
        }
        let dim = 2 * n;
        let t = orthonormalize(vectors.iter().map(|v| v.orthonormal_coords()), dim, 1e-9);
        let zc = ANVector::z(n).orthonormal_coords();
        if (&t * (t.transpose() * &zc) - &zc).norm() > MEMBER_TOL {
            return Err(Error::domain("unsupported orbit shape: tangent space must contain g_2α"));
        }
        // split off Z, then the g_α part; what remains is at most one a-tilted line
        let rest: Vec<DVector<f64>> = linalg::matrix_columns(&t)
            .into_iter()
            .map(|c| {
                let mut c = c;
                c[dim - 1] = 0.0;
                c
            })
            .collect();
        let rest = orthonormalize(rest, dim, 1e-9);
        let a_row = DMatrix::from_fn(1, rest.ncols(), |_, j| rest[(0, j)]);
        let w_coeffs = null_space(&a_row, 1e-10);
        let w_vecs: Vec<DVector<f64>> = linalg::matrix_columns(&(&rest * &w_coeffs))
            .into_iter()
            .map(|c| ANVector::from_orthonormal_coords(&c).u_part)
            .collect();
        let w = RealSubspace::new(n - 1, w_vecs)?;
        let model = if w.dim() == rest.ncols() {
            Self::flag(n, &w, false)?
        } else {
            let wc = &w_coeffs;
            let comp = linalg::orthogonal_complement(wc, rest.ncols());
            let v = ANVector::from_orthonormal_coords(&(&rest * comp.column(0)));
            let v = v.scale(1.0 / v.a_part);
            Self::tilted(n, 1.0, &v.u_part, &w)?
        };
        if model.tangent.ncols() != t.ncols() {
            return Err(Error::domain("unsupported orbit shape"));
        }
        Ok(model)
    }

    fn assemble(n: usize, shape: OrbitShape, tangent: &[ANVector]) -> Result<Self> {
        let dim = 2 * n;
        let t = orthonormalize(tangent.iter().map(|v| v.orthonormal_coords()), dim, 1e-9);
        let normal = linalg::orthogonal_complement(&t, dim);
        let model = OrbitModel { n, shape, tangent: t, normal };
        let res = model.closure_residual();
        if res > 1e-10 {
            return Err(Error::domain(format!("tangent space is not a subalgebra (residual {res:.3e})")));
        }
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> &OrbitShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.tangent.ncols()
    }

    /// `AN`-orthonormal basis of the tangent space.
    pub fn tangent_basis(&self) -> Vec<ANVector> {
        self.tangent.column_iter().map(|c| ANVector::from_orthonormal_coords(&c.into_owned())).collect()
    }

    /// `AN`-orthonormal basis of the normal space.
    pub fn normal_basis(&self) -> Vec<ANVector> {
        self.normal.column_iter().map(|c| ANVector::from_orthonormal_coords(&c.into_owned())).collect()
    }

    /// Largest component of a bracket of tangent vectors normal to the orbit.
    pub fn closure_residual(&self) -> f64 {
        let basis = self.tangent_basis();
        let mut worst: f64 = 0.0;
        for (i, x) in basis.iter().enumerate() {
            for y in &basis[i + 1..] {
                let br = an_bracket_unchecked(x, y).orthonormal_coords();
                worst = worst.max((self.normal.transpose() * br).norm());
            }
        }
        worst
    }

    fn normal_residual(&self, v: &ANVector) -> f64 {
        (self.tangent.transpose() * v.orthonormal_coords()).norm()
    }

    /// Shape operator `S_ξ V = −(∇_V ξ)ᵀ` in the orthonormal tangent basis.
    pub fn shape_operator(&self, xi: &ANVector) -> Result<DMatrix<f64>> {
        ensure_dim(2 * (self.n - 1), xi.u_part.len())?;
        if (xi.norm() - 1.0).abs() > MEMBER_TOL {
            return Err(Error::domain("normal vector must have unit length"));
        }
        if self.normal_residual(xi) > MEMBER_TOL {
            return Err(Error::domain("vector is not normal to the orbit"));
        }
        Ok(self.shape_operator_unchecked(xi))
    }

    fn shape_operator_unchecked(&self, xi: &ANVector) -> DMatrix<f64> {
        let basis = self.tangent_basis();
        let k = basis.len();
        let cols: Vec<DVector<f64>> = basis
            .iter()
            .map(|v| -(self.tangent.transpose() * levi_civita_unchecked(v, xi).orthonormal_coords()))
            .collect();
        linalg::columns_to_matrix(&cols, k)
    }

    /// Mean curvature vector `Σ_j tr(S_{ν_j}) ν_j` over an orthonormal normal basis.
    pub fn mean_curvature(&self) -> ANVector {
        let mut h = ANVector::zero(self.n);
        for nu in self.normal_basis() {
            let tr = self.shape_operator_unchecked(&nu).trace();
            h = h.add(&nu.scale(tr));
        }
        h
    }

    /// Closed form of the mean curvature for the supported shapes:
    /// `(3 + dim w)/(2(a² + ‖X‖²)) (‖X‖²B − aX)` for tilted orbits and
    /// `½(2 + dim w)B` for flag orbits (norms in the `AN` metric).
    pub fn mean_curvature_closed_form(&self) -> ANVector {
        match &self.shape {
            OrbitShape::Flag { w_dim } => ANVector::b(self.n).scale(0.5 * (2 + w_dim) as f64),
            OrbitShape::Tilted { a, x, w_dim } => {
                let xv = ANVector::alpha(x.clone());
                let x2 = inner_an(&xv, &xv);
                let c = (3 + w_dim) as f64 / (2.0 * (a * a + x2));
                ANVector::b(self.n).scale(x2).sub(&xv.scale(*a)).scale(c)
            }
        }
    }

    /// Largest gap between the principal curvatures of `S_ξ` and their negatives,
    /// over the normal basis and `samples` random unit normals. Zero for austere orbits.
    pub fn austerity_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = crate::sampling::rng(seed);
        let mut normals = self.normal_basis();
        for _ in 0..samples {
            let c = crate::sampling::unit_vector_in(&mut rng, &self.normal);
            normals.push(ANVector::from_orthonormal_coords(&c));
        }
        normals
            .iter()
            .map(|xi| {
                let s = self.shape_operator_unchecked(xi);
                let sym = (&s + s.transpose()) * 0.5;
                let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
                ev.sort_by(f64::total_cmp);
                let k = ev.len();
                (0..k).map(|i| (ev[i] + ev[k - 1 - i]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Isotropy `{T ∈ q : [T, ξ] = 0}` of `q ⊆ k_0` at `Exp(ξ)(o)`, `ξ ∈ g_α`.
pub fn isotropy_at(rd: &RootDecomposition, q: &[AlgElement], xi: &AlgElement) -> Result<Vec<AlgElement>> {
    for t in q {
        ensure_dim(rd.n(), t.n())?;
    }
    ensure_dim(rd.n(), xi.n())?;
    let q = rd.orthonormalize(q);
    if q.is_empty() {
        return Ok(Vec::new());
    }
    let cols: Vec<DVector<f64>> = q.iter().map(|t| rd.coords(&bracket_unchecked(t, xi))).collect();
    let m = linalg::columns_to_matrix(&cols, rd.dim());
    let scale = xi.norm().max(1.0);
    let ns = null_space(&(m / scale), 1e-9);
    Ok(ns
        .column_iter()
        .map(|c| AlgElement::combination(rd.n(), c.as_slice(), &q))
        .collect())
}

/// `Ad(exp X) h` for `X ∈ a ⊕ n`, re-orthonormalised; `h ⊆ k_0 ⊕ a ⊕ n`.
pub fn conjugate_subalgebra(rd: &RootDecomposition, h: &[AlgElement], g_exponent: &ANVector) -> Result<Vec<AlgElement>> {
    ensure_dim(2 * (rd.n() - 1), g_exponent.u_part.len())?;
    let allowed = [RootSpace::Zero, RootSpace::Alpha, RootSpace::TwoAlpha];
    for t in h {
        ensure_dim(rd.n(), t.n())?;
        if rd.outside_residual(t, &allowed) > MEMBER_TOL {
            return Err(Error::domain("subalgebra must lie in k_0 ⊕ a ⊕ n"));
        }
    }
    let x = g_exponent.to_alg(rd);
    let moved: Vec<AlgElement> = h.iter().map(|t| rd.ad_exp_conjugation(&x, t)).collect();
    let out = rd.orthonormalize(&moved);
    for t in &out {
        if rd.outside_residual(t, &allowed) > MEMBER_TOL {
            return Err(Error::consistency("conjugated subalgebra left k_0 ⊕ a ⊕ n"));
        }
    }
    Ok(out)
}
