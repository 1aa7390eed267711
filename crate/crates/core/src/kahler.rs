//! Real subspaces of a complex Euclidean space `C^m` and their Kähler angles.
//!
//! `C^m` is realified with interleaved coordinates and the Euclidean product
//! `Re<u, v>`. A [`RealSubspace`] stores an orthonormal real basis; every real
//! subspace splits uniquely into pieces of constant Kähler angle whose complex
//! spans are mutually orthogonal ([`decompose`]).

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{
    self, apply_j, complexify, matrix_columns, null_space, orthonormalize, realify, realify_matrix, C64,
};
use crate::Tolerances;

/// An `R`-linear subspace of `C^m`, stored by an orthonormal real basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealSubspaceRepr", into = "RealSubspaceRepr")]
pub struct RealSubspace {
    ambient: usize,
    basis: DMatrix<f64>,
}

/// JSON layout: `{ "ambient_complex_dim": m, "basis": [[re_1, im_1, ...], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealSubspaceRepr {
    pub ambient_complex_dim: usize,
    pub basis: Vec<Vec<f64>>,
}

impl TryFrom<RealSubspaceRepr> for RealSubspace {
    type Error = Error;

    fn try_from(r: RealSubspaceRepr) -> Result<Self> {
        let vectors = r.basis.into_iter().map(DVector::from_vec).collect();
        RealSubspace::new(r.ambient_complex_dim, vectors)
    }
}

impl From<RealSubspace> for RealSubspaceRepr {
    fn from(v: RealSubspace) -> Self {
        RealSubspaceRepr {
            ambient_complex_dim: v.ambient,
            basis: v.basis.column_iter().map(|c| c.iter().copied().collect()).collect(),
        }
    }
}

const GS_DROP: f64 = 1e-9;

impl RealSubspace {
    /// Span of `vectors` (need not be orthonormal or independent).
    pub fn new(ambient: usize, vectors: Vec<DVector<f64>>) -> Result<Self> {
        for v in &vectors {
            ensure_dim(2 * ambient, v.len())?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain("basis vector has non-finite entries"));
            }
        }
        Ok(Self {
            ambient,
            basis: orthonormalize(vectors, 2 * ambient, GS_DROP),
        })
    }

    /// Real span of complex vectors.
    pub fn from_complex(ambient: usize, vectors: &[DVector<C64>]) -> Result<Self> {
        Self::new(ambient, vectors.iter().map(realify).collect())
    }

    pub(crate) fn from_orthonormal(ambient: usize, basis: DMatrix<f64>) -> Self {
        debug_assert_eq!(basis.nrows(), 2 * ambient);
        Self { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Self::from_orthonormal(ambient, DMatrix::zeros(2 * ambient, 0))
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_orthonormal(ambient, DMatrix::identity(2 * ambient, 2 * ambient))
    }

    pub fn ambient_complex_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Orthonormal basis as the columns of a `2m × dim` matrix.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<DVector<f64>> {
        matrix_columns(&self.basis)
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Relative distance `‖v − π v‖ / ‖v‖` (zero for `v = 0`).
    pub fn distance_ratio(&self, v: &DVector<f64>) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        (v - self.project(v)).norm() / n
    }

    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        v.len() == 2 * self.ambient && self.distance_ratio(v) <= tol
    }

    pub fn is_subspace_of(&self, other: &RealSubspace, tol: f64) -> bool {
        self.ambient == other.ambient && self.basis.column_iter().all(|c| other.contains(&c.into_owned(), tol))
    }

    /// Same subspace up to `tol` (compared via projectors).
    pub fn approx_eq(&self, other: &RealSubspace, tol: f64) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && linalg::max_abs_diff(&self.projector(), &other.projector()) <= tol
    }

    /// Largest deviation of `BᵀB` from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.dim();
        linalg::max_abs_diff(&(self.basis.transpose() * &self.basis), &DMatrix::identity(k, k))
    }

    /// Sum of subspaces (not necessarily orthogonal).
    pub fn sum(parts: &[&RealSubspace]) -> Result<Self> {
        let ambient = parts
            .first()
            .map(|p| p.ambient)
            .ok_or_else(|| Error::domain("empty sum of subspaces"))?;
        let mut vectors = Vec::new();
        for p in parts {
            ensure_dim(ambient, p.ambient)?;
            vectors.extend(p.basis_vectors());
        }
        Self::new(ambient, vectors)
    }

    /// Image under a complex-linear map of `C^m`.
    pub fn transform(&self, a: &DMatrix<C64>) -> Result<Self> {
        ensure_dim(self.ambient, a.ncols())?;
        ensure_dim(self.ambient, a.nrows())?;
        let ra = realify_matrix(a);
        Self::new(self.ambient, self.basis_vectors().iter().map(|v| &ra * v).collect())
    }

    /// `J V`.
    pub fn j_image(&self) -> Self {
        Self::from_orthonormal(self.ambient, &linalg::j_matrix(self.ambient) * &self.basis)
    }
}

/// Kähler angle of the nonzero vector `v ∈ V`: the angle between `Jv` and `V`.
pub fn kahler_angle(space: &RealSubspace, v: &DVector<f64>, tol: &Tolerances) -> Result<f64> {
    ensure_dim(2 * space.ambient, v.len())?;
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::domain("Kähler angle of the zero vector"));
    }
    if !space.contains(v, tol.member) {
        return Err(Error::domain("vector does not lie in the subspace"));
    }
    let ratio = (space.project(&apply_j(v)).norm() / norm).clamp(0.0, 1.0);
    Ok(ratio.acos().clamp(0.0, FRAC_PI_2))
}

/// One constant-angle piece of a [`KahlerDecomposition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KahlerFactor {
    #[serde(rename = "angle_rad")]
    pub angle: f64,
    pub subspace: RealSubspace,
}

/// Orthogonal splitting `V = ⊕ V_φ` into constant Kähler angle pieces, angles strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KahlerDecomposition {
    pub factors: Vec<KahlerFactor>,
}

impl KahlerDecomposition {
    pub fn angles(&self) -> Vec<f64> {
        self.factors.iter().map(|f| f.angle).collect()
    }

    /// `(angle, dim)` pairs in increasing angle order.
    pub fn signature(&self) -> Vec<(f64, usize)> {
        self.factors.iter().map(|f| (f.angle, f.subspace.dim())).collect()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.subspace.dim()).sum()
    }

    pub fn factor(&self, angle: f64, tol: f64) -> Option<&KahlerFactor> {
        self.factors.iter().find(|f| (f.angle - angle).abs() <= tol)
    }

    /// Direct sum of all factors.
    pub fn assemble(&self, ambient: usize) -> RealSubspace {
        let cols: Vec<DVector<f64>> = self.factors.iter().flat_map(|f| f.subspace.basis_vectors()).collect();
        RealSubspace::from_orthonormal(ambient, linalg::columns_to_matrix(&cols, 2 * ambient))
    }

    /// Real dimension of `C V`.
    pub fn complex_span_dim(&self) -> usize {
        self.factors
            .iter()
            .map(|f| if f.angle == 0.0 { f.subspace.dim() } else { 2 * f.subspace.dim() })
            .sum()
    }

    /// Same angle list (within `angle_tol`) and same factor dimensions.
    pub fn same_moduli(&self, other: &KahlerDecomposition, angle_tol: f64) -> bool {
        self.factors.len() == other.factors.len()
            && self
                .factors
                .iter()
                .zip(&other.factors)
                .all(|(a, b)| (a.angle - b.angle).abs() <= angle_tol && a.subspace.dim() == b.subspace.dim())
    }
}

/// Matrix of `P = π_V ∘ J` on `V` in the stored basis (skew-symmetric).
fn kahler_operator(space: &RealSubspace) -> DMatrix<f64> {
    let b = space.basis();
    b.transpose() * linalg::j_matrix(space.ambient) * b
}

/// Canonical decomposition of `V` into constant Kähler angle pieces.
///
/// Eigenvalues `cos²φ` of `-P²` are snapped to 1 (resp. 0) within `tol.eig`
/// and grouped when consecutive values differ by at most `tol.eig`.
pub fn decompose(space: &RealSubspace, tol: &Tolerances) -> KahlerDecomposition {
    if space.is_zero() {
        return KahlerDecomposition { factors: Vec::new() };
    }
    let p = kahler_operator(space);
    let psd = p.transpose() * &p;
    let psd = (&psd + psd.transpose()) * 0.5;
    let eig = SymmetricEigen::new(psd);

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    let snapped: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            let l = l.clamp(0.0, 1.0);
            if l >= 1.0 - tol.eig {
                1.0
            } else if l <= tol.eig {
                0.0
            } else {
                l
            }
        })
        .collect();
    order.sort_by(|&a, &b| snapped[b].partial_cmp(&snapped[a]).unwrap());

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match groups.last_mut() {
            Some(g) if (snapped[*g.last().unwrap()] - snapped[idx]).abs() <= tol.eig => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }

    let b = space.basis();
    let factors = groups
        .into_iter()
        .map(|g| {
            let cos2 = g.iter().map(|&i| snapped[i]).sum::<f64>() / g.len() as f64;
            let angle = if cos2 == 1.0 {
                0.0
            } else if cos2 == 0.0 {
                FRAC_PI_2
            } else {
                (1.0 - cos2).sqrt().atan2(cos2.sqrt())
            };
            let vecs: Vec<DVector<f64>> = g.iter().map(|&i| b * eig.eigenvectors.column(i)).collect();
            KahlerFactor {
                angle,
                subspace: RealSubspace::new(space.ambient, vecs).expect("dimensions agree"),
            }
        })
        .collect();
    KahlerDecomposition { factors }
}

fn unit(dim: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 })
}

/// Real coordinate vector `e_k` and `J e_k` of `C^m` in interleaved layout.
fn e_re(m: usize, k: usize) -> DVector<f64> {
    unit(2 * m, 2 * k)
}

fn e_im(m: usize, k: usize) -> DVector<f64> {
    unit(2 * m, 2 * k + 1)
}

/// Vectors spanning a constant-angle block placed on coordinates `offset..`.
///
/// For `φ ∈ [0, π/2)` uses `cos(φ/2)e_j + sin(φ/2)Jf_j`, `cos(φ/2)Je_j + sin(φ/2)f_j`
/// with `e_j = offset + j`, `f_j = offset + pairs + j`; occupies `2·pairs` coordinates.
/// For `φ = π/2` returns `pairs` real coordinate axes.
fn constant_angle_block(pairs: usize, angle: f64, ambient: usize, offset: usize) -> Vec<DVector<f64>> {
    if angle == FRAC_PI_2 {
        return (0..pairs).map(|j| e_re(ambient, offset + j)).collect();
    }
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let mut out = Vec::with_capacity(2 * pairs);
    for j in 0..pairs {
        let e = offset + j;
        let f = offset + pairs + j;
        out.push(e_re(ambient, e) * c + e_im(ambient, f) * s);
        out.push(e_im(ambient, e) * c + e_re(ambient, f) * s);
    }
    out
}

fn check_angle(angle: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&angle) || !angle.is_finite() {
        return Err(Error::domain(format!("angle {angle} outside [0, π/2]")));
    }
    Ok(())
}

/// Subspace of constant Kähler angle `φ` and dimension `2·pairs` in `C^ambient`
/// (needs `ambient ≥ 2·pairs`); for `φ = π/2` a totally real subspace of dimension `pairs`.
pub fn make_constant_angle(pairs: usize, angle: f64, ambient: usize) -> Result<RealSubspace> {
    check_angle(angle)?;
    let needed = if angle == FRAC_PI_2 { pairs } else { 2 * pairs };
    if ambient < needed {
        return Err(Error::domain(format!(
            "constant angle block needs complex dimension {needed}, ambient is {ambient}"
        )));
    }
    RealSubspace::new(ambient, constant_angle_block(pairs, angle, ambient, 0))
}

/// Canonical representative of a Kähler moduli class, given as `(angle, real dim)` pieces
/// placed on consecutive coordinate blocks: a complex piece of dimension `2a` uses `a`
/// coordinates, a piece of angle `φ ∈ (0, π/2)` and dimension `2p` uses `2p` coordinates,
/// a totally real piece of dimension `c` uses `c` coordinates.
pub fn canonical_subspace(ambient: usize, signature: &[(f64, usize)]) -> Result<RealSubspace> {
    let mut vectors = Vec::new();
    let mut offset = 0;
    for &(angle, dim) in signature {
        check_angle(angle)?;
        if angle == FRAC_PI_2 {
            if offset + dim > ambient {
                return Err(Error::domain("signature does not fit into the ambient space"));
            }
            vectors.extend(constant_angle_block(dim, angle, ambient, offset));
            offset += dim;
            continue;
        }
        if dim % 2 != 0 {
            return Err(Error::domain(format!("piece of angle {angle} < π/2 must have even dimension")));
        }
        let pairs = dim / 2;
        if angle == 0.0 {
            if offset + pairs > ambient {
                return Err(Error::domain("signature does not fit into the ambient space"));
            }
            for j in 0..pairs {
                vectors.push(e_re(ambient, offset + j));
                vectors.push(e_im(ambient, offset + j));
            }
            offset += pairs;
        } else {
            if offset + 2 * pairs > ambient {
                return Err(Error::domain("signature does not fit into the ambient space"));
            }
            vectors.extend(constant_angle_block(pairs, angle, ambient, offset));
            offset += 2 * pairs;
        }
    }
    RealSubspace::new(ambient, vectors)
}

/// `C V = V + JV`.
pub fn complex_span(space: &RealSubspace) -> RealSubspace {
    let mut vectors = space.basis_vectors();
    vectors.extend(vectors.clone().iter().map(apply_j));
    RealSubspace::new(space.ambient, vectors).expect("dimensions agree")
}

/// `V ⊖ U`, the orthogonal complement of `U` inside `V`; requires `U ⊆ V`.
pub fn ominus(space: &RealSubspace, sub: &RealSubspace, tol: &Tolerances) -> Result<RealSubspace> {
    ensure_dim(space.ambient, sub.ambient)?;
    if !sub.is_subspace_of(space, tol.member) {
        return Err(Error::domain("ominus: U is not contained in V"));
    }
    let k = sub.dim();
    let mut vectors = sub.basis_vectors();
    vectors.extend(space.basis_vectors());
    let combined = orthonormalize(vectors, 2 * space.ambient, 1e-8);
    let rest = combined.columns(k, combined.ncols() - k).into_owned();
    Ok(RealSubspace::from_orthonormal(space.ambient, rest))
}

/// `C^m ⊖ V`.
pub fn orthogonal_complement(space: &RealSubspace) -> RealSubspace {
    RealSubspace::from_orthonormal(
        space.ambient,
        linalg::orthogonal_complement(space.basis(), 2 * space.ambient),
    )
}

/// Outcome of [`congruent`].
#[derive(Clone, Debug)]
pub struct Congruence {
    pub congruent: bool,
    /// Unitary `A` with `A V_φ = W_φ` for every angle, when congruent.
    pub witness: Option<DMatrix<C64>>,
}

fn hermitian_dot(a: &DVector<C64>, b: &DVector<C64>) -> C64 {
    a.dotc(b)
}

/// Appends `v` to a Hermitian-orthonormal frame if it is independent; returns whether it was kept.
fn push_complex(frame: &mut Vec<DVector<C64>>, v: DVector<C64>, drop_tol: f64) -> bool {
    let n0 = v.norm();
    if n0 == 0.0 {
        return false;
    }
    let mut r = v;
    for _ in 0..2 {
        for q in frame.iter() {
            let c = hermitian_dot(q, &r);
            r -= q * c;
        }
    }
    let n = r.norm();
    if n > drop_tol * n0 {
        frame.push(r / C64::new(n, 0.0));
        true
    } else {
        false
    }
}

/// Complex orthonormal frame of `C^m` adapted to the decomposition:
/// for each factor in order, the frame vectors from which the factor is built by the
/// constant-angle recipe, followed by a frame of `C^m ⊖ C V`.
fn adapted_frame(dec: &KahlerDecomposition, ambient: usize) -> Result<Vec<DVector<C64>>> {
    let mut frame: Vec<DVector<C64>> = Vec::with_capacity(ambient);
    let jm = linalg::j_matrix(ambient);
    for f in &dec.factors {
        let vs = f.subspace.basis_vectors();
        if f.angle == 0.0 {
            for v in vs {
                push_complex(&mut frame, complexify(&v), 1e-6);
            }
        } else if f.angle == FRAC_PI_2 {
            for v in vs {
                if !push_complex(&mut frame, complexify(&v), 1e-6) {
                    return Err(Error::consistency("totally real factor is not C-independent"));
                }
            }
        } else {
            let cos = f.angle.cos();
            let (ch, sh) = ((f.angle / 2.0).cos(), (f.angle / 2.0).sin());
            let proj = f.subspace.projector();
            let mut adapted: Vec<DVector<f64>> = Vec::new();
            for v in vs {
                let mut r = v;
                for q in &adapted {
                    let c = q.dot(&r);
                    r.axpy(-c, q, 1.0);
                }
                let n = r.norm();
                if n <= 1e-6 {
                    continue;
                }
                let r = r / n;
                let mut s = &proj * (&jm * &r) / cos;
                for q in &adapted {
                    let c = q.dot(&s);
                    s.axpy(-c, q, 1.0);
                }
                let s = s.normalize();
                // r = cos(φ/2) e + sin(φ/2) J f,  s = cos(φ/2) J e + sin(φ/2) f
                let jr = apply_j(&r);
                let e = -apply_j(&(&s + &jr)) / (2.0 * ch);
                let fv = (&s - &jr) / (2.0 * sh);
                for x in [e, fv] {
                    if !push_complex(&mut frame, complexify(&x), 1e-6) {
                        return Err(Error::consistency("constant-angle frame is degenerate"));
                    }
                }
                adapted.push(r);
                adapted.push(s);
            }
        }
    }
    for k in 0..ambient {
        if frame.len() == ambient {
            break;
        }
        let mut e = DVector::from_element(ambient, C64::new(0.0, 0.0));
        e[k] = C64::new(1.0, 0.0);
        push_complex(&mut frame, e, 1e-6);
    }
    if frame.len() != ambient {
        return Err(Error::consistency("adapted frame is incomplete"));
    }
    Ok(frame)
}

/// Whether `V` and `W` are congruent under `U(m)`; a witness unitary is returned when they are.
pub fn congruent(v: &RealSubspace, w: &RealSubspace, tol: &Tolerances) -> Result<Congruence> {
    ensure_dim(v.ambient, w.ambient)?;
    let dv = decompose(v, tol);
    let dw = decompose(w, tol);
    congruent_decomposed(&dv, &dw, v.ambient, tol)
}

pub(crate) fn congruent_decomposed(
    dv: &KahlerDecomposition,
    dw: &KahlerDecomposition,
    ambient: usize,
    tol: &Tolerances,
) -> Result<Congruence> {
    if !dv.same_moduli(dw, tol.angle) {
        return Ok(Congruence { congruent: false, witness: None });
    }
    let fv = adapted_frame(dv, ambient)?;
    let fw = adapted_frame(dw, ambient)?;
    let mv = DMatrix::from_columns(&fv);
    let mw = DMatrix::from_columns(&fw);
    Ok(Congruence {
        congruent: true,
        witness: Some(mw * mv.adjoint()),
    })
}

/// Real basis of `{T ∈ u(m) : T V ⊆ V}` as skew-Hermitian matrices.
pub fn normalizer_algebra(space: &RealSubspace, tol: &Tolerances) -> Vec<DMatrix<C64>> {
    let m = space.ambient;
    let generators = linalg::unitary_algebra_basis(m);
    if space.is_zero() || space.dim() == 2 * m {
        return generators;
    }
    let off = DMatrix::identity(2 * m, 2 * m) - space.projector();
    let b = space.basis();
    let k = b.ncols();
    let mut constraints = DMatrix::zeros(2 * m * k, generators.len());
    for (col, t) in generators.iter().enumerate() {
        let image = &off * realify_matrix(t) * b;
        for j in 0..k {
            constraints.view_mut((2 * m * j, col), (2 * m, 1)).copy_from(&image.column(j));
        }
    }
    let null = null_space(&constraints, tol.rank);
    null.column_iter()
        .map(|c| {
            generators
                .iter()
                .zip(c.iter())
                .fold(DMatrix::zeros(m, m), |acc, (g, &x)| acc + g * C64::new(x, 0.0))
        })
        .collect()
}

/// `Σ_{φ<π/2} (m_φ/2)² + m_{π/2}(m_{π/2}−1)/2 + (m_0^⊥/2)²` where `m_0^⊥ = dim(C^m ⊖ C V)`.
pub fn normalizer_dimension_formula(space: &RealSubspace, tol: &Tolerances) -> usize {
    let dec = decompose(space, tol);
    normalizer_dimension_from(&dec, space.ambient)
}

pub(crate) fn normalizer_dimension_from(dec: &KahlerDecomposition, ambient: usize) -> usize {
    let mut total = 0;
    for f in &dec.factors {
        let d = f.subspace.dim();
        if f.angle == FRAC_PI_2 {
            total += d * d.saturating_sub(1) / 2;
        } else {
            total += (d / 2) * (d / 2);
        }
    }
    let rest = 2 * ambient - dec.complex_span_dim();
    total + (rest / 2) * (rest / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn angle_of_complex_line_is_zero() {
        let v = RealSubspace::new(2, vec![e_re(2, 0), e_im(2, 0)]).unwrap();
        assert!(kahler_angle(&v, &e_re(2, 0), &tol()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn angle_of_real_plane_is_right() {
        let v = RealSubspace::new(2, vec![e_re(2, 0), e_re(2, 1)]).unwrap();
        assert!((kahler_angle(&v, &e_re(2, 0), &tol()).unwrap() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn pair_basis_has_angle_pi_over_three() {
        let (c, s) = (FRAC_PI_6.cos(), FRAC_PI_6.sin());
        let v1 = e_re(2, 0) * c + e_im(2, 1) * s;
        let v2 = e_im(2, 0) * c + e_re(2, 1) * s;
        let v = RealSubspace::new(2, vec![v1.clone(), v2.clone()]).unwrap();
        for x in [v1, v2] {
            assert!((kahler_angle(&v, &x, &tol()).unwrap() - FRAC_PI_3).abs() < 1e-12);
        }
    }

    #[test]
    fn kahler_angle_rejects_zero_and_outside_vectors() {
        let v = RealSubspace::new(2, vec![e_re(2, 0)]).unwrap();
        assert!(matches!(kahler_angle(&v, &DVector::zeros(4), &tol()), Err(Error::Domain(_))));
        assert!(matches!(kahler_angle(&v, &e_re(2, 1), &tol()), Err(Error::Domain(_))));
    }

    #[test]
    fn decompose_full_space() {
        let d = decompose(&RealSubspace::full(2), &tol());
        assert_eq!(d.signature(), vec![(0.0, 4)]);
    }

    #[test]
    fn decompose_totally_real_plane() {
        let v = RealSubspace::new(2, vec![e_re(2, 0), e_re(2, 1)]).unwrap();
        assert_eq!(decompose(&v, &tol()).signature(), vec![(FRAC_PI_2, 2)]);
    }

    #[test]
    fn decompose_mixed_and_sample_angles() {
        let v = RealSubspace::new(2, vec![e_re(2, 0), e_im(2, 0), e_re(2, 1)]).unwrap();
        let d = decompose(&v, &tol());
        assert_eq!(d.signature(), vec![(0.0, 2), (FRAC_PI_2, 1)]);
        // per-vector oracle
        let mut rng = crate::sampling::rng(3);
        for f in &d.factors {
            for _ in 0..20 {
                let x = crate::sampling::unit_vector_in(&mut rng, f.subspace.basis());
                let a = kahler_angle(&f.subspace, &x, &tol()).unwrap();
                assert!((a - f.angle).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn decompose_zero_subspace_is_empty() {
        assert!(decompose(&RealSubspace::zero(3), &tol()).factors.is_empty());
    }

    #[test]
    fn constant_angle_constructions() {
        let d = decompose(&make_constant_angle(1, 0.0, 2).unwrap(), &tol());
        assert_eq!(d.signature(), vec![(0.0, 2)]);
        let d = decompose(&make_constant_angle(1, FRAC_PI_3, 2).unwrap(), &tol());
        assert_eq!(d.factors.len(), 1);
        assert!((d.factors[0].angle - FRAC_PI_3).abs() < 1e-10);
        let v = make_constant_angle(2, FRAC_PI_4, 4).unwrap();
        let d = decompose(&v, &tol());
        assert_eq!(d.factors.len(), 1);
        assert_eq!(d.factors[0].subspace.dim(), 4);
        let mut rng = crate::sampling::rng(11);
        for _ in 0..50 {
            let x = crate::sampling::unit_vector_in(&mut rng, v.basis());
            assert!((kahler_angle(&v, &x, &tol()).unwrap() - FRAC_PI_4).abs() < 1e-6);
        }
        let r = make_constant_angle(3, FRAC_PI_2, 3).unwrap();
        assert_eq!(decompose(&r, &tol()).signature(), vec![(FRAC_PI_2, 3)]);
    }

    #[test]
    fn constant_angle_dimension_bounds() {
        assert!(make_constant_angle(2, FRAC_PI_3, 3).is_err());
        assert!(make_constant_angle(1, -0.1, 3).is_err());
        assert!(make_constant_angle(1, PI, 3).is_err());
        assert!(make_constant_angle(4, FRAC_PI_2, 3).is_err());
    }

    #[test]
    fn complex_span_dimensions() {
        let real = RealSubspace::new(3, vec![e_re(3, 0), e_re(3, 2)]).unwrap();
        assert_eq!(complex_span(&real).dim(), 4);
        let cx = make_constant_angle(1, 0.0, 3).unwrap();
        assert!(complex_span(&cx).approx_eq(&cx, 1e-12));
    }

    #[test]
    fn complement_in_complex_span_keeps_angle() {
        let v = make_constant_angle(1, FRAC_PI_3, 2).unwrap();
        let perp = ominus(&complex_span(&v), &v, &tol()).unwrap();
        assert_eq!(perp.dim(), 2);
        let d = decompose(&perp, &tol());
        assert_eq!(d.factors.len(), 1);
        assert!((d.factors[0].angle - FRAC_PI_3).abs() < 1e-9);
    }

    #[test]
    fn ominus_requires_containment() {
        let v = RealSubspace::new(2, vec![e_re(2, 0)]).unwrap();
        let u = RealSubspace::new(2, vec![e_re(2, 1)]).unwrap();
        assert!(matches!(ominus(&v, &u, &tol()), Err(Error::Domain(_))));
    }

    #[test]
    fn congruence_examples() {
        let v = make_constant_angle(1, FRAC_PI_3, 2).unwrap();
        let c = congruent(&v, &v, &tol()).unwrap();
        assert!(c.congruent);
        let a = c.witness.unwrap();
        assert!(v.transform(&a).unwrap().approx_eq(&v, 1e-10));

        let w = make_constant_angle(1, FRAC_PI_4, 2).unwrap();
        assert!(!congruent(&v, &w, &tol()).unwrap().congruent);
        assert!(congruent(&v, &RealSubspace::zero(3), &tol()).is_err());
    }

    #[test]
    fn normalizer_examples() {
        let t = tol();
        for m in 1..5 {
            let real = RealSubspace::new(m, (0..m).map(|k| e_re(m, k)).collect()).unwrap();
            assert_eq!(normalizer_algebra(&real, &t).len(), m * (m - 1) / 2);
            assert_eq!(normalizer_dimension_formula(&real, &t), m * (m - 1) / 2);
            assert_eq!(normalizer_algebra(&RealSubspace::full(m), &t).len(), m * m);
            assert_eq!(normalizer_dimension_formula(&RealSubspace::full(m), &t), m * m);
        }
        // constant angle π/3 plane in C²: U(V_φ) ≅ U(1) and C V = C², so dimension 1
        let v = make_constant_angle(1, FRAC_PI_3, 2).unwrap();
        assert_eq!(normalizer_algebra(&v, &t).len(), 1);
        assert_eq!(normalizer_dimension_formula(&v, &t), 1);
    }

    #[test]
    fn normalizer_elements_preserve_subspace() {
        let t = tol();
        let v = canonical_subspace(4, &[(0.0, 2), (FRAC_PI_2, 1)]).unwrap();
        for g in normalizer_algebra(&v, &t) {
            let img = realify_matrix(&g) * v.basis();
            for c in img.column_iter() {
                assert!(v.distance_ratio(&c.into_owned()) < 1e-9 || c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_subspace_layout() {
        let t = tol();
        let v = canonical_subspace(5, &[(0.0, 2), (FRAC_PI_3, 2), (FRAC_PI_2, 2)]).unwrap();
        let d = decompose(&v, &t);
        assert_eq!(d.factors.len(), 3);
        assert_eq!(d.signature().iter().map(|s| s.1).collect::<Vec<_>>(), vec![2, 2, 2]);
        assert!(canonical_subspace(2, &[(FRAC_PI_3, 2), (0.0, 2)]).is_err());
        assert!(canonical_subspace(3, &[(FRAC_PI_3, 3)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = make_constant_angle(1, FRAC_PI_3, 2).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("ambient_complex_dim"));
        let back: RealSubspace = serde_json::from_str(&s).unwrap();
        assert!(back.approx_eq(&v, 1e-15));
        let bad = r#"{"ambient_complex_dim":2,"basis":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<RealSubspace>(bad).is_err());
    }
}
