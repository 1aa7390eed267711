//! Small dense linear algebra helpers shared by the geometric modules.
//!
//! Real vectors of `C^m` use the interleaved layout `[re_1, im_1, ..., re_m, im_m]`.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// Modified Gram–Schmidt with one re-orthogonalisation pass.
///
/// Vectors whose residual falls below `drop_tol` times their original norm are
/// discarded, so the result is an orthonormal basis of the span.
pub fn orthonormalize<I>(vectors: I, dim: usize, drop_tol: f64) -> DMatrix<f64>
where
    I: IntoIterator<Item = DVector<f64>>,
{
    orthonormalize_with(vectors, dim, drop_tol, |a, b| a.dot(b))
}

/// Gram–Schmidt with respect to an arbitrary inner product on `R^dim`.
pub fn orthonormalize_with<I, F>(vectors: I, dim: usize, drop_tol: f64, inner: F) -> DMatrix<f64>
where
    I: IntoIterator<Item = DVector<f64>>,
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        assert_eq!(v.len(), dim, "vector length does not match ambient dimension");
        let norm0 = inner(&v, &v).max(0.0).sqrt();
        if norm0 == 0.0 || !norm0.is_finite() {
            continue;
        }
        let mut r = v;
        for _ in 0..2 {
            for q in &kept {
                let c = inner(q, &r);
                r.axpy(-c, q, 1.0);
            }
        }
        let norm = inner(&r, &r).max(0.0).sqrt();
        if norm > drop_tol * norm0 {
            kept.push(r / norm);
        }
    }
    columns_to_matrix(&kept, dim)
}

pub fn columns_to_matrix(cols: &[DVector<f64>], rows: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

pub fn matrix_columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

fn padded_svd(a: &DMatrix<f64>) -> nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    let (r, c) = a.shape();
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        p
    } else {
        a.clone()
    };
    padded.svd(false, true)
}

fn rank_threshold(singular: &DVector<f64>, rel_tol: f64) -> f64 {
    let smax = singular.iter().cloned().fold(0.0, f64::max);
    (rel_tol * smax).max(1e-13)
}

/// Numerical rank: singular values above `rel_tol * largest` count.
pub fn rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let s = a.singular_values();
    let thr = rank_threshold(&s, rel_tol);
    s.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis (as columns) of the right null space of `a`.
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let c = a.ncols();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return DMatrix::identity(c, c);
    }
    let svd = padded_svd(a);
    let vt = svd.v_t.expect("requested V^T");
    let thr = rank_threshold(&svd.singular_values, rel_tol);
    let null: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= thr)
        .map(|(i, _)| vt.row(i).transpose())
        .collect();
    columns_to_matrix(&null, c)
}

/// Orthonormal basis (as columns) of the column space of `a`, with the same
/// rank decision as [`rank`]; unlike Gram–Schmidt this ignores columns that are
/// pure round-off.
pub fn column_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let r = a.nrows();
    if r == 0 || a.ncols() == 0 {
        return DMatrix::zeros(r, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let thr = rank_threshold(&svd.singular_values, rel_tol);
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > thr)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    columns_to_matrix(&cols, r)
}

/// Orthonormal basis of the orthogonal complement of the column span of `basis`
/// (columns assumed orthonormal) inside `R^dim`.
pub fn orthogonal_complement(basis: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let mut cols = matrix_columns(basis);
    let k = cols.len();
    cols.extend((0..dim).map(|i| DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 })));
    let full = orthonormalize(cols, dim, 1e-8);
    full.columns(k, full.ncols() - k).into_owned()
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Multiplication by `i` in the interleaved layout.
pub fn apply_j(v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for k in 0..v.len() / 2 {
        out[2 * k] = -v[2 * k + 1];
        out[2 * k + 1] = v[2 * k];
    }
    out
}

/// Real `2m × 2m` matrix of multiplication by `i`.
pub fn j_matrix(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

pub fn realify(v: &DVector<C64>) -> DVector<f64> {
    DVector::from_fn(2 * v.len(), |i, _| {
        let z = v[i / 2];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}

pub fn complexify(v: &DVector<f64>) -> DVector<C64> {
    DVector::from_fn(v.len() / 2, |k, _| C64::new(v[2 * k], v[2 * k + 1]))
}

/// Real `2m × 2m` matrix of a complex-linear map of `C^m`.
pub fn realify_matrix(a: &DMatrix<C64>) -> DMatrix<f64> {
    let (r, c) = a.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = a[(i / 2, j / 2)];
        match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// Inverse of [`realify_matrix`] for matrices commuting with `J`.
pub fn complexify_matrix(a: &DMatrix<f64>) -> DMatrix<C64> {
    let (r, c) = a.shape();
    DMatrix::from_fn(r / 2, c / 2, |i, j| C64::new(a[(2 * i, 2 * j)], a[(2 * i + 1, 2 * j)]))
}

/// Flattens real and imaginary parts of all entries (row-major).
pub fn complex_matrix_coords(a: &DMatrix<C64>) -> DVector<f64> {
    let (r, c) = a.shape();
    let mut out = DVector::zeros(2 * r * c);
    for i in 0..r {
        for j in 0..c {
            let k = 2 * (i * c + j);
            out[k] = a[(i, j)].re;
            out[k + 1] = a[(i, j)].im;
        }
    }
    out
}

pub fn complex_matrix_from_coords(v: &DVector<f64>, r: usize, c: usize) -> DMatrix<C64> {
    DMatrix::from_fn(r, c, |i, j| {
        let k = 2 * (i * c + j);
        C64::new(v[k], v[k + 1])
    })
}

/// Frobenius norm of a complex matrix.
pub fn cnorm(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real basis of `u(m)`: `iE_jj`, `E_jk - E_kj`, `i(E_jk + E_kj)` for `j < k`.
pub fn unitary_algebra_basis(m: usize) -> Vec<DMatrix<C64>> {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(m * m);
    for j in 0..m {
        let mut d = DMatrix::zeros(m, m);
        d[(j, j)] = i;
        out.push(d);
        for k in j + 1..m {
            let mut a = DMatrix::zeros(m, m);
            a[(j, k)] = one;
            a[(k, j)] = -one;
            out.push(a);
            let mut s = DMatrix::zeros(m, m);
            s[(j, k)] = i;
            s[(k, j)] = i;
            out.push(s);
        }
    }
    out
}

/// Orthonormal (real Frobenius inner product) basis of the real span of complex matrices.
pub fn orthonormal_matrix_span(mats: &[DMatrix<C64>], rows: usize, cols: usize, drop_tol: f64) -> Vec<DMatrix<C64>> {
    let coords = mats.iter().map(complex_matrix_coords);
    let basis = orthonormalize(coords, 2 * rows * cols, drop_tol);
    basis
        .column_iter()
        .map(|c| complex_matrix_from_coords(&c.into_owned(), rows, cols))
        .collect()
}

/// Largest residual of projecting each `candidate` onto the real span of `basis`
/// (basis orthonormal for the real Frobenius inner product), relative to its norm.
pub fn matrix_span_residual(basis: &[DMatrix<C64>], candidate: &DMatrix<C64>) -> f64 {
    let v = complex_matrix_coords(candidate);
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut r = v.clone();
    for b in basis {
        let bc = complex_matrix_coords(b);
        let c = bc.dot(&r);
        r.axpy(-c, &bc, 1.0);
    }
    r.norm() / norm
}

pub fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

/// Residual of bracket-closure for the real span of `basis` (assumed orthonormal).
pub fn closure_residual(basis: &[DMatrix<C64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            let c = commutator(a, b);
            let scale = cnorm(a) * cnorm(b);
            if scale == 0.0 {
                continue;
            }
            let abs_res = matrix_span_residual(basis, &c) * cnorm(&c) / scale;
            worst = worst.max(abs_res);
        }
    }
    worst
}

/// Serde adapter writing a `DVector<f64>` as a plain JSON array.
pub mod dvector_serde {
    use nalgebra::DVector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DVector<f64>, D::Error> {
        Ok(DVector::from_vec(Vec::<f64>::deserialize(d)?))
    }
}

/// Serde adapter for lists of complex matrices: each matrix is a row-major nested
/// array whose entries are `[re, im]` pairs.
pub mod complex_matrices_serde {
    use nalgebra::DMatrix;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::C64;

    type Rows = Vec<Vec<[f64; 2]>>;

    pub fn to_rows(m: &DMatrix<C64>) -> Rows {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &Rows) -> Result<DMatrix<C64>, String> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err("ragged matrix rows".into());
        }
        if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err("non-finite matrix entry".into());
        }
        Ok(DMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(v: &[DMatrix<C64>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DMatrix<C64>>, D::Error> {
        Vec::<Rows>::deserialize(d)?
            .iter()
            .map(|r| from_rows(r).map_err(D::Error::custom))
            .collect()
    }
}
