//! Seeded random sampling. Every stochastic routine in the crate takes an explicit seed.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::C64;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

/// Uniform random unit vector in `R^dim` (zero vector when `dim == 0`).
pub fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    if dim == 0 {
        return DVector::zeros(0);
    }
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Random unit vector in the column span of an orthonormal `basis`.
pub fn unit_vector_in<R: Rng>(rng: &mut R, basis: &DMatrix<f64>) -> DVector<f64> {
    basis * unit_vector(rng, basis.ncols())
}

/// Haar-distributed unitary matrix via QR of a complex Ginibre matrix.
pub fn unitary<R: Rng>(rng: &mut R, m: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(m, m, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = qr.unpack();
    let phases = DMatrix::from_diagonal(&DVector::from_fn(m, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    }));
    q * phases
}
