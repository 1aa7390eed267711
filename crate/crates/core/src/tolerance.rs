use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Grouping/snapping threshold on eigenvalues `cos²φ` of `-P²`.
    pub eig: f64,
    /// Angle comparison in radians.
    pub angle: f64,
    /// Orthonormality of stored bases.
    pub ortho: f64,
    /// Relative distance for subspace membership.
    pub member: f64,
    /// Singular values below `rank * largest` count as zero.
    pub rank: f64,
    /// Residual bound for algebraic identities (closure, bracket condition, slice orthogonality).
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig: 1e-8,
            angle: 1e-6,
            ortho: 1e-10,
            member: 1e-8,
            rank: 1e-8,
            residual: 1e-9,
        }
    }
}
