//! Computational toolkit for polar actions on complex hyperbolic space `CH^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`kahler`] — real subspaces of `C^m`, Kähler angles and the canonical
//!   decomposition into constant-angle pieces, normalizers and congruence.
//! * [`su1n`] — the matrix model of `su(1,n)` with its Cartan involution,
//!   metric and restricted root space decomposition.
//! * [`an_geometry`] — the solvable group `AN` with its left-invariant metric:
//!   connection, curvature, shape operators and mean curvature of orbits.
//! * [`polar`] — constructors for the two families of polar actions, the
//!   numerical polarity criterion and orbit-equivalence invariants.
//! * [`selfcheck`] — the identity suite run by `chpolar selfcheck`.

pub mod an_geometry;
pub mod error;
pub mod kahler;
pub mod linalg;
pub mod polar;
pub mod sampling;
pub mod selfcheck;
pub mod su1n;
mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
