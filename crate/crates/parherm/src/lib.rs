//! Strongly minimal palindromic pencil linearizations for para-Hermitian and
//! para-skew-Hermitian rational matrix functions.
//!
//! A rational matrix `R(z)` is para-Hermitian when `[R(1/conj(z))]^* = R(z)`.
//! No linear system matrix with palindromic symmetry can have transfer `R(z)`
//! itself, so this crate linearizes the weighted function `(1 + z) R(z)`
//! (more generally `(alpha + conj(alpha) z) R(z)`), producing pencils
//! `z M1 + M0` with `M0 = M1^*` (or `M0 = -M1^*` in the skew case) whose
//! transfer function reproduces the weighted `R` and whose eigenvalues carry
//! the pole/zero structure of `R` with the reciprocal pairing
//! `lambda <-> 1/conj(lambda)` intact.
//!
//! Modules, bottom up:
//! - [`numerics`]: dense complex kernel (SVD, LU solve, pencil eigenvalues).
//! - [`rmatrix`]: rational matrices in pole-coefficient form, pencils,
//!   paraconjugation, structure tags, transfer evaluation.
//! - [`moebius`]: the three Moebius families, closed-form substitution,
//!   palindromization of Hermitian / *-even pencils.
//! - [`decompose`]: additive split by pole stability class.
//! - [`realize`]: Taylor coefficients, block Hankels, minimal realization.
//! - [`linearize`]: the pencil constructors (split, Taylor, one-pole,
//!   compressed, Laurent, Moebius) and block combination.
//! - [`structural`]: partial multiplicities, invariant-order recovery,
//!   strong minimality, eigenvalue symmetry, exact-arithmetic oracle.
//! - [`genesis`]: seeded random generator of structured instances.
//! - [`verify`]: the certification battery shared by constructors and CLI.
//! - [`battery`]: batch sweep driver (rayon under the `parallel` feature).

pub mod error;
pub mod numerics;
pub mod rmatrix;
pub mod moebius;
pub mod decompose;
pub mod realize;
pub mod linearize;
pub mod structural;
pub mod genesis;
pub mod verify;
pub mod battery;

pub use error::{Error, Result};
