//! Reconstruction of the jump function across the cut `[1, ∞)` of a power
//! series from finitely many noisy coefficients.
//!
//! The jump is expanded in the Laguerre-type basis
//! `Φ_n(x) = √2 L_n(2/x) e^{-1/x} / x`, orthonormal on `(0, ∞)`. Expansion
//! coefficients are synthesised from the series coefficients through
//! Meixner–Pollaczek polynomials evaluated in extended precision, and the
//! expansion is truncated where the cumulative energy `M_m = Σ_{n≤m} c_n²`
//! stops growing (the plateau) before noise drives it to diverge.
//!
//! Modules:
//!
//! * [`specfun`]: extended-precision scalar, complex log-gamma, polynomial
//!   sequences and adaptive quadrature.
//! * [`moments`]: finite-difference tables, Bernstein weights and Hausdorff
//!   diagnostics for moment sequences.
//! * [`corpus`]: built-in test problems with closed-form ground truth, noise
//!   injection and coefficient CSV files.
//! * [`reconstruct`]: coefficient synthesis, plateau detection, the truncated
//!   expansion and its error metrics and round-trip checks.
//! * [`thermal`]: the imaginary-time to real-time variant for bosonic thermal
//!   Green functions.
//! * [`cli`]: configuration, the four pipelines and report emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod corpus;
mod error;
pub mod moments;
pub mod reconstruct;
pub mod specfun;
pub mod thermal;

pub use error::{Error, Result};
