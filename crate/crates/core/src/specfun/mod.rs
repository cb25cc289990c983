//! Numerical primitives: extended-precision reals, complex log-gamma,
//! Laguerre and Meixner–Pollaczek sequences, adaptive quadrature.

mod ext_real;
mod gamma;
mod polynomials;
mod quadrature;

pub use ext_real::{ExtComplex, ExtReal, Precision, MIN_PRECISION_BITS};
pub use gamma::{gamma_complex, ln_gamma_complex};
pub use polynomials::{laguerre_seq, mp_real_seq, mp_rotated_seq, mp_weight, PolyFamily};
pub use quadrature::{
    integrate_adaptive, integrate_semi_infinite, integrate_with, QuadratureOptions,
    QuadratureResult, TailMap,
};
