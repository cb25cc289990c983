//! Laguerre and Meixner–Pollaczek (α = 1/2, φ = π/2) polynomial sequences.
//!
//! The Meixner–Pollaczek family used here satisfies
//!
//! ```text
//! (n+1) P_{n+1}(y) = 2y P_n(y) - n P_{n-1}(y),   P_0 = 1,  P_1(y) = 2y,
//! ```
//!
//! and is orthonormal for the weight `w(y) = |Γ(1/2 + iy)|² / π = sech(πy)`.
//!
//! At the imaginary abscissae `y = -i(k + 1/2)` the recurrence is rotated
//! onto the real line: `q_n = i^{-n} P_n(-i(k+1/2))` obeys
//! `(n+1) q_{n+1} = -(2k+1) q_n + n q_{n-1}` with `q_0 = 1`, `q_1 = -(2k+1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ext_real::{ExtReal, Precision};
use super::gamma::ln_gamma_complex;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PolyFamily {
    Laguerre,
    /// Pollaczek parameter fixed at α = 1/2.
    MeixnerPollaczek,
}

impl PolyFamily {
    pub fn alpha(self) -> f64 {
        match self {
            PolyFamily::Laguerre => 0.0,
            PolyFamily::MeixnerPollaczek => 0.5,
        }
    }

    /// Values of the first `n_max + 1` members at `x`.
    pub fn sequence(self, n_max: usize, x: f64) -> Vec<f64> {
        match self {
            PolyFamily::Laguerre => laguerre_seq(n_max, x),
            PolyFamily::MeixnerPollaczek => mp_real_seq(n_max, x),
        }
    }
}

/// `L_0(x) ..= L_{n_max}(x)` by the three-term recurrence.
pub fn laguerre_seq(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(1.0 - x);
    for n in 1..n_max {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - x) * out[n] - nf * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// `P_0(ν) ..= P_{n_max}(ν)` at real argument, double precision.
pub fn mp_real_seq(n_max: usize, nu: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(2.0 * nu);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 * nu * out[n] - nf * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// Rotated values `q_n = i^{-n} P_n(-i(k + 1/2))` for `n = 0 ..= n_max`.
///
/// All `q_n` are real; `P_n` is recovered as `i^n q_n`.
pub fn mp_rotated_seq(n_max: usize, k: u64, precision: Precision) -> Result<Vec<ExtReal>> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(ExtReal::one(precision));
    if n_max == 0 {
        return Ok(out);
    }
    let slope = -(2 * k as i64 + 1);
    out.push(ExtReal::from_i64(slope, precision));
    for n in 1..n_max {
        let next = out[n].mul_i64(slope) + out[n - 1].mul_i64(n as i64);
        out.push(next.div_u64(n as u64 + 1)?);
    }
    Ok(out)
}

/// Orthogonality weight `(1/π) |Γ(1/2 + iν)|²`, which equals `sech(πν)`.
pub fn mp_weight(nu: f64) -> f64 {
    match ln_gamma_complex(Complex64::new(0.5, nu)) {
        Ok(lg) => (2.0 * lg.re).exp() / PI,
        // Re = 1/2 never hits a pole; only a non-finite ν lands here.
        Err(_) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    /// L_n(x) = Σ_j C(n, j) (-x)^j / j!, with the sum of term magnitudes
    /// as the cancellation scale.
    fn laguerre_explicit(n: usize, x: f64) -> (f64, f64) {
        let mut factorial = 1.0;
        let mut sum = 0.0;
        let mut mag = 0.0;
        for j in 0..=n {
            if j > 0 {
                factorial *= j as f64;
            }
            let term = binomial(n as u64, j as u64) * (-x).powi(j as i32) / factorial;
            sum += term;
            mag += term.abs();
        }
        (sum, mag)
    }

    #[test]
    fn laguerre_small_cases() {
        assert_eq!(laguerre_seq(1, 0.0), vec![1.0, 1.0]);
        assert_eq!(laguerre_seq(1, 2.0), vec![1.0, -1.0]);
        assert_eq!(laguerre_seq(0, 5.0), vec![1.0]);
    }

    #[test]
    fn laguerre_matches_explicit_coefficients() {
        let seq = laguerre_seq(5, 0.7);
        for (n, &value) in seq.iter().enumerate() {
            assert!((value - laguerre_explicit(n, 0.7).0).abs() < 1e-14);
        }
        for n in 0..=20 {
            for i in -20..=20 {
                let x = i as f64 * 0.5;
                let rec = laguerre_seq(n, x)[n];
                let (exp, scale) = laguerre_explicit(n, x);
                assert!(
                    (rec - exp).abs() / scale < 1e-12,
                    "n={n} x={x}: {rec} vs {exp}"
                );
            }
        }
    }

    #[test]
    fn mp_parity_at_zero() {
        let seq = mp_real_seq(11, 0.0);
        assert_eq!(seq[0], 1.0);
        for n in (1..=11).step_by(2) {
            assert_eq!(seq[n], 0.0);
        }
        // P_2(0) = -1/2 from the recurrence
        assert_eq!(seq[2], -0.5);
    }

    #[test]
    fn rotated_sequence_first_terms() {
        let p = Precision::new(128).unwrap();
        for k in 0..5u64 {
            let q = mp_rotated_seq(3, k, p).unwrap();
            assert_eq!(q[0].to_f64(), 1.0);
            assert_eq!(q[1].to_f64(), -(2.0 * k as f64 + 1.0));
        }
        assert_eq!(mp_rotated_seq(1, 0, p).unwrap()[1].to_f64(), -1.0);
    }

    #[test]
    fn weight_values() {
        assert!((mp_weight(0.0) - 1.0).abs() < 1e-15);
        let expected = 1.0 / (3.0 * PI).cosh();
        assert!((mp_weight(3.0) - expected).abs() / expected < 1e-13);
        for i in 0..50 {
            let nu = 0.37 * i as f64;
            assert_eq!(mp_weight(nu), mp_weight(-nu));
            assert!(mp_weight(nu) > 0.0);
        }
    }

    #[test]
    fn family_dispatch() {
        assert_eq!(PolyFamily::MeixnerPollaczek.alpha(), 0.5);
        assert_eq!(PolyFamily::Laguerre.sequence(3, 0.4), laguerre_seq(3, 0.4));
    }
}
