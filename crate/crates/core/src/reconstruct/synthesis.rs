use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CoefficientSet;
use crate::error::{Error, Result};
use crate::specfun::{mp_rotated_seq, ExtReal, Precision};

/// Relative agreement required between successive precisions.
pub const STABILITY_TOL: f64 = 1e-12;
/// Coefficients at or below this magnitude are not compared.
pub const STABILITY_FLOOR: f64 = 1e-300;
pub const DEFAULT_DOUBLINGS: u32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Synthesis {
    pub c: Vec<f64>,
    pub precision_used: u32,
    pub stabilized: bool,
}

/// Expansion coefficients
/// `c_n = √2 Σ_{k=0}^{N} (-1)^k g_k i^n P_n(-i(k+1/2)) / k!`.
///
/// The factor `i^n P_n(-i(k+1/2)) = (-1)^n q_n(k)` is real, and the same
/// `i^n` is dropped from the basis functions, so the stored `c_n` are real
/// and pair with the real basis `φ_n` of [`basis_phi`](super::basis_phi).
///
/// The sum is carried out at `precision0`, then repeatedly at doubled
/// precision until two successive results agree to [`STABILITY_TOL`] in
/// every coefficient above [`STABILITY_FLOOR`]. When `max_doublings` runs out
/// the last result is returned with `stabilized = false`.
pub fn synthesize_coefficients(
    g: &CoefficientSet,
    n_max: usize,
    precision0: Precision,
    max_doublings: u32,
) -> Result<Synthesis> {
    if g.is_empty() {
        return Err(Error::Input("empty coefficient set".into()));
    }
    let mut precision = precision0;
    let mut previous = synthesize_at(&g.values, n_max, precision)?;
    for _ in 0..max_doublings {
        let next_precision = precision.doubled();
        let next = synthesize_at(&g.values, n_max, next_precision)?;
        let agree = previous
            .iter()
            .zip(&next)
            .all(|(a, b)| b.abs() <= STABILITY_FLOOR || (a - b).abs() <= STABILITY_TOL * b.abs());
        precision = next_precision;
        previous = next;
        if agree {
            return Ok(Synthesis {
                c: previous,
                precision_used: precision.bits(),
                stabilized: true,
            });
        }
    }
    Ok(Synthesis {
        c: previous,
        precision_used: precision.bits(),
        stabilized: false,
    })
}

/// One pass of the synthesis sum at a fixed precision.
pub fn synthesize_at(values: &[f64], n_max: usize, precision: Precision) -> Result<Vec<f64>> {
    Ok(rotated_sums(values, n_max, precision)?
        .into_iter()
        .enumerate()
        .map(|(n, s)| {
            let s = if n % 2 == 1 { -s } else { s };
            std::f64::consts::SQRT_2 * s
        })
        .collect())
}

/// `Q_n = Σ_k (-1)^k values[k] q_n(k) / k!` with `q_n(k) = i^{-n} P_n(-i(k+1/2))`,
/// rounded to double at the end.
///
/// Terms are produced in parallel per `k` and reduced in ascending `k`, so
/// the result does not depend on the thread count.
pub fn rotated_sums(values: &[f64], n_max: usize, precision: Precision) -> Result<Vec<f64>> {
    let factorials: Vec<BigUint> = std::iter::once(BigUint::one())
        .chain((1..values.len() as u64).scan(BigUint::one(), |acc, k| {
            *acc *= k;
            Some(acc.clone())
        }))
        .collect();
    let columns: Vec<Vec<ExtReal>> = values
        .par_iter()
        .enumerate()
        .map(|(k, &gk)| -> Result<Vec<ExtReal>> {
            let mut weight = ExtReal::from_f64(gk, precision)?.div_biguint(&factorials[k])?;
            if k % 2 == 1 {
                weight = -weight;
            }
            let q = mp_rotated_seq(n_max, k as u64, precision)?;
            Ok(q.iter().map(|qn| weight.mul_ref(qn)).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..=n_max)
        .into_par_iter()
        .map(|n| {
            columns
                .iter()
                .fold(ExtReal::zero(precision), |acc, col| acc.add_ref(&col[n]))
                .to_f64()
        })
        .collect())
}

/// Cumulative energies `M_m = Σ_{n ≤ m} c_n²`.
pub fn partial_energies(c: &[f64]) -> Vec<f64> {
    c.iter()
        .scan(0.0, |acc, x| {
            *acc += x * x;
            Some(*acc)
        })
        .collect()
}
