use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::laguerre_seq;

/// Real basis function `φ_n(x) = √2 L_n(2/x) e^{-1/x} / x`.
///
/// This is `Φ_n` with its `i^n` removed; the phase is absorbed by the
/// coefficients of [`synthesize_coefficients`](super::synthesize_coefficients).
pub fn basis_phi(n: usize, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "basis_phi",
            format!("x must be > 0, got {x}"),
        ));
    }
    let envelope = (-1.0 / x).exp() / x;
    if envelope == 0.0 {
        return Ok(0.0);
    }
    Ok(SQRT_2 * laguerre_seq(n, 2.0 / x)[n] * envelope)
}

/// Truncated expansion `Σ_{n ≤ m_t} c_n φ_n(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpExpansion {
    pub coefficients: Vec<f64>,
}

impl JumpExpansion {
    /// Keep `c_0 ..= c_{m_t}`.
    pub fn truncated(c: &[f64], m_t: usize) -> Result<Self> {
        if m_t >= c.len() {
            return Err(Error::Input(format!(
                "truncation index {m_t} beyond {} coefficients",
                c.len()
            )));
        }
        Ok(JumpExpansion {
            coefficients: c[..=m_t].to_vec(),
        })
    }

    pub fn m_t(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Value at `x`; the expansion lives on `(0, ∞)` and is zero elsewhere.
    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) || self.coefficients.is_empty() {
            return 0.0;
        }
        let envelope = (-1.0 / x).exp() / x;
        if envelope == 0.0 || !envelope.is_finite() {
            return 0.0;
        }
        let lag = laguerre_seq(self.m_t(), 2.0 / x);
        let sum: f64 = self.coefficients.iter().zip(&lag).map(|(c, l)| c * l).sum();
        SQRT_2 * sum * envelope
    }
}

/// Sample the expansion on a grid.
pub fn reconstruct_jump(c: &[f64], m_t: usize, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(x) = xs.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::domain(
            "reconstruct_jump",
            format!("grid point {x} is not positive"),
        ));
    }
    let expansion = JumpExpansion::truncated(c, m_t)?;
    Ok(xs.par_iter().map(|&x| (x, expansion.eval(x))).collect())
}

/// Geometric grid with linear refinement, merged and sorted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub geometric: (f64, f64, usize),
    pub linear: (f64, f64, usize),
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            geometric: (1e-2, 50.0, 1500),
            linear: (0.5, 3.0, 500),
        }
    }
}

impl SampleGrid {
    pub fn points(&self) -> Vec<f64> {
        let (g_lo, g_hi, g_n) = self.geometric;
        let (l_lo, l_hi, l_n) = self.linear;
        let mut pts = Vec::with_capacity(g_n + l_n);
        let ratio = (g_hi / g_lo).ln();
        for i in 0..g_n {
            let t = if g_n > 1 {
                i as f64 / (g_n - 1) as f64
            } else {
                0.0
            };
            pts.push(g_lo * (ratio * t).exp());
        }
        if g_n > 1 {
            // pin the end point exactly
            pts[g_n - 1] = g_hi;
        }
        for i in 0..l_n {
            let t = if l_n > 1 {
                i as f64 / (l_n - 1) as f64
            } else {
                0.0
            };
            pts.push(l_lo + (l_hi - l_lo) * t);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}
