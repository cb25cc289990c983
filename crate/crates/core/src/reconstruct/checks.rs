use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::corpus::{CoefficientSet, JumpGroundTruth};
use crate::error::{Error, Result};
use crate::moments::least_squares_slope;
use crate::specfun::{integrate_with, QuadratureOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub l2_abs: f64,
    /// `None` when the truth has zero norm on the domain.
    pub l2_rel: Option<f64>,
    pub domain: (f64, f64),
}

fn metrics(err_sq: f64, norm_sq: f64, domain: (f64, f64)) -> ErrorMetrics {
    ErrorMetrics {
        l2_abs: err_sq.max(0.0).sqrt(),
        l2_rel: (norm_sq > 0.0).then(|| (err_sq / norm_sq).max(0.0).sqrt()),
        domain,
    }
}

/// L² error of sampled values against the truth, by the composite
/// trapezoid rule over the samples whose abscissae lie in `domain`.
pub fn l2_error(
    samples: &[(f64, f64)],
    truth: &JumpGroundTruth,
    domain: (f64, f64),
) -> Result<ErrorMetrics> {
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(x, _)| *x >= domain.0 && *x <= domain.1)
        .collect();
    if inside.len() < 2 {
        return Err(Error::Input(format!(
            "need at least two samples in [{}, {}]",
            domain.0, domain.1
        )));
    }
    if inside.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Input(
            "sample abscissae must be strictly increasing".into(),
        ));
    }
    let trapezoid = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        inside
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (f(w[0].0, w[0].1) + f(w[1].0, w[1].1)))
            .sum()
    };
    let err_sq = trapezoid(&|x, v| (v - truth.eval(x)).powi(2));
    let norm_sq = trapezoid(&|x, _| truth.eval(x).powi(2));
    Ok(metrics(err_sq, norm_sq, domain))
}

/// L² error of a function against the truth by adaptive quadrature.
pub fn l2_error_quadrature(
    f: &(dyn Fn(f64) -> f64 + Sync),
    truth: &JumpGroundTruth,
    domain: (f64, f64),
    options: &QuadratureOptions,
) -> Result<ErrorMetrics> {
    let err_sq = integrate_with(
        |x| (f(x) - truth.eval(x)).powi(2),
        domain.0,
        domain.1,
        options,
    )?;
    let norm_sq = integrate_with(|x| truth.eval(x).powi(2), domain.0, domain.1, options)?;
    Ok(metrics(err_sq.value, norm_sq.value, domain))
}

/// `∫_1^∞ f(x) x^{-λ-1} dx`; at `λ = k` this should return `g_k`.
pub fn mellin_of_reconstruction(
    f: &(dyn Fn(f64) -> f64 + Sync),
    lambda: f64,
    options: &QuadratureOptions,
) -> Result<f64> {
    if !(lambda > -0.5) {
        return Err(Error::domain(
            "mellin_of_reconstruction",
            format!("λ must exceed -1/2, got {lambda}"),
        ));
    }
    Ok(integrate_with(
        |x| f(x) * x.powf(-lambda - 1.0),
        1.0,
        f64::INFINITY,
        options,
    )?
    .value)
}

/// `G(z) = ∫_1^∞ f(x) / (x - z) dx` for `|z| < 1`.
pub fn cauchy_check(
    f: &(dyn Fn(f64) -> f64 + Sync),
    z: Complex64,
    options: &QuadratureOptions,
) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::domain(
            "cauchy_check",
            format!("|z| must be < 1, got z = {z}"),
        ));
    }
    // 1/(x - z) = (x - z̄) / |x - z|²
    let re = integrate_with(
        |x| {
            let d = (x - z.re).powi(2) + z.im * z.im;
            f(x) * (x - z.re) / d
        },
        1.0,
        f64::INFINITY,
        options,
    )?;
    let im = if z.im == 0.0 {
        0.0
    } else {
        integrate_with(
            |x| {
                let d = (x - z.re).powi(2) + z.im * z.im;
                f(x) * z.im / d
            },
            1.0,
            f64::INFINITY,
            options,
        )?
        .value
    };
    Ok(Complex64::new(re.value, im))
}

/// Truncated series `Σ_k g_k z^k` over the stored coefficients.
pub fn series_sum(g: &CoefficientSet, z: Complex64) -> Complex64 {
    g.indexed()
        .map(|(k, v)| v * z.powu(k as u32))
        .fold(Complex64::new(0.0, 0.0), |acc, t| acc + t)
}

/// Both sides of the Mellin–Plancherel identity on the line `Re λ = ℓ`:
/// `∫_ℝ |g̃(ℓ+iν)|² dν` and `2π ∫_1^∞ |J(x)|² x^{-2ℓ-1} dx`.
pub fn plancherel_sides(
    gtilde: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
    jump: &(dyn Fn(f64) -> f64 + Sync),
    ell: f64,
    options: &QuadratureOptions,
) -> Result<(f64, f64)> {
    if !(ell >= -0.5) {
        return Err(Error::domain(
            "plancherel_sides",
            format!("ℓ must be >= -1/2, got {ell}"),
        ));
    }
    // |g̃(ℓ+iν)| is even in ν for real data
    let line = |nu: f64| gtilde(Complex64::new(ell, nu)).map(|v| v.norm_sqr());
    line(0.0)?;
    let lhs = 2.0
        * integrate_with(
            |nu| line(nu).unwrap_or(f64::NAN),
            0.0,
            f64::INFINITY,
            options,
        )?
        .value;
    let rhs = 2.0
        * std::f64::consts::PI
        * integrate_with(
            |x| jump(x).powi(2) * x.powf(-2.0 * ell - 1.0),
            1.0,
            f64::INFINITY,
            options,
        )?
        .value;
    Ok((lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    /// `∫_1^∞ f(x)/x dx`.
    pub integral: f64,
    /// Minimum of `f` over a geometric grid on `[1, 10³]`.
    pub min_value: f64,
}

pub fn density_check(
    f: &(dyn Fn(f64) -> f64 + Sync),
    options: &QuadratureOptions,
) -> Result<DensityCheck> {
    let integral = integrate_with(|x| f(x) / x, 1.0, f64::INFINITY, options)?.value;
    let count = 4000;
    let min_value = (0..count)
        .map(|i| f(10f64.powf(3.0 * i as f64 / (count - 1) as f64)))
        .fold(f64::INFINITY, f64::min);
    Ok(DensityCheck {
        integral,
        min_value,
    })
}

/// Least-squares slope of `ln M_m` against `ln m` over `m ∈ [start, 10 start]`.
///
/// Past the plateau the energies blow up like `m^{2N}`.
pub fn energy_growth_slope(m: &[f64], start: usize) -> Option<f64> {
    let start = start.max(1);
    let end = (10 * start).min(m.len().checked_sub(1)?);
    let points: Vec<(f64, f64)> = (start..=end)
        .filter(|&i| m[i] > 0.0)
        .map(|i| ((i as f64).ln(), m[i].ln()))
        .collect();
    (points.len() >= 3).then(|| least_squares_slope(&points))
}
