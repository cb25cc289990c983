//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Infinite ranges are mapped onto `(0, 1]` before integration:
//!
//! * `[a, ∞)` with `a > 0`: `x = a / t` ([`TailMap::Reciprocal`]), suited to
//!   algebraically decaying integrands;
//! * `[a, ∞)` via `x = a - ln t` ([`TailMap::Logarithmic`]) for exponential decay;
//! * `[a, ∞)` with `a <= 0` is split at 1 and the tail mapped reciprocally;
//! * `(-∞, b]` is reflected onto `[-b, ∞)`.
//!
//! Kronrod nodes are interior, so mapped endpoints are never evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    fn combine(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailMap {
    Reciprocal,
    Logarithmic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

type Integrand<'a> = &'a dyn Fn(f64) -> f64;

fn kronrod15(f: Integrand<'_>, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let error = rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale);
    Segment {
        a,
        b,
        value: res_k * half,
        error,
    }
}

fn integrate_finite(
    f: Integrand<'_>,
    a: f64,
    b: f64,
    options: &QuadratureOptions,
) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod15(f, a, b);
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 0;
    let tolerance = |v: f64| options.abs_tol.max(options.rel_tol * v.abs());
    while error > tolerance(value) {
        if subdivisions >= options.max_subdivisions {
            return Err(Error::Convergence {
                value,
                error_estimate: error,
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval exhausted at double resolution; nothing more to gain
            return Err(Error::Convergence {
                value,
                error_estimate: error,
                subdivisions,
            });
        }
        let left = kronrod15(f, worst.a, mid);
        let right = kronrod15(f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // resynchronise the running sums so cancellation cannot drift them
        if subdivisions % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error_estimate: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
    })
}

/// Integral of `f` over `[a, ∞)` through the given variable change.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    map: TailMap,
    options: &QuadratureOptions,
) -> Result<QuadratureResult> {
    semi_infinite(&f, a, map, options)
}

fn semi_infinite(
    f: Integrand<'_>,
    a: f64,
    map: TailMap,
    options: &QuadratureOptions,
) -> Result<QuadratureResult> {
    match map {
        TailMap::Reciprocal => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::domain(
                    "integrate_semi_infinite",
                    format!("reciprocal map needs a finite positive start, got {a}"),
                ));
            }
            let g = |t: f64| {
                let fx = f(a / t);
                if fx == 0.0 {
                    0.0
                } else {
                    fx * a / (t * t)
                }
            };
            integrate_finite(&g, 0.0, 1.0, options)
        }
        TailMap::Logarithmic => {
            if !a.is_finite() {
                return Err(Error::domain(
                    "integrate_semi_infinite",
                    format!("logarithmic map needs a finite start, got {a}"),
                ));
            }
            let g = |t: f64| {
                let fx = f(a - t.ln());
                if fx == 0.0 {
                    0.0
                } else {
                    fx / t
                }
            };
            integrate_finite(&g, 0.0, 1.0, options)
        }
    }
}

/// Adaptive integral of `f` over `[a, b]`; either bound may be infinite.
///
/// Converges when the summed error estimate is at most
/// `max(abs_tol, rel_tol * |value|)`; split ranges apply that rule per piece.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_with(f, a, b, &QuadratureOptions::new(abs_tol, rel_tol))
}

pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    options: &QuadratureOptions,
) -> Result<QuadratureResult> {
    integrate_dyn(&f, a, b, options)
}

fn integrate_dyn(
    f: Integrand<'_>,
    a: f64,
    b: f64,
    options: &QuadratureOptions,
) -> Result<QuadratureResult> {
    if !(options.abs_tol > 0.0 && options.rel_tol > 0.0) {
        return Err(Error::config(
            "tolerance",
            format!(
                "tolerances must be positive (abs {}, rel {})",
                options.abs_tol, options.rel_tol
            ),
        ));
    }
    if a.is_nan() || b.is_nan() {
        return Err(Error::domain("integrate_adaptive", "NaN integration bound"));
    }
    if a > b {
        let flipped = integrate_dyn(f, b, a, options)?;
        return Ok(QuadratureResult {
            value: -flipped.value,
            ..flipped
        });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(f, a, b, options),
        (true, false) => {
            if a > 0.0 {
                semi_infinite(f, a, TailMap::Reciprocal, options)
            } else {
                let head = integrate_finite(f, a, 1.0, options)?;
                let tail = semi_infinite(f, 1.0, TailMap::Reciprocal, options)?;
                Ok(head.combine(tail))
            }
        }
        (false, true) => integrate_dyn(&|y: f64| f(-y), -b, f64::INFINITY, options),
        (false, false) => {
            let left = integrate_dyn(f, f64::NEG_INFINITY, 0.0, options)?;
            let right = integrate_dyn(f, 0.0, f64::INFINITY, options)?;
            Ok(left.combine(right))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_integrand() {
        let r = integrate_adaptive(|_| 1.0, 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!(r.error_estimate >= 0.0);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn algebraic_tail_on_reciprocal_map() {
        let r = integrate_adaptive(
            |x| 6.0 * (x.powi(-2) - x.powi(-3)),
            1.0,
            f64::INFINITY,
            1e-12,
            1e-12,
        )
        .unwrap();
        assert!((r.value - 3.0).abs() < 1e-12, "{r:?}");
        for k in 0..=5 {
            let r = integrate_adaptive(
                |x| 6.0 * (x.powi(-2) - x.powi(-3)) * x.powi(-(k + 1)),
                1.0,
                f64::INFINITY,
                1e-13,
                1e-13,
            )
            .unwrap();
            let expected = 6.0 / (((k + 2) * (k + 3)) as f64);
            assert!((r.value - expected).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn exponential_tail_both_maps() {
        let log = integrate_semi_infinite(
            |v: f64| (-2.0 * v).exp(),
            0.0,
            TailMap::Logarithmic,
            &QuadratureOptions::new(1e-13, 1e-13),
        )
        .unwrap();
        assert!((log.value - 0.5).abs() < 1e-12);
        let split = integrate_adaptive(|v: f64| (-2.0 * v).exp(), 0.0, f64::INFINITY, 1e-13, 1e-13)
            .unwrap();
        assert!((split.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn whole_line_and_reversed_bounds() {
        let r = integrate_adaptive(
            |x: f64| (-x * x).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            1e-13,
            1e-13,
        )
        .unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let r = integrate_adaptive(|x: f64| x, 1.0, 0.0, 1e-12, 1e-12).unwrap();
        assert!((r.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let options = QuadratureOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_subdivisions: 3,
        };
        let err = integrate_with(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &options).unwrap_err();
        match err {
            Error::Convergence {
                value,
                error_estimate,
                subdivisions,
            } => {
                assert_eq!(subdivisions, 3);
                assert!(value.is_finite() && error_estimate > 0.0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn non_positive_tolerance_is_rejected() {
        assert!(integrate_adaptive(|x| x, 0.0, 1.0, 0.0, 1e-8).is_err());
    }
}
