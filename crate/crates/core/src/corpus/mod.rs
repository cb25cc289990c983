//! Built-in problems with closed-form coefficients, their Carlsonian
//! interpolants and jump functions, plus noise injection and coefficient files.

mod io;
mod noise;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{integrate_with, QuadratureOptions};

pub use io::{
    format_coefficients, load_coefficients, load_coefficients_from, parse_coefficients,
    write_coefficients,
};
pub use noise::add_noise;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemId {
    NormalizedRational,
    Harmonic,
    RationalUnnormalized,
    ThermalBosonDemo,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [
        ProblemId::NormalizedRational,
        ProblemId::Harmonic,
        ProblemId::RationalUnnormalized,
        ProblemId::ThermalBosonDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::NormalizedRational => "normalized_rational",
            ProblemId::Harmonic => "harmonic",
            ProblemId::RationalUnnormalized => "rational_unnormalized",
            ProblemId::ThermalBosonDemo => "thermal_boson_demo",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// Independent variable of a jump function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// `x` on the cut `[1, ∞)`.
    X,
    /// `v = ln x` on `[0, ∞)`.
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.lower && t <= self.upper
    }
}

/// Closed-form jump function, zero outside its support.
#[derive(Clone, Copy, Debug)]
pub struct JumpGroundTruth {
    formula: fn(f64) -> f64,
    pub support: Support,
    pub variable: Variable,
    /// Value at the left end of the support; zero for continuous specimens.
    pub boundary_value: f64,
    /// `∫ |J|²` over the support, in the stated variable.
    pub energy: f64,
}

impl JumpGroundTruth {
    pub fn eval(&self, t: f64) -> f64 {
        if self.support.contains(t) {
            (self.formula)(t)
        } else {
            0.0
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.boundary_value == 0.0
    }
}

#[derive(Clone, Copy, Debug)]
pub enum JumpKind {
    Continuous(JumpGroundTruth),
    Discontinuous(JumpGroundTruth),
    Unknown,
}

impl JumpKind {
    pub fn truth(&self) -> Option<&JumpGroundTruth> {
        match self {
            JumpKind::Continuous(t) | JumpKind::Discontinuous(t) => Some(t),
            JumpKind::Unknown => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub id: ProblemId,
    coefficient_rule: fn(u64) -> BigRational,
    gtilde: fn(Complex64) -> Complex64,
    /// `g̃` is holomorphic for `Re λ` strictly above this bound.
    pub half_plane: f64,
    pub jump: JumpKind,
    /// `g̃(0)` when finite.
    pub normalization: Option<f64>,
    /// Smallest coefficient index carried by the data (1 for thermal series).
    pub first_index: u64,
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn k_i64(k: u64) -> i64 {
    i64::try_from(k).expect("coefficient index fits in i64")
}

fn rule_normalized(k: u64) -> BigRational {
    let k = k_i64(k);
    ratio(6, (k + 2) * (k + 3))
}

fn rule_harmonic(k: u64) -> BigRational {
    ratio(1, k_i64(k) + 1)
}

fn rule_unnormalized(k: u64) -> BigRational {
    let k = k_i64(k);
    ratio(1, (k + 2) * (k + 3))
}

fn gtilde_normalized(l: Complex64) -> Complex64 {
    6.0 / ((l + 2.0) * (l + 3.0))
}

fn gtilde_harmonic(l: Complex64) -> Complex64 {
    1.0 / (l + 1.0)
}

fn gtilde_unnormalized(l: Complex64) -> Complex64 {
    1.0 / ((l + 2.0) * (l + 3.0))
}

fn jump_normalized(x: f64) -> f64 {
    6.0 * (x.powi(-2) - x.powi(-3))
}

fn jump_harmonic(x: f64) -> f64 {
    1.0 / x
}

fn jump_unnormalized(x: f64) -> f64 {
    x.powi(-2) - x.powi(-3)
}

fn jump_thermal(v: f64) -> f64 {
    6.0 * ((-2.0 * v).exp() - (-3.0 * v).exp())
}

const CUT: Support = Support {
    lower: 1.0,
    upper: f64::INFINITY,
};

/// Look up a built-in problem by name.
pub fn builtin(id: &str) -> Result<ProblemSpec> {
    Ok(builtin_spec(id.parse()?))
}

pub fn builtin_spec(id: ProblemId) -> ProblemSpec {
    match id {
        ProblemId::NormalizedRational => ProblemSpec {
            id,
            coefficient_rule: rule_normalized,
            gtilde: gtilde_normalized,
            half_plane: -2.0,
            jump: JumpKind::Continuous(JumpGroundTruth {
                formula: jump_normalized,
                support: CUT,
                variable: Variable::X,
                boundary_value: 0.0,
                // 36 (1/3 - 1/2 + 1/5)
                energy: 1.2,
            }),
            normalization: Some(1.0),
            first_index: 0,
        },
        ProblemId::Harmonic => ProblemSpec {
            id,
            coefficient_rule: rule_harmonic,
            gtilde: gtilde_harmonic,
            half_plane: -1.0,
            jump: JumpKind::Discontinuous(JumpGroundTruth {
                formula: jump_harmonic,
                support: CUT,
                variable: Variable::X,
                boundary_value: 1.0,
                energy: 1.0,
            }),
            normalization: Some(1.0),
            first_index: 0,
        },
        ProblemId::RationalUnnormalized => ProblemSpec {
            id,
            coefficient_rule: rule_unnormalized,
            gtilde: gtilde_unnormalized,
            half_plane: -2.0,
            jump: JumpKind::Continuous(JumpGroundTruth {
                formula: jump_unnormalized,
                support: CUT,
                variable: Variable::X,
                boundary_value: 0.0,
                energy: 1.2 / 36.0,
            }),
            normalization: Some(1.0 / 6.0),
            first_index: 0,
        },
        ProblemId::ThermalBosonDemo => ProblemSpec {
            id,
            coefficient_rule: rule_normalized,
            gtilde: gtilde_normalized,
            half_plane: -2.0,
            jump: JumpKind::Continuous(JumpGroundTruth {
                formula: jump_thermal,
                support: Support {
                    lower: 0.0,
                    upper: f64::INFINITY,
                },
                variable: Variable::V,
                boundary_value: 0.0,
                // 36 (1/4 - 2/5 + 1/6)
                energy: 0.6,
            }),
            normalization: Some(1.0),
            first_index: 1,
        },
    }
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    pub fn truth(&self) -> Option<&JumpGroundTruth> {
        self.jump.truth()
    }

    pub fn coefficient_exact(&self, k: u64) -> BigRational {
        (self.coefficient_rule)(k)
    }

    pub fn coefficient(&self, k: u64) -> f64 {
        self.coefficient_exact(k).to_f64().unwrap_or(f64::NAN)
    }

    /// Clean coefficients with indices `first_index ..= n`.
    pub fn coefficients(&self, n: u64) -> CoefficientSet {
        let exact: Vec<BigRational> = (self.first_index..=n)
            .map(|k| self.coefficient_exact(k))
            .collect();
        CoefficientSet {
            values: exact
                .iter()
                .map(|q| q.to_f64().unwrap_or(f64::NAN))
                .collect(),
            first_index: self.first_index,
            epsilon: 0.0,
            seed: None,
            source: self.name().to_string(),
            exact: Some(exact),
        }
    }
}

/// Carlsonian interpolant `g̃(λ)` from its closed form.
pub fn gtilde_eval(spec: &ProblemSpec, lambda: Complex64) -> Result<Complex64> {
    if !(lambda.re > spec.half_plane) || !lambda.im.is_finite() {
        return Err(Error::domain(
            "gtilde_eval",
            format!(
                "λ = {lambda} lies outside Re λ > {} for {}",
                spec.half_plane,
                spec.name()
            ),
        ));
    }
    Ok((spec.gtilde)(lambda))
}

/// `g̃(λ)` from quadrature of the defining transform of the ground truth:
/// `∫_1^∞ J(x) x^{-λ-1} dx` in `x`, or `∫_0^∞ J(v) e^{-λv} dv` in `v`.
pub fn gtilde_quadrature(
    spec: &ProblemSpec,
    lambda: Complex64,
    options: &QuadratureOptions,
) -> Result<Complex64> {
    if !(lambda.re > spec.half_plane) {
        return Err(Error::domain(
            "gtilde_quadrature",
            format!("λ = {lambda} lies outside Re λ > {}", spec.half_plane),
        ));
    }
    let truth = *spec
        .truth()
        .ok_or_else(|| Error::Input(format!("{} has no ground truth", spec.name())))?;
    let kernel = move |t: f64| -> Complex64 {
        let j = truth.eval(t);
        if j == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match truth.variable {
            Variable::X => j * (-(lambda + 1.0) * t.ln()).exp(),
            Variable::V => j * (-lambda * t).exp(),
        }
    };
    let (a, b) = (truth.support.lower, truth.support.upper);
    let re = integrate_with(|t| kernel(t).re, a, b, options)?;
    let im = if lambda.im == 0.0 {
        0.0
    } else {
        integrate_with(|t| kernel(t).im, a, b, options)?.value
    };
    Ok(Complex64::new(re.value, im))
}

/// Finite prefix of series coefficients with its noise metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    /// `g_{first_index} ..= g_N`.
    pub values: Vec<f64>,
    pub first_index: u64,
    pub epsilon: f64,
    pub seed: Option<u64>,
    pub source: String,
    /// Exact rational values when the set is a clean closed-form prefix.
    #[serde(skip)]
    pub exact: Option<Vec<BigRational>>,
}

impl CoefficientSet {
    pub fn from_values(
        values: Vec<f64>,
        first_index: u64,
        source: impl Into<String>,
    ) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "coefficient g_{} is not finite",
                first_index + pos as u64
            )));
        }
        Ok(CoefficientSet {
            values,
            first_index,
            epsilon: 0.0,
            seed: None,
            source: source.into(),
            exact: None,
        })
    }

    /// Highest index `N`; `None` for an empty set.
    pub fn n(&self) -> Option<u64> {
        (self.values.len() as u64)
            .checked_sub(1)
            .map(|n| n + self.first_index)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `g_k`, or `None` outside the stored range.
    pub fn get(&self, k: u64) -> Option<f64> {
        let offset = usize::try_from(k.checked_sub(self.first_index)?).ok()?;
        self.values.get(offset).copied()
    }

    pub fn indexed(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.first_index + i as u64, v))
    }

    /// The same values re-indexed from zero, as consumed by the thermal
    /// synthesis (`h_k = g_{k+1}`).
    pub fn shifted_to_zero(&self) -> CoefficientSet {
        CoefficientSet {
            first_index: 0,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lookup_by_name() {
        for id in ProblemId::ALL {
            assert_eq!(builtin(id.name()).unwrap().id, id);
        }
        let err = builtin("nope").unwrap_err();
        assert!(matches!(err, Error::UnknownProblem(_)));
    }

    #[test]
    fn normalized_first_coefficient() {
        let spec = builtin_spec(ProblemId::NormalizedRational);
        assert_eq!(spec.coefficient(0), 1.0);
        assert_eq!(gtilde_eval(&spec, c(0.0)).unwrap(), c(1.0));
        assert_eq!(spec.coefficient(1), 0.5);
    }

    #[test]
    fn harmonic_is_flagged_discontinuous() {
        let spec = builtin_spec(ProblemId::Harmonic);
        let JumpKind::Discontinuous(truth) = spec.jump else {
            panic!("harmonic must be discontinuous");
        };
        assert_eq!(truth.eval(1.0), 1.0);
        assert!(!truth.is_continuous());
        assert_eq!(truth.eval(0.5), 0.0);
        let l = Complex64::new(0.3, 2.0);
        assert!((gtilde_eval(&spec, l).unwrap() - 1.0 / (l + 1.0)).norm() < 1e-15);
    }

    #[test]
    fn continuous_truths_vanish_at_the_boundary() {
        for id in ProblemId::ALL {
            let spec = builtin_spec(id);
            let truth = spec.truth().unwrap();
            if truth.is_continuous() {
                assert_eq!(truth.eval(truth.support.lower), 0.0, "{id}");
            }
            assert_eq!(truth.eval(truth.support.lower - 0.25), 0.0, "{id}");
        }
    }

    #[test]
    fn round_trip_coefficients_against_interpolant() {
        for id in ProblemId::ALL {
            let spec = builtin_spec(id);
            for k in spec.first_index..=60 {
                let g = gtilde_eval(&spec, c(k as f64)).unwrap();
                assert!((g.re - spec.coefficient(k)).abs() <= 1e-12, "{id} k={k}");
                assert_eq!(g.im, 0.0);
            }
        }
    }

    #[test]
    fn closed_forms_match_transform_quadrature() {
        let opts = QuadratureOptions::new(1e-12, 1e-12);
        for id in ProblemId::ALL {
            let spec = builtin_spec(id);
            for lambda in [
                c(0.0),
                c(0.5),
                c(1.0),
                c(2.5),
                Complex64::new(0.5, 3.0),
                Complex64::new(-0.5, -1.0),
            ] {
                let closed = gtilde_eval(&spec, lambda).unwrap();
                let quad = gtilde_quadrature(&spec, lambda, &opts).unwrap();
                assert!(
                    (closed - quad).norm() < 1e-8,
                    "{id} λ={lambda}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn thermal_laplace_transform() {
        let spec = builtin_spec(ProblemId::ThermalBosonDemo);
        let opts = QuadratureOptions::new(1e-13, 1e-13);
        for k in 1..=8u64 {
            let quad = gtilde_quadrature(&spec, c(k as f64), &opts).unwrap();
            let expected = 6.0 / (((k + 2) * (k + 3)) as f64);
            assert!((quad.re - expected).abs() < 1e-11);
        }
    }

    #[test]
    fn half_plane_is_enforced() {
        let spec = builtin_spec(ProblemId::NormalizedRational);
        assert!(gtilde_eval(&spec, c(-2.0)).is_err());
        assert!(gtilde_eval(&spec, c(-1.9)).is_ok());
        assert!(gtilde_eval(&builtin_spec(ProblemId::Harmonic), c(-1.0)).is_err());
    }

    #[test]
    fn energies_match_quadrature() {
        let opts = QuadratureOptions::new(1e-13, 1e-13);
        for id in ProblemId::ALL {
            let truth = *builtin_spec(id).truth().unwrap();
            let q = integrate_with(
                |t| truth.eval(t).powi(2),
                truth.support.lower,
                f64::INFINITY,
                &opts,
            )
            .unwrap();
            assert!((q.value - truth.energy).abs() < 1e-11, "{id}");
        }
    }

    #[test]
    fn thermal_set_starts_at_one() {
        let set = builtin_spec(ProblemId::ThermalBosonDemo).coefficients(60);
        assert_eq!(set.first_index, 1);
        assert_eq!(set.len(), 60);
        assert_eq!(set.n(), Some(60));
        assert_eq!(set.get(0), None);
        assert_eq!(set.get(1), Some(0.5));
        let shifted = set.shifted_to_zero();
        assert_eq!(shifted.get(0), Some(0.5));
    }

    #[test]
    fn non_finite_values_rejected() {
        assert!(CoefficientSet::from_values(vec![1.0, f64::NAN], 0, "t").is_err());
        assert!(CoefficientSet::from_values(vec![f64::INFINITY], 0, "t").is_err());
    }
}
