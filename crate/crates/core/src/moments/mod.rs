//! Finite differences, Bernstein weights and the Hausdorff diagnostics.
//!
//! For a sequence `μ_k` the Bernstein weights of row `n` are
//! `w_k^{(n)} = C(n,k) (-1)^{n-k} Δ^{n-k} μ_k`. Nonnegative rows for every
//! `n` characterise moments of a positive measure on `[0, 1]`; a bounded
//! statistic `(n+1)^{p-1} Σ_k |w_k^{(n)}|^p` characterises moments of an
//! `L^p` density.
//!
//! Sequences with a rational closed form are processed in exact arithmetic,
//! everything else in doubles.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::corpus::CoefficientSet;
use crate::error::{Error, Result};

/// Exponent for power-series checks, `2 + ε` with a small ε.
pub const DEFAULT_P: f64 = 2.0 + 1e-3;
/// Exponent for the thermal checks.
pub const THERMAL_P: f64 = 2.0;

type RationalRule = Arc<dyn Fn(u64) -> BigRational + Send + Sync>;

#[derive(Clone)]
enum Generator {
    Rule(RationalRule),
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// A sequence `μ_0, μ_1, …` given by a rational rule or by stored values.
#[derive(Clone)]
pub struct MomentSequence {
    label: String,
    generator: Generator,
}

impl fmt::Debug for MomentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentSequence")
            .field("label", &self.label)
            .field("exact", &self.is_exact())
            .field("length_available", &self.length_available())
            .finish()
    }
}

impl MomentSequence {
    pub fn from_rule(
        label: impl Into<String>,
        rule: impl Fn(u64) -> BigRational + Send + Sync + 'static,
    ) -> Self {
        MomentSequence {
            label: label.into(),
            generator: Generator::Rule(Arc::new(rule)),
        }
    }

    pub fn from_exact(label: impl Into<String>, values: Vec<BigRational>) -> Self {
        MomentSequence {
            label: label.into(),
            generator: Generator::Exact(values),
        }
    }

    pub fn from_values(label: impl Into<String>, values: Vec<f64>) -> Self {
        MomentSequence {
            label: label.into(),
            generator: Generator::Float(values),
        }
    }

    /// `μ_k = 1/(k+1)`, the moments of the uniform distribution.
    pub fn harmonic() -> Self {
        Self::from_rule("1/(k+1)", |k| {
            BigRational::new(BigInt::one(), BigInt::from(k) + 1)
        })
    }

    /// `μ_k = 1`, the moments of a point mass at `t = 1`.
    pub fn constant() -> Self {
        Self::from_rule("1", |_| BigRational::one())
    }

    /// `μ_k = (-1)^k`, not a moment sequence on `[0, 1]`.
    pub fn alternating() -> Self {
        Self::from_rule("(-1)^k", |k| {
            if k % 2 == 0 {
                BigRational::one()
            } else {
                -BigRational::one()
            }
        })
    }

    /// Coefficients as a sequence indexed from their first stored index.
    /// Exact values are used when the set carries them.
    pub fn from_coefficients(set: &CoefficientSet) -> Self {
        match &set.exact {
            Some(exact) => Self::from_exact(set.source.clone(), exact.clone()),
            None => Self::from_values(set.source.clone(), set.values.clone()),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.generator, Generator::Float(_))
    }

    /// Number of stored terms, `None` when generated by a rule.
    pub fn length_available(&self) -> Option<usize> {
        match &self.generator {
            Generator::Rule(_) => None,
            Generator::Exact(v) => Some(v.len()),
            Generator::Float(v) => Some(v.len()),
        }
    }

    pub fn exact(&self, k: u64) -> Option<BigRational> {
        match &self.generator {
            Generator::Rule(rule) => Some(rule(k)),
            Generator::Exact(v) => usize::try_from(k).ok().and_then(|i| v.get(i)).cloned(),
            Generator::Float(_) => None,
        }
    }

    pub fn value(&self, k: u64) -> Option<f64> {
        match &self.generator {
            Generator::Float(v) => usize::try_from(k).ok().and_then(|i| v.get(i)).copied(),
            _ => self.exact(k).map(|q| q.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Term-wise `f_k = m(k) μ_k` for an integer multiplier.
    pub fn scaled_by_index(
        &self,
        label: impl Into<String>,
        m: impl Fn(u64) -> i64 + Send + Sync + 'static,
    ) -> Self {
        let label = label.into();
        match &self.generator {
            Generator::Float(v) => Self::from_values(
                label,
                v.iter()
                    .enumerate()
                    .map(|(k, x)| m(k as u64) as f64 * x)
                    .collect(),
            ),
            Generator::Exact(v) => Self::from_exact(
                label,
                v.iter()
                    .enumerate()
                    .map(|(k, x)| x * BigRational::from_integer(m(k as u64).into()))
                    .collect(),
            ),
            Generator::Rule(rule) => {
                let rule = Arc::clone(rule);
                Self::from_rule(label, move |k| {
                    rule(k) * BigRational::from_integer(m(k).into())
                })
            }
        }
    }

    fn require(&self, n: usize) -> Result<()> {
        match self.length_available() {
            Some(len) if len <= n => Err(Error::Input(format!(
                "sequence `{}` has {len} terms, row {n} needs {}",
                self.label,
                n + 1
            ))),
            _ => Ok(()),
        }
    }
}

/// Either exact rationals or doubles, chosen by the sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Values::Exact(_))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Values::Exact(v) => v.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect(),
            Values::Float(v) => v.clone(),
        }
    }
}

/// Triangular table with `row(r)[k] = Δ^r μ_k` for `r + k ≤ n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceTable {
    n: usize,
    rows: Vec<Values>,
}

impl DifferenceTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, r: usize) -> &Values {
        &self.rows[r]
    }

    pub fn get_f64(&self, r: usize, k: usize) -> f64 {
        match &self.rows[r] {
            Values::Exact(v) => v[k].to_f64().unwrap_or(f64::NAN),
            Values::Float(v) => v[k],
        }
    }
}

pub fn difference_table(mu: &MomentSequence, n: usize) -> Result<DifferenceTable> {
    build_table(mu, n, mu.is_exact())
}

/// Same table computed in doubles even for exact sequences.
pub fn difference_table_f64(mu: &MomentSequence, n: usize) -> Result<DifferenceTable> {
    build_table(mu, n, false)
}

fn build_table(mu: &MomentSequence, n: usize, exact: bool) -> Result<DifferenceTable> {
    mu.require(n)?;
    let mut rows = Vec::with_capacity(n + 1);
    if exact {
        let mut cur: Vec<BigRational> = (0..=n as u64)
            .map(|k| mu.exact(k).expect("exact sequence"))
            .collect();
        for _ in 0..=n {
            let next: Vec<BigRational> = cur.windows(2).map(|w| &w[1] - &w[0]).collect();
            rows.push(Values::Exact(std::mem::replace(&mut cur, next)));
        }
    } else {
        let mut cur: Vec<f64> = (0..=n as u64)
            .map(|k| mu.value(k).expect("length checked"))
            .collect();
        for _ in 0..=n {
            let next: Vec<f64> = cur.windows(2).map(|w| w[1] - w[0]).collect();
            rows.push(Values::Float(std::mem::replace(&mut cur, next)));
        }
    }
    Ok(DifferenceTable { n, rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BernsteinRow {
    pub n: usize,
    pub weights: Values,
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

fn row_from_table(table: &DifferenceTable, n: usize) -> BernsteinRow {
    let binom = binomial_row(n);
    let weights = match &table.rows[0] {
        Values::Exact(_) => Values::Exact(
            (0..=n)
                .map(|k| {
                    let Values::Exact(d) = &table.rows[n - k] else {
                        unreachable!()
                    };
                    let w = &d[k] * BigRational::from_integer(binom[k].clone());
                    if (n - k) % 2 == 1 {
                        -w
                    } else {
                        w
                    }
                })
                .collect(),
        ),
        Values::Float(_) => Values::Float(
            (0..=n)
                .map(|k| {
                    let Values::Float(d) = &table.rows[n - k] else {
                        unreachable!()
                    };
                    let sign = if (n - k) % 2 == 1 { -1.0 } else { 1.0 };
                    sign * binom[k].to_f64().unwrap_or(f64::INFINITY) * d[k]
                })
                .collect(),
        ),
    };
    BernsteinRow { n, weights }
}

/// Bernstein weights of row `n`; exact for exact sequences.
pub fn bernstein_weights(mu: &MomentSequence, n: usize) -> Result<BernsteinRow> {
    Ok(row_from_table(&difference_table(mu, n)?, n))
}

/// Bernstein weights of row `n` in double precision regardless of the sequence.
pub fn bernstein_weights_f64(mu: &MomentSequence, n: usize) -> Result<BernsteinRow> {
    Ok(row_from_table(&difference_table_f64(mu, n)?, n))
}

/// Monotone-trend summary of the L^p statistic over the rows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatisticTrend {
    pub max: f64,
    pub last: f64,
    /// Least-squares slope of `ln S_n` against `ln(n+1)` over the upper half
    /// of the rows; near zero when the statistic settles.
    pub tail_log_slope: f64,
    pub verdict: TrendVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendVerdict {
    Settling,
    Growing,
    Insufficient,
}

/// A point mass drives the statistic like `n^{p-1}`; tail slopes below this
/// fraction of that rate count as settling.
const SETTLING_FRACTION: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub label: String,
    pub n_max: usize,
    pub p: f64,
    pub exact: bool,
    pub positivity_ok: bool,
    pub min_weight: f64,
    /// First `(n, k)` with `w_k^{(n)} < 0`.
    pub first_negative: Option<(usize, usize)>,
    pub lp_statistic: Vec<f64>,
    pub trend: StatisticTrend,
    /// `C = (max_n S_n)^{1/p}`.
    pub decay_constant: f64,
    /// `|μ_n| ≤ C / (n+1)^{(p-1)/p}` for every row.
    pub decay_bound_ok: bool,
}

pub fn hausdorff_check(mu: &MomentSequence, n_max: usize, p: f64) -> Result<HausdorffReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::config(
            "p",
            format!("exponent must be finite and > 1, got {p}"),
        ));
    }
    let table = difference_table(mu, n_max)?;
    let mut min_weight = f64::INFINITY;
    let mut first_negative = None;
    let mut lp_statistic = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let row = row_from_table(&table, n);
        let (negative, min_row, sum_p) = match &row.weights {
            Values::Exact(w) => {
                let negative = w.iter().position(|q| q.is_negative());
                let floats: Vec<f64> = w.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
                let min = floats.iter().copied().fold(f64::INFINITY, f64::min);
                (
                    negative,
                    min,
                    floats.iter().map(|x| x.abs().powf(p)).sum::<f64>(),
                )
            }
            Values::Float(w) => {
                let negative = w.iter().position(|x| *x < 0.0);
                let min = w.iter().copied().fold(f64::INFINITY, f64::min);
                (
                    negative,
                    min,
                    w.iter().map(|x| x.abs().powf(p)).sum::<f64>(),
                )
            }
        };
        if first_negative.is_none() {
            first_negative = negative.map(|k| (n, k));
        }
        min_weight = min_weight.min(min_row);
        lp_statistic.push(((n + 1) as f64).powf(p - 1.0) * sum_p);
    }
    let trend = summarize(&lp_statistic, p);
    let decay_constant = trend.max.powf(1.0 / p);
    let decay_bound_ok = (0..=n_max).all(|n| {
        let mu_n = table.get_f64(0, n).abs();
        let bound = decay_constant / ((n + 1) as f64).powf((p - 1.0) / p);
        // allow only the rounding of the statistic itself
        mu_n <= bound * (1.0 + 1e-12)
    });
    Ok(HausdorffReport {
        label: mu.label().to_string(),
        n_max,
        p,
        exact: mu.is_exact(),
        positivity_ok: first_negative.is_none(),
        min_weight,
        first_negative,
        lp_statistic,
        trend,
        decay_constant,
        decay_bound_ok,
    })
}

fn summarize(stat: &[f64], p: f64) -> StatisticTrend {
    let max = stat.iter().copied().fold(0.0, f64::max);
    let last = stat.last().copied().unwrap_or(0.0);
    let start = stat.len() / 2;
    let points: Vec<(f64, f64)> = stat
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, s)| **s > 0.0)
        .map(|(n, s)| (((n + 1) as f64).ln(), s.ln()))
        .collect();
    if points.len() < 3 {
        let verdict = if stat.iter().all(|s| *s == 0.0) && !stat.is_empty() {
            TrendVerdict::Settling
        } else {
            TrendVerdict::Insufficient
        };
        return StatisticTrend {
            max,
            last,
            tail_log_slope: 0.0,
            verdict,
        };
    }
    let slope = least_squares_slope(&points);
    StatisticTrend {
        max,
        last,
        tail_log_slope: slope,
        verdict: if slope < SETTLING_FRACTION * (p - 1.0) {
            TrendVerdict::Settling
        } else {
            TrendVerdict::Growing
        },
    }
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// How the auxiliary sequence `f_k` is built from `g_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FMode {
    /// `f_k = (k+1) g_k`
    KPlus1,
    /// `f_k = k g_k`
    K,
}

/// The auxiliary sequence `f_k` of a coefficient set.
pub fn f_sequence(g: &CoefficientSet, mode: FMode) -> MomentSequence {
    let base = MomentSequence::from_coefficients(g);
    let offset = g.first_index as i64;
    let (label, shift) = match mode {
        FMode::KPlus1 => (format!("(k+1) g_k [{}]", g.source), 1),
        FMode::K => (format!("k g_k [{}]", g.source), 0),
    };
    base.scaled_by_index(label, move |i| i as i64 + offset + shift)
}

/// Hausdorff diagnostics of `f_k` built from the coefficients.
pub fn check_f_sequence(
    g: &CoefficientSet,
    mode: FMode,
    n_max: usize,
    p: f64,
) -> Result<HausdorffReport> {
    if g.is_empty() {
        return Err(Error::Input("no coefficients to check".into()));
    }
    hausdorff_check(&f_sequence(g, mode), n_max, p)
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::corpus::{builtin_spec, ProblemId};

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn factorial(n: u64) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, i| acc * i)
    }

    #[test]
    fn constant_sequence_differences_vanish() {
        let t = difference_table(&MomentSequence::constant(), 8).unwrap();
        for r in 1..=8 {
            let Values::Exact(row) = t.row(r) else {
                panic!()
            };
            assert_eq!(row.len(), 9 - r);
            assert!(row.iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn harmonic_differences_closed_form() {
        let t = difference_table(&MomentSequence::harmonic(), 12).unwrap();
        let Values::Exact(first) = t.row(1) else {
            panic!()
        };
        assert_eq!(first[0], q(-1, 2));
        // Δ^r μ_k = (-1)^r r! k! / (k+r+1)!
        for r in 0..=12u64 {
            for k in 0..=(12 - r) {
                let Values::Exact(row) = t.row(r as usize) else {
                    panic!()
                };
                let mut expected =
                    BigRational::new(factorial(r) * factorial(k), factorial(k + r + 1));
                if r % 2 == 1 {
                    expected = -expected;
                }
                assert_eq!(row[k as usize], expected, "r={r} k={k}");
            }
        }
    }

    #[test]
    fn point_mass_weights() {
        let row = bernstein_weights(&MomentSequence::constant(), 4).unwrap();
        assert_eq!(row.n, 4);
        assert_eq!(row.weights.to_f64(), vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn uniform_weights_match_beta_integrals() {
        // ∫ t^k (1-t)^{n-k} dt = k!(n-k)!/(n+1)!, times C(n,k) gives 1/(n+1)
        let row = bernstein_weights(&MomentSequence::harmonic(), 10).unwrap();
        let Values::Exact(w) = row.weights else {
            panic!()
        };
        assert_eq!(w.len(), 11);
        for wk in w {
            assert_eq!(wk, q(1, 11));
        }
    }

    #[test]
    fn last_weight_equals_last_moment() {
        let seqs = [
            MomentSequence::harmonic(),
            MomentSequence::alternating(),
            MomentSequence::from_rule("k^2/(k+5)", |k| {
                let k = k as i64;
                BigRational::new((k * k).into(), (k + 5).into())
            }),
        ];
        for mu in &seqs {
            for n in 0..15 {
                let Values::Exact(w) = bernstein_weights(mu, n).unwrap().weights else {
                    panic!()
                };
                assert_eq!(w[n], mu.exact(n as u64).unwrap());
            }
        }
    }

    #[test]
    fn float_rows_agree_with_exact_rows() {
        let mu = MomentSequence::from_rule("6/((k+2)(k+3))", |k| {
            let k = k as i64;
            q(6, (k + 2) * (k + 3))
        });
        for n in 0..=30 {
            let exact = bernstein_weights(&mu, n).unwrap().weights.to_f64();
            let float = bernstein_weights_f64(&mu, n).unwrap().weights.to_f64();
            let scale = exact.iter().map(|x| x.abs()).fold(0.0, f64::max);
            let binom = binomial_row(n);
            for k in 0..=n {
                let err = (exact[k] - float[k]).abs();
                if n <= 18 {
                    assert!(err <= 1e-9 * scale, "n={n} k={k}");
                }
                // rounding of the inputs amplified by the difference stencil
                let stencil: f64 = binomial_row(n - k)
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c.to_f64().unwrap() * mu.value((k + j) as u64).unwrap().abs())
                    .sum();
                let bound = binom[k].to_f64().unwrap() * stencil * (n + 2) as f64 * f64::EPSILON;
                assert!(err <= bound, "n={n} k={k}: {err:e} > {bound:e}");
            }
        }
    }

    #[test]
    fn hausdorff_uniform() {
        let r = hausdorff_check(&MomentSequence::harmonic(), 40, 2.0).unwrap();
        assert!(r.positivity_ok);
        assert!(r.exact);
        assert_eq!(r.lp_statistic.len(), 41);
        for s in &r.lp_statistic {
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert_eq!(r.trend.verdict, TrendVerdict::Settling);
        assert!(r.decay_bound_ok);
    }

    #[test]
    fn hausdorff_point_mass_and_alternating() {
        let r = hausdorff_check(&MomentSequence::constant(), 20, DEFAULT_P).unwrap();
        assert!(r.positivity_ok);
        assert_eq!(r.trend.verdict, TrendVerdict::Growing);
        let r = hausdorff_check(&MomentSequence::alternating(), 20, DEFAULT_P).unwrap();
        assert!(!r.positivity_ok);
        // row 1 is [2, -1]
        assert_eq!(r.first_negative, Some((1, 1)));
        assert!(r.min_weight < 0.0);
    }

    #[test]
    fn invalid_exponent_and_short_sequences() {
        assert!(hausdorff_check(&MomentSequence::harmonic(), 3, 1.0).is_err());
        let short = MomentSequence::from_values("short", vec![1.0, 0.5]);
        assert!(matches!(difference_table(&short, 2), Err(Error::Input(_))));
        assert!(difference_table(&short, 1).is_ok());
    }

    #[test]
    fn f_sequence_of_unnormalized_rational() {
        // (k+1)/((k+2)(k+3)) are the moments of 2t² - t, which changes sign
        let g = builtin_spec(ProblemId::RationalUnnormalized).coefficients(40);
        let f = f_sequence(&g, FMode::KPlus1);
        assert!(f.is_exact());
        for k in 0..=40 {
            let k_i = k as i64;
            assert_eq!(f.exact(k).unwrap(), q(k_i + 1, (k_i + 2) * (k_i + 3)));
        }
        let r = check_f_sequence(&g, FMode::KPlus1, 40, DEFAULT_P).unwrap();
        assert!(!r.positivity_ok);
        assert_eq!(r.trend.verdict, TrendVerdict::Settling);
    }

    #[test]
    fn f_sequence_normalized_statistic_bounded() {
        let g = builtin_spec(ProblemId::NormalizedRational).coefficients(40);
        let r = check_f_sequence(&g, FMode::KPlus1, 40, DEFAULT_P).unwrap();
        assert_eq!(r.trend.verdict, TrendVerdict::Settling);
        // ∫_0^1 |6(2t² - t)|^p dt is finite; the statistic approaches it
        assert!(r.trend.max < 10.0);
        assert!(r.decay_bound_ok);
    }

    #[test]
    fn zero_coefficients_pass_trivially() {
        let g = CoefficientSet::from_values(vec![0.0; 11], 0, "zero").unwrap();
        for mode in [FMode::KPlus1, FMode::K] {
            let r = check_f_sequence(&g, mode, 10, DEFAULT_P).unwrap();
            assert!(r.positivity_ok);
            assert!(r.lp_statistic.iter().all(|s| *s == 0.0));
            assert!(r.decay_bound_ok);
        }
    }

    #[test]
    fn k_mode_multiplies_by_index() {
        let g = CoefficientSet::from_values(vec![1.0, 1.0, 1.0], 0, "ones").unwrap();
        assert_eq!(f_sequence(&g, FMode::K).value(2), Some(2.0));
        assert_eq!(f_sequence(&g, FMode::KPlus1).value(2), Some(3.0));
        let thermal = CoefficientSet::from_values(vec![1.0, 1.0], 1, "t").unwrap();
        assert_eq!(f_sequence(&thermal, FMode::K).value(0), Some(1.0));
    }
}
