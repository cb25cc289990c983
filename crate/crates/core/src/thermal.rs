//! Boson-sector thermal reconstruction.
//!
//! Input is the Matsubara-side sequence `g_1, g_2, …, g_N` (there is no
//! `g_0`) at period `β = 2π`. The expansion coefficients are the
//! power-series ones of the shifted sequence `h_k = g_{k+1}`, and the jump
//! function on the real-time axis is
//!
//! ```text
//! J(v) = e^{v/2} Σ_n 𝔠_n Ψ_n(v),   Ψ_n(v) = √2 L_n(2e^{-v}) e^{-e^{-v}} e^{-v/2}
//! ```
//!
//! which equals `x J_x(x)` at `x = e^v`, with `J_x` the power-series
//! reconstruction of `h`. Errors are measured in `L²(0, ∞)` with weight
//! `e^{-v}`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CoefficientSet, JumpGroundTruth, Variable};
use crate::error::{Error, Result};
use crate::reconstruct::{
    detect_plateau, partial_energies, rotated_sums, synthesize_coefficients, PlateauPolicy,
    Synthesis, DEFAULT_DOUBLINGS, SCHEMA_VERSION,
};
use crate::specfun::{
    gamma_complex, integrate_with, laguerre_seq, mp_real_seq, Precision, QuadratureOptions,
};

/// Period after rescaling imaginary time.
pub const BETA: f64 = 2.0 * PI;
/// Upper end of the weighted error integral.
pub const DEFAULT_V_MAX: f64 = 15.0;

#[derive(Clone, Debug)]
pub struct ThermalProblem {
    /// `g_1 ..= g_N`.
    pub coefficients: CoefficientSet,
    pub beta: f64,
    pub truth: Option<JumpGroundTruth>,
}

impl ThermalProblem {
    pub fn new(coefficients: CoefficientSet, truth: Option<JumpGroundTruth>) -> Result<Self> {
        if coefficients.first_index != 1 {
            return Err(Error::Input(format!(
                "thermal coefficients start at index 1, got first index {}",
                coefficients.first_index
            )));
        }
        if coefficients.is_empty() {
            return Err(Error::Input("no thermal coefficients".into()));
        }
        if let Some(t) = &truth {
            if t.variable != Variable::V {
                return Err(Error::Input(
                    "thermal ground truth must be a function of v".into(),
                ));
            }
        }
        Ok(ThermalProblem {
            coefficients,
            beta: BETA,
            truth,
        })
    }

    /// `h_k = g_{k+1}`, indexed from zero.
    pub fn shifted(&self) -> CoefficientSet {
        self.coefficients.shifted_to_zero()
    }
}

/// `𝔠_n = √2 Σ_{k=0}^{N-1} (-1)^k g_{k+1} i^n P_n(-i(k+1/2)) / k!`, with the
/// same precision escalation as the power-series synthesis.
pub fn synthesize_thermal(
    problem: &ThermalProblem,
    n_max: usize,
    precision0: Precision,
    max_doublings: u32,
) -> Result<Synthesis> {
    synthesize_coefficients(&problem.shifted(), n_max, precision0, max_doublings)
}

/// Real basis `√2 L_n(2e^{-v}) e^{-e^{-v}} e^{-v/2}` (the `i^n` is carried
/// by the coefficients).
pub fn basis_psi_big(n: usize, v: f64) -> f64 {
    let y = (-v).exp();
    let envelope = (-y).exp() * (-0.5 * v).exp();
    if envelope == 0.0 || !envelope.is_finite() {
        return 0.0;
    }
    SQRT_2 * laguerre_seq(n, 2.0 * y)[n] * envelope
}

/// Truncated thermal expansion `e^{v/2} Σ_{n ≤ m_t} 𝔠_n Ψ_n(v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalExpansion {
    pub coefficients: Vec<f64>,
}

impl ThermalExpansion {
    pub fn truncated(frak_c: &[f64], m_t: usize) -> Result<Self> {
        if m_t >= frak_c.len() {
            return Err(Error::Input(format!(
                "truncation index {m_t} beyond {} coefficients",
                frak_c.len()
            )));
        }
        Ok(ThermalExpansion {
            coefficients: frak_c[..=m_t].to_vec(),
        })
    }

    pub fn eval(&self, v: f64) -> f64 {
        let y = (-v).exp();
        // e^{v/2} Ψ_n(v) = √2 L_n(2y) e^{-y}
        let envelope = (-y).exp();
        if envelope == 0.0 || self.coefficients.is_empty() {
            return 0.0;
        }
        let lag = laguerre_seq(self.coefficients.len() - 1, 2.0 * y);
        let sum: f64 = self.coefficients.iter().zip(&lag).map(|(c, l)| c * l).sum();
        SQRT_2 * sum * envelope
    }

    /// Mirror branch: `J^{(-)}(v) = J^{(+)}(-v)` for `v ≤ 0`.
    pub fn eval_negative(&self, v: f64) -> f64 {
        self.eval(-v)
    }
}

pub fn reconstruct_thermal(frak_c: &[f64], m_t: usize, vs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(v) = vs.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain(
            "reconstruct_thermal",
            format!("grid point {v} is not in [0, ∞)"),
        ));
    }
    let e = ThermalExpansion::truncated(frak_c, m_t)?;
    Ok(vs.par_iter().map(|&v| (v, e.eval(v))).collect())
}

/// Negative-frequency branch on `v ≤ 0`, by reflection of the positive one.
pub fn reconstruct_thermal_negative(
    frak_c: &[f64],
    m_t: usize,
    vs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let mirrored: Vec<f64> = vs.iter().map(|v| -v).collect();
    Ok(reconstruct_thermal(frak_c, m_t, &mirrored)?
        .into_iter()
        .map(|(v, j)| (-v, j))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedErrors {
    pub l2w_abs: f64,
    pub l2w_rel: Option<f64>,
    pub v_max: f64,
}

fn weighted(err_sq: f64, norm_sq: f64, v_max: f64) -> WeightedErrors {
    WeightedErrors {
        l2w_abs: err_sq.max(0.0).sqrt(),
        l2w_rel: (norm_sq > 0.0).then(|| (err_sq / norm_sq).max(0.0).sqrt()),
        v_max,
    }
}

/// `∫_0^{v_max} e^{-v} |J_rec - J|² dv` by the trapezoid rule over samples.
pub fn weighted_l2_error(
    samples: &[(f64, f64)],
    truth: &JumpGroundTruth,
    v_max: f64,
) -> Result<WeightedErrors> {
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(v, _)| *v >= 0.0 && *v <= v_max)
        .collect();
    if inside.len() < 2 || inside.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Input(
            "need at least two strictly increasing samples in [0, v_max]".into(),
        ));
    }
    let trapezoid = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        inside
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (f(w[0].0, w[0].1) + f(w[1].0, w[1].1)))
            .sum()
    };
    let err_sq = trapezoid(&|v, j| (-v).exp() * (j - truth.eval(v)).powi(2));
    let norm_sq = trapezoid(&|v, _| (-v).exp() * truth.eval(v).powi(2));
    Ok(weighted(err_sq, norm_sq, v_max))
}

/// Weighted error by adaptive quadrature on `[0, v_max]`.
pub fn weighted_l2_error_quadrature(
    f: &(dyn Fn(f64) -> f64 + Sync),
    truth: &JumpGroundTruth,
    v_max: f64,
    options: &QuadratureOptions,
) -> Result<WeightedErrors> {
    let err_sq = integrate_with(
        |v| (-v).exp() * (f(v) - truth.eval(v)).powi(2),
        0.0,
        v_max,
        options,
    )?;
    let norm_sq = integrate_with(|v| (-v).exp() * truth.eval(v).powi(2), 0.0, v_max, options)?;
    Ok(weighted(err_sq.value, norm_sq.value, v_max))
}

/// `d_n = 2√π Σ_{k=0}^{N-1} (-1)^k g_{k+1} P_n(-i(k+1/2)) / k!`.
pub fn line_coefficients(
    problem: &ThermalProblem,
    n_max: usize,
    precision: Precision,
) -> Result<Vec<Complex64>> {
    let sums = rotated_sums(&problem.coefficients.values, n_max, precision)?;
    let scale = 2.0 * PI.sqrt();
    Ok(sums
        .into_iter()
        .enumerate()
        // P_n(-i(k+1/2)) = i^n q_n(k)
        .map(|(n, q)| scale * q * Complex64::i().powu(n as u32))
        .collect())
}

/// `ψ_n(ν) = Γ(1/2 + iν) P_n(ν) / √π` for `n = 0 ..= n_max`.
pub fn psi_line(n_max: usize, nu: f64) -> Result<Vec<Complex64>> {
    let gamma = gamma_complex(Complex64::new(0.5, nu))? / PI.sqrt();
    Ok(mp_real_seq(n_max, nu)
        .into_iter()
        .map(|p| gamma * p)
        .collect())
}

/// `g̃(1/2 + iν) ≈ Σ_{n ≤ m_t} d_n ψ_n(ν)` on the given `ν` values.
pub fn gtilde_line_expansion(
    d: &[Complex64],
    m_t: usize,
    nu_grid: &[f64],
) -> Result<Vec<(f64, Complex64)>> {
    if m_t >= d.len() {
        return Err(Error::Input(format!(
            "truncation index {m_t} beyond {} coefficients",
            d.len()
        )));
    }
    nu_grid
        .iter()
        .map(|&nu| {
            let psi = psi_line(m_t, nu)?;
            let sum = d[..=m_t]
                .iter()
                .zip(&psi)
                .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b);
            Ok((nu, sum))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalOptions {
    pub n_max: usize,
    pub precision0: u32,
    pub max_doublings: u32,
    pub plateau: PlateauPolicy,
    /// Uniform grid on `[0, v_end]` with this many points.
    pub grid: (f64, usize),
    pub v_max: f64,
}

impl Default for ThermalOptions {
    fn default() -> Self {
        ThermalOptions {
            n_max: 200,
            precision0: Precision::default().bits(),
            max_doublings: DEFAULT_DOUBLINGS,
            plateau: PlateauPolicy::default(),
            grid: (DEFAULT_V_MAX, 3001),
            v_max: DEFAULT_V_MAX,
        }
    }
}

impl ThermalOptions {
    pub fn grid_points(&self) -> Vec<f64> {
        let (end, count) = self.grid;
        match count {
            0 => Vec::new(),
            1 => vec![0.0],
            _ => (0..count)
                .map(|i| end * i as f64 / (count - 1) as f64)
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Precision::new(self.precision0)?;
        self.plateau.validate()?;
        if !(self.v_max > 0.0 && self.v_max.is_finite()) {
            return Err(Error::config(
                "v_max",
                format!("must be > 0, got {}", self.v_max),
            ));
        }
        if !(self.grid.0 > 0.0) || self.grid.1 < 2 {
            return Err(Error::config(
                "grid",
                "need a positive end and at least two points",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalSample {
    pub v: f64,
    pub j_rec: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_true: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalReport {
    pub schema_version: u32,
    pub source: String,
    pub n_coeffs: u64,
    pub epsilon: f64,
    pub seed: Option<u64>,
    pub beta: f64,
    pub frak_c: Vec<f64>,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    pub plateau: Option<(usize, usize)>,
    pub m_t: usize,
    pub low_confidence: bool,
    /// `Σ_{n ≤ m_t} 𝔠_n²`, approximating `‖e^{-v/2} J‖²`.
    pub parseval_energy: f64,
    pub samples: Vec<ThermalSample>,
    pub weighted_errors: Option<WeightedErrors>,
    pub precision_used: u32,
    pub stabilized: bool,
}

pub fn run_thermal(problem: &ThermalProblem, options: &ThermalOptions) -> Result<ThermalReport> {
    options.validate()?;
    let synthesis = synthesize_thermal(
        problem,
        options.n_max,
        Precision::new(options.precision0)?,
        options.max_doublings,
    )?;
    let m = partial_energies(&synthesis.c);
    let detection = detect_plateau(&m, &options.plateau)?;
    let values = reconstruct_thermal(&synthesis.c, detection.m_t, &options.grid_points())?;
    let truth = problem.truth.as_ref();
    let weighted_errors = truth
        .map(|t| weighted_l2_error(&values, t, options.v_max))
        .transpose()?;
    let samples = values
        .iter()
        .map(|&(v, j_rec)| ThermalSample {
            v,
            j_rec,
            j_true: truth.map(|t| t.eval(v)),
        })
        .collect();
    Ok(ThermalReport {
        schema_version: SCHEMA_VERSION,
        source: problem.coefficients.source.clone(),
        n_coeffs: problem.coefficients.n().unwrap_or(0),
        epsilon: problem.coefficients.epsilon,
        seed: problem.coefficients.seed,
        beta: problem.beta,
        parseval_energy: m[detection.m_t],
        frak_c: synthesis.c,
        m,
        plateau: detection.plateau,
        m_t: detection.m_t,
        low_confidence: detection.low_confidence || problem.coefficients.len() < 2,
        samples,
        weighted_errors,
        precision_used: synthesis.precision_used,
        stabilized: synthesis.stabilized,
    })
}

/// `v,J_rec[,J_true]`.
pub fn thermal_samples_csv(samples: &[ThermalSample]) -> String {
    let with_truth = samples.iter().any(|s| s.j_true.is_some());
    let mut out = String::from(if with_truth {
        "v,J_rec,J_true\n"
    } else {
        "v,J_rec\n"
    });
    for s in samples {
        match s.j_true {
            Some(t) if with_truth => {
                let _ = writeln!(out, "{:?},{:?},{:?}", s.v, s.j_rec, t);
            }
            _ => {
                let _ = writeln!(out, "{:?},{:?}", s.v, s.j_rec);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{builtin_spec, ProblemId};
    use crate::reconstruct::{basis_phi, synthesize_at, JumpExpansion};

    fn demo(n: u64) -> ThermalProblem {
        let spec = builtin_spec(ProblemId::ThermalBosonDemo);
        ThermalProblem::new(spec.coefficients(n), spec.truth().copied()).unwrap()
    }

    #[test]
    fn zero_based_input_rejected() {
        let g = builtin_spec(ProblemId::NormalizedRational).coefficients(5);
        assert!(ThermalProblem::new(g, None).is_err());
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let g = CoefficientSet::from_values(vec![0.0; 10], 1, "zeros").unwrap();
        let p = ThermalProblem::new(g, None).unwrap();
        let s = synthesize_thermal(&p, 40, Precision::default(), 4).unwrap();
        assert!(s.c.iter().all(|c| *c == 0.0));
        let r = run_thermal(&p, &ThermalOptions::default()).unwrap();
        assert!(r.samples.iter().all(|s| s.j_rec == 0.0));
    }

    #[test]
    fn index_shift_matches_brute_force() {
        let p = demo(30);
        let s = synthesize_thermal(&p, 60, Precision::default(), 4).unwrap();
        let h: Vec<f64> = (0..30u64)
            .map(|k| 6.0 / (((k + 3) * (k + 4)) as f64))
            .collect();
        let direct = synthesize_at(&h, 60, Precision::new(s.precision_used).unwrap()).unwrap();
        assert_eq!(s.c, direct);
        let mut c0 = 0.0;
        let mut fact = 1.0;
        for (k, hk) in h.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            c0 += if k % 2 == 0 { *hk } else { -hk } / fact;
        }
        assert!((s.c[0] - SQRT_2 * c0).abs() < 1e-14);
    }

    #[test]
    fn psi_is_phi_under_exponential_change() {
        // Ψ_n(v) = e^{v/2} φ_n(e^v)
        for n in [0, 1, 4, 9] {
            for v in [-1.5, 0.0, 0.3, 2.0, 6.0] {
                let lhs = basis_psi_big(n, v);
                let rhs = (0.5 * v).exp() * basis_phi(n, v.exp()).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-13 * rhs.abs().max(1e-3),
                    "n={n} v={v}"
                );
            }
        }
        let v: f64 = 40.0;
        assert!((basis_psi_big(0, v) / (SQRT_2 * (-v / 2.0).exp()) - 1.0).abs() < 1e-12);
        assert_eq!(basis_psi_big(3, -800.0), 0.0);
    }

    #[test]
    fn thermal_equals_scaled_power_series_reconstruction() {
        let p = demo(20);
        let s = synthesize_thermal(&p, 60, Precision::default(), 4).unwrap();
        let t = ThermalExpansion::truncated(&s.c, 40).unwrap();
        let x = JumpExpansion::truncated(&s.c, 40).unwrap();
        for v in [0.0, 0.1, 0.7, 2.0, 5.0, 12.0] {
            let lhs = t.eval(v);
            let rhs = v.exp() * x.eval(v.exp());
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }
        assert_eq!(t.eval_negative(-0.7), t.eval(0.7));
    }

    #[test]
    fn zero_reconstruction_weighted_norm() {
        let truth = *builtin_spec(ProblemId::ThermalBosonDemo).truth().unwrap();
        let opts = QuadratureOptions::new(1e-13, 1e-13);
        let e = weighted_l2_error_quadrature(&|_| 0.0, &truth, 60.0, &opts).unwrap();
        let expected = 36.0 * (1.0 / 5.0 - 2.0 / 6.0 + 1.0 / 7.0);
        assert!((e.l2w_abs.powi(2) - expected).abs() < 1e-12);
        let exact: Vec<(f64, f64)> = (0..100)
            .map(|i| (0.1 * i as f64, truth.eval(0.1 * i as f64)))
            .collect();
        assert_eq!(
            weighted_l2_error(&exact, &truth, 15.0).unwrap().l2w_abs,
            0.0
        );
    }

    #[test]
    fn negative_branch_reflects() {
        let c = [0.4, -0.2, 0.1];
        let pos = reconstruct_thermal(&c, 2, &[0.0, 0.5, 3.0]).unwrap();
        let neg = reconstruct_thermal_negative(&c, 2, &[0.0, -0.5, -3.0]).unwrap();
        for (a, b) in pos.iter().zip(&neg) {
            assert_eq!(a.1, b.1);
            assert_eq!(a.0, -b.0);
        }
        assert!(reconstruct_thermal(&c, 2, &[-0.1]).is_err());
    }

    #[test]
    fn line_expansion_is_conjugate_symmetric() {
        let p = demo(30);
        let d = line_coefficients(&p, 40, Precision::new(640).unwrap()).unwrap();
        let vals = gtilde_line_expansion(&d, 40, &[-2.5, -0.5, 0.5, 2.5]).unwrap();
        for i in 0..2 {
            let (a, b) = (vals[i].1, vals[3 - i].1);
            assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1e-12));
        }
        let zero = ThermalProblem::new(
            CoefficientSet::from_values(vec![0.0; 5], 1, "z").unwrap(),
            None,
        )
        .unwrap();
        let dz = line_coefficients(&zero, 10, Precision::default()).unwrap();
        let vz = gtilde_line_expansion(&dz, 10, &[0.0, 1.0]).unwrap();
        assert!(vz.iter().all(|(_, v)| v.norm() == 0.0));
    }

    #[test]
    fn line_and_expansion_coefficients_differ_by_constant() {
        let p = demo(30);
        let prec = Precision::new(640).unwrap();
        let d = line_coefficients(&p, 30, prec).unwrap();
        let c = synthesize_thermal(&p, 30, prec, 0).unwrap().c;
        for (dn, cn) in d.iter().zip(&c) {
            if cn.abs() > 1e-12 {
                assert!((dn.norm() / cn.abs() - (2.0 * PI).sqrt()).abs() < 1e-12);
            }
        }
    }
}
