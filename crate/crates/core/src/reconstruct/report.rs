use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::checks::{l2_error, ErrorMetrics};
use super::expansion::{reconstruct_jump, SampleGrid};
use super::plateau::{detect_plateau, PlateauPolicy};
use super::synthesis::{partial_energies, synthesize_coefficients, DEFAULT_DOUBLINGS};
use crate::corpus::{CoefficientSet, JumpGroundTruth};
use crate::error::{Error, Result};
use crate::specfun::Precision;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    pub n_max: usize,
    pub precision0: u32,
    pub max_doublings: u32,
    pub plateau: PlateauPolicy,
    pub grid: SampleGrid,
    pub error_domain: (f64, f64),
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            n_max: 200,
            precision0: Precision::default().bits(),
            max_doublings: DEFAULT_DOUBLINGS,
            plateau: PlateauPolicy::default(),
            grid: SampleGrid::default(),
            error_domain: (1.0, 50.0),
        }
    }
}

impl ReconstructOptions {
    pub fn validate(&self) -> Result<()> {
        Precision::new(self.precision0)?;
        self.plateau.validate()?;
        let (a, b) = self.error_domain;
        if !(a > 0.0 && b > a) {
            return Err(Error::config(
                "error_domain",
                format!("need 0 < a < b, got [{a}, {b}]"),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub j_rec: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_true: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub schema_version: u32,
    pub source: String,
    /// Highest coefficient index used.
    pub n_coeffs: u64,
    pub epsilon: f64,
    pub seed: Option<u64>,
    pub c: Vec<f64>,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    pub plateau: Option<(usize, usize)>,
    pub m_t: usize,
    pub low_confidence: bool,
    pub samples: Vec<Sample>,
    pub errors: Option<ErrorMetrics>,
    pub precision_used: u32,
    pub stabilized: bool,
}

/// Synthesis, plateau detection, truncated reconstruction on the grid and,
/// with a ground truth, the L² error over `options.error_domain`.
pub fn run_reconstruction(
    g: &CoefficientSet,
    truth: Option<&JumpGroundTruth>,
    options: &ReconstructOptions,
) -> Result<ReconstructionReport> {
    options.validate()?;
    let n = g
        .n()
        .ok_or_else(|| Error::Input("empty coefficient set".into()))?;
    let synthesis = synthesize_coefficients(
        g,
        options.n_max,
        Precision::new(options.precision0)?,
        options.max_doublings,
    )?;
    let m = partial_energies(&synthesis.c);
    let detection = detect_plateau(&m, &options.plateau)?;
    let xs = options.grid.points();
    let values = reconstruct_jump(&synthesis.c, detection.m_t, &xs)?;
    let samples: Vec<Sample> = values
        .iter()
        .map(|&(x, j_rec)| Sample {
            x,
            j_rec,
            j_true: truth.map(|t| t.eval(x)),
        })
        .collect();
    let errors = truth
        .map(|t| l2_error(&values, t, options.error_domain))
        .transpose()?;
    Ok(ReconstructionReport {
        schema_version: SCHEMA_VERSION,
        source: g.source.clone(),
        n_coeffs: n,
        epsilon: g.epsilon,
        seed: g.seed,
        c: synthesis.c,
        m,
        plateau: detection.plateau,
        m_t: detection.m_t,
        // a single coefficient cannot support a plateau claim
        low_confidence: detection.low_confidence || g.len() < 2,
        samples,
        errors,
        precision_used: synthesis.precision_used,
        stabilized: synthesis.stabilized,
    })
}

/// `x,J_rec[,J_true]` with shortest round-trip float formatting.
pub fn samples_csv(samples: &[Sample], variable: &str) -> String {
    let with_truth = samples.iter().any(|s| s.j_true.is_some());
    let mut out = String::new();
    if with_truth {
        let _ = writeln!(out, "{variable},J_rec,J_true");
    } else {
        let _ = writeln!(out, "{variable},J_rec");
    }
    for s in samples {
        match s.j_true {
            Some(t) if with_truth => {
                let _ = writeln!(out, "{:?},{:?},{:?}", s.x, s.j_rec, t);
            }
            _ => {
                let _ = writeln!(out, "{:?},{:?}", s.x, s.j_rec);
            }
        }
    }
    out
}
