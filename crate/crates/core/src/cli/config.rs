use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruct::{PlateauMode, PlateauPolicy};
use crate::specfun::{Precision, MIN_PRECISION_BITS};

/// Largest coefficient count accepted from the command line.
pub const MAX_COEFFS: u64 = 2000;
/// Largest synthesis depth accepted from the command line.
pub const MAX_N_MAX: usize = 5000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    Json,
    Csv,
    #[default]
    Both,
}

impl Emit {
    pub fn json(self) -> bool {
        matches!(self, Emit::Json | Emit::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Emit::Csv | Emit::Both)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PlateauModeArg {
    #[default]
    Heuristic,
    KnownEnergy,
}

/// Which sequence the `moments` command inspects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SequenceArg {
    /// The coefficients `g_k` themselves.
    #[default]
    Coefficients,
    /// `(k+1) g_k`.
    FKPlus1,
    /// `k g_k`.
    FK,
}

/// Settings shared by every pipeline. Loaded from JSON, then overridden by
/// flags; [`RunConfig::validate`] runs before any numerics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<String>,
    pub input: Option<PathBuf>,
    pub n_coeffs: u64,
    pub epsilon: f64,
    pub seed: u64,
    /// Defaults per command when absent.
    pub n_max: Option<usize>,
    pub plateau_mode: PlateauModeArg,
    pub known_k: Option<f64>,
    pub plateau_theta: f64,
    pub plateau_window: usize,
    pub plateau_floor: f64,
    pub plateau_max_rise: f64,
    pub precision_bits: u32,
    pub max_doublings: u32,
    pub output_dir: PathBuf,
    pub emit: Emit,
    pub p: Option<f64>,
    pub sequence: SequenceArg,
    pub expect_positive: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let plateau = PlateauPolicy::default();
        RunConfig {
            problem: None,
            input: None,
            n_coeffs: 60,
            epsilon: 0.0,
            seed: 42,
            n_max: None,
            plateau_mode: PlateauModeArg::Heuristic,
            known_k: None,
            plateau_theta: plateau.theta,
            plateau_window: plateau.min_run,
            plateau_floor: plateau.floor,
            plateau_max_rise: plateau.max_rise,
            precision_bits: Precision::default().bits(),
            max_doublings: crate::reconstruct::DEFAULT_DOUBLINGS,
            output_dir: PathBuf::from("out"),
            emit: Emit::Both,
            p: None,
            sequence: SequenceArg::Coefficients,
            expect_positive: false,
        }
    }
}

impl RunConfig {
    pub fn plateau(&self) -> Result<PlateauPolicy> {
        let mode = match (self.plateau_mode, self.known_k) {
            (PlateauModeArg::Heuristic, None) => PlateauMode::Heuristic,
            (PlateauModeArg::Heuristic, Some(_)) => {
                return Err(Error::config(
                    "known_k",
                    "only meaningful with plateau_mode = known_energy",
                ))
            }
            (PlateauModeArg::KnownEnergy, Some(known_k)) => PlateauMode::KnownEnergy { known_k },
            (PlateauModeArg::KnownEnergy, None) => {
                return Err(Error::config(
                    "known_k",
                    "required with plateau_mode = known_energy",
                ))
            }
        };
        let policy = PlateauPolicy {
            mode,
            theta: self.plateau_theta,
            min_run: self.plateau_window,
            floor: self.plateau_floor,
            max_rise: self.plateau_max_rise,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.problem, &self.input) {
            (None, None) => {
                return Err(Error::config(
                    "problem",
                    "one of problem or input is required",
                ))
            }
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "input",
                    "give either problem or input, not both",
                ))
            }
            _ => {}
        }
        if let Some(name) = &self.problem {
            crate::corpus::builtin(name)?;
        }
        if self.n_coeffs > MAX_COEFFS {
            return Err(Error::config(
                "n_coeffs",
                format!("at most {MAX_COEFFS}, got {}", self.n_coeffs),
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config(
                "epsilon",
                format!("must be finite and >= 0, got {}", self.epsilon),
            ));
        }
        if let Some(n) = self.n_max {
            if n == 0 || n > MAX_N_MAX {
                return Err(Error::config(
                    "n_max",
                    format!("must lie in 1..={MAX_N_MAX}, got {n}"),
                ));
            }
        }
        if self.precision_bits < MIN_PRECISION_BITS {
            return Err(Error::config(
                "precision_bits",
                format!(
                    "minimum is {MIN_PRECISION_BITS}, got {}",
                    self.precision_bits
                ),
            ));
        }
        if self.max_doublings > 8 {
            return Err(Error::config(
                "max_doublings",
                format!("at most 8, got {}", self.max_doublings),
            ));
        }
        if let Some(p) = self.p {
            if !(p > 1.0 && p.is_finite()) {
                return Err(Error::config(
                    "p",
                    format!("must be finite and > 1, got {p}"),
                ));
            }
        }
        if let Some(k) = self.known_k {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::config("known_k", format!("must be > 0, got {k}")));
            }
        }
        self.plateau()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub epsilons: Vec<f64>,
    pub ns: Vec<u64>,
    pub repeats: u32,
    pub seed_base: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            base: RunConfig {
                problem: Some("normalized_rational".into()),
                ..RunConfig::default()
            },
            epsilons: vec![0.0],
            ns: vec![60],
            repeats: 1,
            seed_base: 42,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base.input.is_some() {
            return Err(Error::config(
                "input",
                "sweeps run on builtin problems only",
            ));
        }
        self.base.validate()?;
        if self.epsilons.is_empty() {
            return Err(Error::config("epsilons", "at least one value required"));
        }
        if let Some(e) = self
            .epsilons
            .iter()
            .find(|e| !(**e >= 0.0 && e.is_finite()))
        {
            return Err(Error::config(
                "epsilons",
                format!("must be finite and >= 0, got {e}"),
            ));
        }
        if self.ns.is_empty() {
            return Err(Error::config("ns", "at least one value required"));
        }
        if let Some(n) = self.ns.iter().find(|n| **n > MAX_COEFFS) {
            return Err(Error::config(
                "ns",
                format!("at most {MAX_COEFFS}, got {n}"),
            ));
        }
        if self.repeats == 0 {
            return Err(Error::config("repeats", "must be >= 1"));
        }
        Ok(())
    }

    /// Seed of repeat `r` in cell `i`: `seed_base + i·repeats + r`, where
    /// cells are numbered `i = i_N·len(epsilons) + i_ε` in the given order.
    pub fn seed(&self, cell: usize, repeat: u32) -> u64 {
        self.seed_base
            .wrapping_add(cell as u64 * self.repeats as u64)
            .wrapping_add(repeat as u64)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        reason: e.to_string(),
    })
}
