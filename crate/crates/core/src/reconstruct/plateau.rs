use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PlateauMode {
    /// Longest run of small relative growth of `M_m`.
    Heuristic,
    /// `m_0 = max{m : M_m ≤ K}` for a known `K = ‖J‖²`.
    KnownEnergy { known_k: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauPolicy {
    pub mode: PlateauMode,
    /// Relative growth threshold θ.
    pub theta: f64,
    /// Minimum run length.
    pub min_run: usize,
    /// Floor δ in the relative-growth denominator.
    pub floor: f64,
    /// Largest rise `(M_{m_t} - M_a) / M_a` across the plateau before the
    /// detection is reported as low confidence.
    pub max_rise: f64,
}

impl Default for PlateauPolicy {
    fn default() -> Self {
        PlateauPolicy {
            mode: PlateauMode::Heuristic,
            theta: 5e-3,
            min_run: 5,
            floor: 1e-30,
            max_rise: 0.03,
        }
    }
}

impl PlateauPolicy {
    pub fn known_energy(known_k: f64) -> Self {
        PlateauPolicy {
            mode: PlateauMode::KnownEnergy { known_k },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::config(
                "plateau_theta",
                format!("must be > 0, got {}", self.theta),
            ));
        }
        if self.min_run < 2 {
            return Err(Error::config(
                "plateau_window",
                format!("must be >= 2, got {}", self.min_run),
            ));
        }
        if !(self.floor > 0.0 && self.floor.is_finite()) {
            return Err(Error::config(
                "plateau_floor",
                format!("must be > 0, got {}", self.floor),
            ));
        }
        if !(self.max_rise > 0.0 && self.max_rise.is_finite()) {
            return Err(Error::config(
                "plateau_max_rise",
                format!("must be > 0, got {}", self.max_rise),
            ));
        }
        if let PlateauMode::KnownEnergy { known_k } = self.mode {
            if !(known_k > 0.0 && known_k.is_finite()) {
                return Err(Error::config(
                    "known_k",
                    format!("must be > 0, got {known_k}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlateauDetection {
    /// `[a, b]`: `M` grows by at most θ (relative) at every step inside.
    pub plateau: Option<(usize, usize)>,
    pub m_t: usize,
    pub low_confidence: bool,
}

/// Relative growth `(M_{m+1} - M_m) / max(M_m, δ)` for `m < len - 1`.
pub fn relative_growth(m: &[f64], floor: f64) -> Vec<f64> {
    m.windows(2)
        .map(|w| (w[1] - w[0]) / w[0].max(floor))
        .collect()
}

/// Locate the plateau of the partial energies and pick the truncation index.
///
/// Heuristic mode takes the longest run `[a, b]`, `b - a ≥ min_run`, with
/// relative growth at most θ on every step `m ∈ [a, b)`; ties go to the
/// later run. `m_t` starts at `b` and steps back while the growth paid for
/// the last kept term exceeds the growth paid for the one before it. With no qualifying run
/// `m_t` is the index of smallest growth and the result is low confidence.
///
/// Known-energy mode returns `m_t = max{m : M_m ≤ K}` and no plateau.
pub fn detect_plateau(m: &[f64], policy: &PlateauPolicy) -> Result<PlateauDetection> {
    policy.validate()?;
    if m.is_empty() {
        return Err(Error::Input("no partial energies".into()));
    }
    if let PlateauMode::KnownEnergy { known_k } = policy.mode {
        return Ok(match m.iter().rposition(|&e| e <= known_k) {
            Some(m0) => PlateauDetection {
                plateau: None,
                m_t: m0,
                low_confidence: false,
            },
            None => PlateauDetection {
                plateau: None,
                m_t: 0,
                low_confidence: true,
            },
        });
    }
    let growth = relative_growth(m, policy.floor);
    let Some((a, b)) = longest_run(&growth, policy.theta, policy.min_run) else {
        let m_t = growth
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map_or(0, |(i, _)| i);
        return Ok(PlateauDetection {
            plateau: None,
            m_t,
            low_confidence: true,
        });
    };
    // keeping c_m costs growth[m - 1]; shed terms while that cost is rising
    let mut m_t = b;
    while m_t >= a + 2 && growth[m_t - 1] > growth[m_t - 2] {
        m_t -= 1;
    }
    let base = m[a].max(policy.floor);
    let rise = (m[m_t] - m[a]) / base;
    Ok(PlateauDetection {
        plateau: Some((a, b)),
        m_t,
        low_confidence: rise > policy.max_rise,
    })
}

fn longest_run(growth: &[f64], theta: f64, min_run: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    let consider = |a: usize, b: usize, best: &mut Option<(usize, usize)>| {
        if b - a >= min_run && best.is_none_or(|(x, y)| b - a >= y - x) {
            *best = Some((a, b));
        }
    };
    for (i, &g) in growth.iter().enumerate() {
        match (g <= theta, start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                consider(a, i, &mut best);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        consider(a, growth.len(), &mut best);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_prefix_then_jump() {
        let m = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 100.0];
        let d = detect_plateau(&m, &PlateauPolicy::default()).unwrap();
        assert_eq!(d.plateau, Some((0, 5)));
        assert_eq!(d.m_t, 5);
        assert!(!d.low_confidence);
    }

    #[test]
    fn ties_prefer_later_run() {
        let mut m = vec![1.0; 7];
        m.extend(vec![10.0; 7]);
        let d = detect_plateau(&m, &PlateauPolicy::default()).unwrap();
        assert_eq!(d.plateau, Some((7, 13)));
    }

    #[test]
    fn short_runs_do_not_qualify() {
        let m: Vec<f64> = (0..20).map(|i| 2f64.powi(i)).collect();
        let d = detect_plateau(&m, &PlateauPolicy::default()).unwrap();
        assert_eq!(d.plateau, None);
        assert!(d.low_confidence);
    }

    #[test]
    fn truncation_walks_back_to_local_minimum() {
        // growth: 0, 0, 0.001, 0.002, 0.004, then large
        let mut m = vec![1.0, 1.0, 1.0];
        for g in [0.001, 0.002, 0.004, 0.5] {
            let last = *m.last().unwrap();
            m.push(last * (1.0 + g));
        }
        let policy = PlateauPolicy {
            min_run: 3,
            ..Default::default()
        };
        let d = detect_plateau(&m, &policy).unwrap();
        assert_eq!(d.plateau, Some((0, 5)));
        assert_eq!(d.m_t, 2);
    }

    #[test]
    fn known_energy_mode() {
        let m = [0.5, 0.9, 1.1, 1.19, 1.21, 2.0];
        let d = detect_plateau(&m, &PlateauPolicy::known_energy(1.2)).unwrap();
        assert_eq!(d.m_t, 3);
        assert_eq!(d.plateau, None);
        let d = detect_plateau(&m, &PlateauPolicy::known_energy(0.1)).unwrap();
        assert!(d.low_confidence);
    }

    #[test]
    fn invalid_policies_name_the_field() {
        let bad = PlateauPolicy {
            theta: 0.0,
            ..Default::default()
        };
        assert!(bad
            .validate()
            .unwrap_err()
            .to_string()
            .contains("plateau_theta"));
        let bad = PlateauPolicy {
            min_run: 1,
            ..Default::default()
        };
        assert!(bad
            .validate()
            .unwrap_err()
            .to_string()
            .contains("plateau_window"));
        assert!(PlateauPolicy::known_energy(-1.0).validate().is_err());
    }

    #[test]
    fn zero_energies_use_the_floor() {
        let d = detect_plateau(&[0.0; 10], &PlateauPolicy::default()).unwrap();
        assert_eq!(d.plateau, Some((0, 9)));
    }
}
