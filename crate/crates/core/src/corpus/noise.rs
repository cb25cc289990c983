use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CoefficientSet;
use crate::error::{Error, Result};

/// Perturb every coefficient by an independent draw, uniform on `[-ε, ε]`.
///
/// The stream is `ChaCha8Rng::seed_from_u64(seed)`, one `f64` per
/// coefficient in ascending index order, mapped as `ε (2u - 1)`.
pub fn add_noise(clean: &CoefficientSet, epsilon: f64, seed: u64) -> Result<CoefficientSet> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::config(
            "epsilon",
            format!("must be finite and >= 0, got {epsilon}"),
        ));
    }
    let mut out = clean.clone();
    out.epsilon = epsilon;
    out.seed = Some(seed);
    if epsilon == 0.0 {
        return Ok(out);
    }
    out.exact = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for value in &mut out.values {
        let u: f64 = rng.random();
        *value = perturb(*value, epsilon * (2.0 * u - 1.0), epsilon);
    }
    Ok(out)
}

// Rounding of `value + delta` can land one ulp outside the band; pull it back.
fn perturb(value: f64, delta: f64, epsilon: f64) -> f64 {
    let mut out = value + delta;
    while (out - value).abs() > epsilon {
        out = if out > value {
            out.next_down()
        } else {
            out.next_up()
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{builtin_spec, ProblemId};

    #[test]
    fn zero_noise_is_identity() {
        let clean = builtin_spec(ProblemId::NormalizedRational).coefficients(20);
        let out = add_noise(&clean, 0.0, 7).unwrap();
        assert_eq!(out.values, clean.values);
        assert!(out.exact.is_some());
    }

    #[test]
    fn bounded_and_deterministic() {
        let clean = builtin_spec(ProblemId::NormalizedRational).coefficients(60);
        let a = add_noise(&clean, 1e-6, 42).unwrap();
        let b = add_noise(&clean, 1e-6, 42).unwrap();
        let bits = |s: &CoefficientSet| s.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert!(a.exact.is_none());
        assert_eq!(a.seed, Some(42));
        for (x, y) in a.values.iter().zip(&clean.values) {
            assert!((x - y).abs() <= 1e-6);
        }
        assert_ne!(a.values, add_noise(&clean, 1e-6, 43).unwrap().values);
    }

    #[test]
    fn negative_epsilon_rejected() {
        let clean = builtin_spec(ProblemId::Harmonic).coefficients(3);
        assert!(add_noise(&clean, -1e-3, 0).is_err());
        assert!(add_noise(&clean, f64::NAN, 0).is_err());
    }

    #[test]
    fn tiny_band_on_large_values_stays_inside() {
        assert!((perturb(1.0, 1e-17, 1e-17) - 1.0).abs() <= 1e-17);
        assert!((perturb(1.0, -3e-17, 3e-17) - 1.0).abs() <= 3e-17);
    }
}
