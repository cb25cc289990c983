//! Hausdorff diagnostics on a few sequences: exact Bernstein weights, the
//! Lp statistic and its trend, and the auxiliary `(k+1) g_k` sequence of a
//! corpus problem.
//!
//! ```text
//! cargo run --example moments_diagnostics
//! ```

use cutjump::corpus::{builtin_spec, ProblemId};
use cutjump::moments::{
    bernstein_weights, check_f_sequence, hausdorff_check, FMode, MomentSequence, DEFAULT_P,
};

fn main() -> cutjump::Result<()> {
    let row = bernstein_weights(&MomentSequence::harmonic(), 6)?;
    println!("harmonic, n = 6: {:?}", row.weights.to_f64());

    for mu in [
        MomentSequence::harmonic(),
        MomentSequence::constant(),
        MomentSequence::alternating(),
    ] {
        let r = hausdorff_check(&mu, 40, DEFAULT_P)?;
        println!(
            "{:<12} positive={:<5} min weight {:>10.3e}  S_n max {:.3e}  trend {:?}",
            r.label, r.positivity_ok, r.min_weight, r.trend.max, r.trend.verdict
        );
    }

    let g = builtin_spec(ProblemId::NormalizedRational).coefficients(60);
    let f = check_f_sequence(&g, FMode::KPlus1, 40, DEFAULT_P)?;
    println!(
        "{}: positive={} decay constant {:.4} bound holds={}",
        f.label, f.positivity_ok, f.decay_constant, f.decay_bound_ok
    );
    Ok(())
}
