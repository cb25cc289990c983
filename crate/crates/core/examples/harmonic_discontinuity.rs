//! The harmonic series `g_k = 1/(k+1)` has `J(x) = 1/x`, which jumps at
//! `x = 1`. The energies never settle into a clean plateau and the
//! reconstruction rings near the jump.

use cutjump::corpus::{builtin_spec, ProblemId};
use cutjump::reconstruct::{relative_growth, run_reconstruction, ReconstructOptions};

fn main() -> cutjump::Result<()> {
    let options = ReconstructOptions::default();
    for id in [ProblemId::NormalizedRational, ProblemId::Harmonic] {
        let spec = builtin_spec(id);
        let r = run_reconstruction(&spec.coefficients(60), spec.truth(), &options)?;
        let growth = relative_growth(&r.m, options.plateau.floor);
        let tail: Vec<String> = growth[40..48].iter().map(|g| format!("{g:.1e}")).collect();
        println!(
            "{:<20} continuous={:<5} low_confidence={:<5} rel L2 {:.3e}",
            spec.name(),
            spec.truth().is_some_and(|t| t.is_continuous()),
            r.low_confidence,
            r.errors.and_then(|e| e.l2_rel).unwrap_or(f64::NAN),
        );
        println!("    growth of M over m = 40..47: {}", tail.join(" "));
    }
    Ok(())
}
