//! Reconstruct `J(x) = 6(x^-2 - x^-3)` from the first 61 coefficients
//! `g_k = 6/((k+2)(k+3))`, clean and with uniform noise of width 1e-7.

use cutjump::corpus::{add_noise, builtin_spec, ProblemId};
use cutjump::reconstruct::{run_reconstruction, ReconstructOptions};

fn main() -> cutjump::Result<()> {
    let spec = builtin_spec(ProblemId::NormalizedRational);
    let clean = spec.coefficients(60);
    let options = ReconstructOptions::default();

    for (label, g) in [
        ("clean", clean.clone()),
        ("eps=1e-7", add_noise(&clean, 1e-7, 42)?),
    ] {
        let r = run_reconstruction(&g, spec.truth(), &options)?;
        let err = r.errors.and_then(|e| e.l2_rel).unwrap_or(f64::NAN);
        println!(
            "{label:<9} plateau {:?}  m_t {:>3}  M(m_t) {:.6}  rel L2 {:.3e}  ({} bits)",
            r.plateau, r.m_t, r.m[r.m_t], err, r.precision_used
        );
        for x in [0.5, 1.0, 1.5, 2.0, 5.0, 20.0] {
            let s = r
                .samples
                .iter()
                .min_by(|a, b| (a.x - x).abs().total_cmp(&(b.x - x).abs()))
                .unwrap();
            println!(
                "    x = {:>6.3}  J_rec {:>9.5}  J {:>9.5}",
                s.x,
                s.j_rec,
                s.j_true.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
