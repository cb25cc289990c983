//! Transform-side checks of a reconstruction: Mellin moments, the
//! probability-density integral, the Cauchy integral against the series,
//! and the Plancherel identity for the closed-form interpolant.

use num_complex::Complex64;

use cutjump::corpus::{builtin_spec, gtilde_eval, ProblemId};
use cutjump::reconstruct::{
    cauchy_check, density_check, mellin_of_reconstruction, plancherel_sides, run_reconstruction,
    series_sum, JumpExpansion, ReconstructOptions,
};
use cutjump::specfun::QuadratureOptions;

fn main() -> cutjump::Result<()> {
    let spec = builtin_spec(ProblemId::NormalizedRational);
    let g = spec.coefficients(60);
    let r = run_reconstruction(&g, spec.truth(), &ReconstructOptions::default())?;
    let e = JumpExpansion::truncated(&r.c, r.m_t)?;
    let f = |x: f64| e.eval(x);
    let opts = QuadratureOptions::new(1e-11, 1e-11);

    for k in [0u64, 1, 5, 10] {
        let m = mellin_of_reconstruction(&f, k as f64, &opts)?;
        println!("Mellin at {k:>2}: {m:.6}  g_k {:.6}", g.get(k).unwrap());
    }
    println!("density integral {:.6}", density_check(&f, &opts)?.integral);
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, 0.0),
        Complex64::new(0.0, 0.5),
    ] {
        let lhs = cauchy_check(&f, z, &opts)?;
        println!("Cauchy at {z}: {lhs:.6}  series {:.6}", series_sum(&g, z));
    }

    let truth = *spec.truth().unwrap();
    let (lhs, rhs) = plancherel_sides(
        &|l| gtilde_eval(&spec, l),
        &move |x| truth.eval(x),
        -0.5,
        &opts,
    )?;
    println!("Plancherel at -1/2: {lhs:.10} vs {rhs:.10}");
    Ok(())
}
