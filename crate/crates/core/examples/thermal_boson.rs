//! Thermal reconstruction of `J(v) = 6(e^-2v - e^-3v)` from `g_1..g_60`,
//! the reflected negative branch, and the interpolant on the line
//! `Re λ = 1/2`.

use num_complex::Complex64;

use cutjump::corpus::{builtin_spec, ProblemId};
use cutjump::specfun::Precision;
use cutjump::thermal::{
    gtilde_line_expansion, line_coefficients, run_thermal, ThermalExpansion, ThermalOptions,
    ThermalProblem,
};

fn main() -> cutjump::Result<()> {
    let spec = builtin_spec(ProblemId::ThermalBosonDemo);
    let problem = ThermalProblem::new(spec.coefficients(60), spec.truth().copied())?;
    let report = run_thermal(&problem, &ThermalOptions::default())?;
    let w = report.weighted_errors.expect("truth is known");
    println!(
        "plateau {:?}, m_t {}, weighted rel L2 {:.3e}, sum c_n^2 = {:.6} (norm^2 {:.6})",
        report.plateau,
        report.m_t,
        w.l2w_rel.unwrap_or(f64::NAN),
        report.parseval_energy,
        36.0 * (1.0 / 5.0 - 1.0 / 3.0 + 1.0 / 7.0),
    );

    let e = ThermalExpansion::truncated(&report.frak_c, report.m_t)?;
    for v in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        println!(
            "  v = {v:>4}  J_rec {:>8.5}  J {:>8.5}  J_rec(-v) {:>8.5}",
            e.eval(v),
            problem.truth.unwrap().eval(v),
            e.eval_negative(-v)
        );
    }

    let d = line_coefficients(&problem, report.m_t, Precision::new(report.precision_used)?)?;
    for (nu, val) in gtilde_line_expansion(&d, report.m_t, &[0.0, 1.0, 3.0])? {
        let l = Complex64::new(0.5, nu);
        println!(
            "  nu = {nu}: |expansion| {:.6}  |closed form| {:.6}",
            val.norm(),
            (6.0 / ((l + 2.0) * (l + 3.0))).norm()
        );
    }
    Ok(())
}
