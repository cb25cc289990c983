//! Plateau end and error against the noise level, three seeds per level.
//! Same machinery as `cutjump sweep`.

use cutjump::cli::{sweep_csv, sweep_rows, RunConfig, SweepConfig};

fn main() -> cutjump::Result<()> {
    let cfg = SweepConfig {
        base: RunConfig {
            problem: Some("normalized_rational".into()),
            ..Default::default()
        },
        epsilons: vec![1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 0.0],
        ns: vec![60],
        repeats: 3,
        seed_base: 42,
    };
    print!("{}", sweep_csv(&sweep_rows(&cfg)?));
    Ok(())
}
