//! Command-line front end: `moments`, `reconstruct`, `thermal`, `sweep`.
//!
//! Exit codes: 0 success, 1 parse/IO/config error, 2 failed positivity
//! under `--expect-positive`, 3 synthesis did not stabilize (the report is
//! still written).

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    read_json, Emit, PlateauModeArg, RunConfig, SequenceArg, SweepConfig, MAX_COEFFS, MAX_N_MAX,
};

use crate::corpus::{
    add_noise, builtin, load_coefficients_from, CoefficientSet, ProblemSpec, Variable,
};
use crate::error::{Error, Result};
use crate::moments::{
    check_f_sequence, hausdorff_check, FMode, HausdorffReport, MomentSequence, DEFAULT_P, THERMAL_P,
};
use crate::reconstruct::{
    run_reconstruction, samples_csv, ReconstructOptions, ReconstructionReport, SCHEMA_VERSION,
};
use crate::thermal::{
    run_thermal, thermal_samples_csv, ThermalOptions, ThermalProblem, ThermalReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_POSITIVITY: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "CUTJUMP_THREADS";

const MOMENTS_N_MAX: usize = 40;
const RECONSTRUCT_N_MAX: usize = 200;

#[derive(Debug, Parser)]
#[command(
    name = "cutjump",
    version,
    about = "Jump-function reconstruction from series coefficients"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hausdorff diagnostics (Bernstein weights, Lp statistic) of a sequence.
    Moments(MomentsArgs),
    /// Reconstruct the jump function across the cut.
    Reconstruct(RunArgs),
    /// Boson-sector thermal reconstruction from coefficients g_1..g_N.
    Thermal(RunArgs),
    /// Grid of reconstructions over coefficient counts and noise levels.
    Sweep(SweepArgs),
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Builtin problem name.
    #[arg(long)]
    pub problem: Option<String>,
    /// Coefficient file (`index,value` lines).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Highest coefficient index N taken from a builtin problem.
    #[arg(long)]
    pub n_coeffs: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of expansion coefficients (or Bernstein rows for `moments`).
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub plateau_theta: Option<f64>,
    #[arg(long)]
    pub plateau_window: Option<usize>,
    #[arg(long, value_enum)]
    pub plateau_mode: Option<PlateauModeArg>,
    /// Known energy ‖J‖² for `--plateau-mode known-energy`.
    #[arg(long, allow_hyphen_values = true)]
    pub known_k: Option<f64>,
    #[arg(long)]
    pub precision_bits: Option<u32>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub emit: Option<Emit>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Lp exponent (default 2.001, or 2 for thermal problems).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, value_enum)]
    pub sequence: Option<SequenceArg>,
    /// Exit with code 2 when a Bernstein weight is negative.
    #[arg(long)]
    pub expect_positive: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<u64>>,
    #[arg(long)]
    pub repeats: Option<u32>,
    #[arg(long)]
    pub seed_base: Option<u64>,
}

impl RunArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = &self.$flag { cfg.$field = v.clone().into(); })*
            };
        }
        set!(
            problem => problem,
            input => input,
            n_coeffs => n_coeffs,
            epsilon => epsilon,
            seed => seed,
            n_max => n_max,
            plateau_theta => plateau_theta,
            plateau_window => plateau_window,
            plateau_mode => plateau_mode,
            known_k => known_k,
            precision_bits => precision_bits,
            out => output_dir,
            emit => emit,
        );
    }

    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => read_json(path)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg);
        Ok(cfg)
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match thread_pool().and_then(|pool| pool.install(|| dispatch(cli.command))) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            Error::config(
                THREADS_ENV,
                format!("expected a positive integer, got `{raw}`"),
            )
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::config(THREADS_ENV, e.to_string()))
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Moments(args) => {
            let mut cfg = args.run.load()?;
            if let Some(p) = args.p {
                cfg.p = Some(p);
            }
            if let Some(s) = args.sequence {
                cfg.sequence = s;
            }
            cfg.expect_positive |= args.expect_positive;
            cmd_moments(&cfg)
        }
        Command::Reconstruct(args) => cmd_reconstruct(&args.load()?),
        Command::Thermal(args) => cmd_thermal(&args.load()?),
        Command::Sweep(args) => {
            let mut cfg = match &args.run.config {
                Some(path) => read_json(path)?,
                None => SweepConfig::default(),
            };
            args.run.apply(&mut cfg.base);
            if let Some(e) = &args.epsilons {
                cfg.epsilons = e.clone();
            }
            if let Some(n) = &args.ns {
                cfg.ns = n.clone();
            }
            if let Some(r) = args.repeats {
                cfg.repeats = r;
            }
            if let Some(s) = args.seed_base {
                cfg.seed_base = s;
            }
            cmd_sweep(&cfg)
        }
    }
}

fn problem_spec(cfg: &RunConfig) -> Result<Option<ProblemSpec>> {
    cfg.problem.as_deref().map(builtin).transpose()
}

/// Coefficients per the config: builtin prefix or file, then noise.
fn load_set(
    cfg: &RunConfig,
    spec: Option<&ProblemSpec>,
    first_index: u64,
) -> Result<CoefficientSet> {
    let clean = match (spec, &cfg.input) {
        (Some(spec), _) => spec.coefficients(cfg.n_coeffs),
        (None, Some(path)) => load_coefficients_from(path, first_index)?,
        (None, None) => {
            return Err(Error::config(
                "problem",
                "one of problem or input is required",
            ))
        }
    };
    if cfg.epsilon > 0.0 {
        add_noise(&clean, cfg.epsilon, cfg.seed)
    } else {
        Ok(clean)
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(dir, name, &text)
}

fn is_thermal(spec: Option<&ProblemSpec>) -> bool {
    spec.and_then(|s| s.truth())
        .is_some_and(|t| t.variable == Variable::V)
        || spec.is_some_and(|s| s.first_index == 1)
}

#[derive(Debug, Serialize)]
pub struct MomentsOutput {
    pub schema_version: u32,
    pub source: String,
    pub sequence: SequenceArg,
    #[serde(flatten)]
    pub report: HausdorffReport,
}

fn cmd_moments(cfg: &RunConfig) -> Result<i32> {
    cfg.validate()?;
    let spec = problem_spec(cfg)?;
    let thermal = is_thermal(spec.as_ref());
    let set = load_set(cfg, spec.as_ref(), 0)?;
    let n_max = cfg.n_max.unwrap_or(MOMENTS_N_MAX);
    let p = cfg.p.unwrap_or(if thermal { THERMAL_P } else { DEFAULT_P });
    let report = match cfg.sequence {
        SequenceArg::Coefficients => {
            if set.is_empty() {
                return Err(Error::Input("no coefficients to check".into()));
            }
            hausdorff_check(&MomentSequence::from_coefficients(&set), n_max, p)?
        }
        SequenceArg::FKPlus1 => check_f_sequence(&set, FMode::KPlus1, n_max, p)?,
        SequenceArg::FK => check_f_sequence(&set, FMode::K, n_max, p)?,
    };
    let out = MomentsOutput {
        schema_version: SCHEMA_VERSION,
        source: set.source.clone(),
        sequence: cfg.sequence,
        report,
    };
    let path = write_json(&cfg.output_dir, "moments.json", &out)?;
    let r = &out.report;
    println!(
        "{}: rows 0..={} positivity {} (min weight {:e}{}), Lp statistic (p = {}) max {:.6e} last {:.6e} trend {:?}",
        r.label,
        r.n_max,
        if r.positivity_ok { "ok" } else { "FAILED" },
        r.min_weight,
        r.first_negative
            .map(|(n, k)| format!(", first negative at n={n} k={k}"))
            .unwrap_or_default(),
        r.p,
        r.trend.max,
        r.trend.last,
        r.trend.verdict,
    );
    println!("wrote {}", path.display());
    Ok(if cfg.expect_positive && !r.positivity_ok {
        EXIT_POSITIVITY
    } else {
        EXIT_OK
    })
}

fn reconstruct_options(cfg: &RunConfig) -> Result<ReconstructOptions> {
    Ok(ReconstructOptions {
        n_max: cfg.n_max.unwrap_or(RECONSTRUCT_N_MAX),
        precision0: cfg.precision_bits,
        max_doublings: cfg.max_doublings,
        plateau: cfg.plateau()?,
        ..Default::default()
    })
}

fn thermal_options(cfg: &RunConfig) -> Result<ThermalOptions> {
    Ok(ThermalOptions {
        n_max: cfg.n_max.unwrap_or(RECONSTRUCT_N_MAX),
        precision0: cfg.precision_bits,
        max_doublings: cfg.max_doublings,
        plateau: cfg.plateau()?,
        ..Default::default()
    })
}

/// Run the power-series pipeline for a validated config without writing
/// anything.
pub fn reconstruct_report(cfg: &RunConfig) -> Result<ReconstructionReport> {
    cfg.validate()?;
    let spec = problem_spec(cfg)?;
    if is_thermal(spec.as_ref()) {
        return Err(Error::config(
            "problem",
            "thermal problems use the `thermal` command",
        ));
    }
    let set = load_set(cfg, spec.as_ref(), 0)?;
    run_reconstruction(
        &set,
        spec.as_ref().and_then(|s| s.truth()),
        &reconstruct_options(cfg)?,
    )
}

/// Run the thermal pipeline for a validated config without writing anything.
pub fn thermal_report(cfg: &RunConfig) -> Result<ThermalReport> {
    cfg.validate()?;
    let spec = problem_spec(cfg)?;
    if spec.is_some() && !is_thermal(spec.as_ref()) {
        return Err(Error::config(
            "problem",
            "not a thermal problem; use `reconstruct`",
        ));
    }
    let set = load_set(cfg, spec.as_ref(), 1)?;
    let problem = ThermalProblem::new(set, spec.as_ref().and_then(|s| s.truth()).copied())?;
    run_thermal(&problem, &thermal_options(cfg)?)
}

fn fmt_plateau(p: Option<(usize, usize)>) -> String {
    p.map(|(a, b)| format!("[{a}, {b}]"))
        .unwrap_or_else(|| "none".into())
}

fn cmd_reconstruct(cfg: &RunConfig) -> Result<i32> {
    let report = reconstruct_report(cfg)?;
    if cfg.emit.json() {
        println!(
            "wrote {}",
            write_json(&cfg.output_dir, "reconstruct.json", &report)?.display()
        );
    }
    if cfg.emit.csv() {
        let csv = samples_csv(&report.samples, "x");
        println!(
            "wrote {}",
            write_file(&cfg.output_dir, "reconstruct.csv", &csv)?.display()
        );
    }
    let mut line = format!(
        "{}: N = {}, plateau {}, m_t = {}{}, precision {} bits",
        report.source,
        report.n_coeffs,
        fmt_plateau(report.plateau),
        report.m_t,
        if report.low_confidence {
            " (low confidence)"
        } else {
            ""
        },
        report.precision_used,
    );
    if let Some(rel) = report.errors.and_then(|e| e.l2_rel) {
        let _ = write!(line, ", relative L2 error {rel:.4e}");
    }
    println!("{line}");
    Ok(stability_code(report.stabilized))
}

fn cmd_thermal(cfg: &RunConfig) -> Result<i32> {
    let report = thermal_report(cfg)?;
    if cfg.emit.json() {
        println!(
            "wrote {}",
            write_json(&cfg.output_dir, "thermal.json", &report)?.display()
        );
    }
    if cfg.emit.csv() {
        let csv = thermal_samples_csv(&report.samples);
        println!(
            "wrote {}",
            write_file(&cfg.output_dir, "thermal.csv", &csv)?.display()
        );
    }
    let mut line = format!(
        "{}: N = {}, plateau {}, m_t = {}{}, precision {} bits",
        report.source,
        report.n_coeffs,
        fmt_plateau(report.plateau),
        report.m_t,
        if report.low_confidence {
            " (low confidence)"
        } else {
            ""
        },
        report.precision_used,
    );
    if let Some(rel) = report.weighted_errors.and_then(|e| e.l2w_rel) {
        let _ = write!(line, ", weighted relative L2 error {rel:.4e}");
    }
    println!("{line}");
    Ok(stability_code(report.stabilized))
}

fn stability_code(stabilized: bool) -> i32 {
    if stabilized {
        EXIT_OK
    } else {
        eprintln!("warning: coefficient synthesis did not stabilize within the precision budget");
        EXIT_UNSTABLE
    }
}

/// One sweep cell repeat.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub epsilon: f64,
    pub repeat: u32,
    pub seed: u64,
    pub plateau_start: Option<usize>,
    pub plateau_end: Option<usize>,
    pub m_t: Option<usize>,
    pub low_confidence: Option<bool>,
    pub l2_rel: Option<f64>,
    pub precision_used: Option<u32>,
    pub stabilized: Option<bool>,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: &str =
    "N,epsilon,repeat,seed,plateau_start,plateau_end,m_t,low_confidence,l2_rel,precision_used,stabilized,error";

fn sweep_cell(cfg: &SweepConfig, n: u64, epsilon: f64, repeat: u32, seed: u64) -> SweepRow {
    let run = RunConfig {
        n_coeffs: n,
        epsilon,
        seed,
        ..cfg.base.clone()
    };
    let mut row = SweepRow {
        n,
        epsilon,
        repeat,
        seed,
        plateau_start: None,
        plateau_end: None,
        m_t: None,
        low_confidence: None,
        l2_rel: None,
        precision_used: None,
        stabilized: None,
        error: None,
    };
    let thermal = problem_spec(&run)
        .map(|s| is_thermal(s.as_ref()))
        .unwrap_or(false);
    let outcome = if thermal {
        thermal_report(&run).map(|r| {
            (
                r.plateau,
                r.m_t,
                r.low_confidence,
                r.weighted_errors.and_then(|e| e.l2w_rel),
                r.precision_used,
                r.stabilized,
            )
        })
    } else {
        reconstruct_report(&run).map(|r| {
            (
                r.plateau,
                r.m_t,
                r.low_confidence,
                r.errors.and_then(|e| e.l2_rel),
                r.precision_used,
                r.stabilized,
            )
        })
    };
    match outcome {
        Ok((plateau, m_t, low, rel, prec, stab)) => {
            row.plateau_start = plateau.map(|p| p.0);
            row.plateau_end = plateau.map(|p| p.1);
            row.m_t = Some(m_t);
            row.low_confidence = Some(low);
            row.l2_rel = rel;
            row.precision_used = Some(prec);
            row.stabilized = Some(stab);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// All rows of a sweep, sorted by N, then ε, then repeat. Cells run in
/// parallel on the current pool.
pub fn sweep_rows(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for (i_n, &n) in cfg.ns.iter().enumerate() {
        for (i_e, &eps) in cfg.epsilons.iter().enumerate() {
            let cell = i_n * cfg.epsilons.len() + i_e;
            for r in 0..cfg.repeats {
                jobs.push((n, eps, r, cfg.seed(cell, r)));
            }
        }
    }
    let mut rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(n, eps, r, seed)| sweep_cell(cfg, n, eps, r, seed))
        .collect();
    rows.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.epsilon.total_cmp(&b.epsilon))
            .then(a.repeat.cmp(&b.repeat))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    fn opt<T: std::fmt::Debug>(v: &Option<T>) -> String {
        v.as_ref().map(|x| format!("{x:?}")).unwrap_or_default()
    }
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let error = r
            .error
            .as_deref()
            .map(|e| format!("\"{}\"", e.replace('"', "\"\"")))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:?},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.epsilon,
            r.repeat,
            r.seed,
            opt(&r.plateau_start),
            opt(&r.plateau_end),
            opt(&r.m_t),
            opt(&r.low_confidence),
            opt(&r.l2_rel),
            opt(&r.precision_used),
            opt(&r.stabilized),
            error,
        );
    }
    out
}

fn cmd_sweep(cfg: &SweepConfig) -> Result<i32> {
    let rows = sweep_rows(cfg)?;
    let dir = &cfg.base.output_dir;
    println!(
        "wrote {}",
        write_file(dir, "sweep.csv", &sweep_csv(&rows))?.display()
    );
    if cfg.base.emit.json() {
        println!("wrote {}", write_json(dir, "sweep.json", &rows)?.display());
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    println!("{} rows, {} failed", rows.len(), failed);
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "cell N={} epsilon={:e} repeat={}: {}",
            r.n,
            r.epsilon,
            r.repeat,
            r.error.as_deref().unwrap_or_default()
        );
    }
    Ok(if failed == rows.len() {
        EXIT_ERROR
    } else {
        EXIT_OK
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"problem":"harmonic","n_coeffs":10,"epsilon":1e-5}"#,
        )
        .unwrap();
        let args = RunArgs {
            config: Some(path),
            n_coeffs: Some(20),
            ..Default::default()
        };
        let cfg = args.load().unwrap();
        assert_eq!(cfg.n_coeffs, 20);
        assert_eq!(cfg.epsilon, 1e-5);
        assert_eq!(cfg.problem.as_deref(), Some("harmonic"));
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn sweep_rows_sorted_and_deterministic() {
        let cfg = SweepConfig {
            epsilons: vec![1e-4, 0.0],
            ns: vec![10, 5],
            repeats: 2,
            base: RunConfig {
                problem: Some("normalized_rational".into()),
                n_max: Some(60),
                ..Default::default()
            },
            ..Default::default()
        };
        let rows = sweep_rows(&cfg).unwrap();
        assert_eq!(rows.len(), 8);
        let keys: Vec<(u64, f64, u32)> = rows.iter().map(|r| (r.n, r.epsilon, r.repeat)).collect();
        assert_eq!(keys[0], (5, 0.0, 0));
        assert_eq!(keys[7], (10, 1e-4, 1));
        assert!(rows.iter().all(|r| r.error.is_none()));
        assert_eq!(sweep_csv(&rows), sweep_csv(&sweep_rows(&cfg).unwrap()));
    }

    #[test]
    fn thermal_problem_rejected_by_reconstruct() {
        let cfg = RunConfig {
            problem: Some("thermal_boson_demo".into()),
            ..Default::default()
        };
        assert!(reconstruct_report(&cfg).is_err());
        let cfg = RunConfig {
            problem: Some("harmonic".into()),
            ..Default::default()
        };
        assert!(thermal_report(&cfg).is_err());
    }
}
