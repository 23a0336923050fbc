//! `chained-bell` command line.
//!
//! Every subcommand writes one table (CSV by default, JSON on request) whose
//! metadata carries the resolved configuration and the truncation actually
//! used. Exit codes: 0 ok, 1 verification failure, 2 invalid arguments,
//! 3 numerical or cap failure.

mod output;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chain::{bell_fixed_n, bell_sv, combine_weighted, make_chain, BellBreakdown};
use crate::error::{BellError, Result};
use crate::loss::{binomial_thin, LossSpec};
use crate::singlet::{joint_distribution, Angle};
use crate::sv::{lambda_sq, sv_mixture, truncation, SvSpec, DEFAULT_MASS_THRESHOLD};

pub use output::{Cell, Format, Table};
pub use verify::{run_verification, SuiteResult, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Threshold for the convergence re-run of truncated mixtures.
pub const GUARD_MASS_THRESHOLD: f64 = 0.999;
/// Bell-parameter shift above which a truncated run is flagged.
pub const GUARD_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "chained-bell",
    version,
    about = "Chained Bell tests on the four-mode squeezed vacuum"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint count distribution for a fixed-N singlet or the squeezed vacuum
    Dist(DistArgs),
    /// Bell parameter as a function of the number of settings L
    SweepSettings(SweepSettingsArgs),
    /// Bell parameter as a function of detector efficiency
    SweepEta(SweepEtaArgs),
    /// Bell parameter over a (gain, efficiency) grid at fixed L
    Heatmap(HeatmapArgs),
    /// Run the oracle, LHV, normalization and loss verification suites
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Photons per beam (fixed-N singlet mode)
    #[arg(long = "N", conflicts_with = "gamma")]
    pub photons: Option<usize>,
    /// Gain of the squeezed vacuum (mixture mode)
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TruncationArgs {
    /// Cumulative singlet weight required of the truncated mixture
    #[arg(long = "mass", default_value_t = DEFAULT_MASS_THRESHOLD)]
    pub mass: f64,
    /// Largest N allowed in the truncated mixture
    #[arg(long = "cap", default_value_t = 60)]
    pub cap: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Relative polarizer angle in radians, within [0, pi/2]
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepSettingsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Inclusive settings range a:b
    #[arg(long = "L-range", default_value = "2:100")]
    pub l_range: IntRange,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepEtaArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Settings per side, comma separated
    #[arg(long = "L", value_delimiter = ',', default_value = "2,4,6,8,10")]
    pub settings: Vec<usize>,
    /// Inclusive efficiency grid a:b:step
    #[arg(long = "eta-range", default_value = "0:1:0.01")]
    pub eta_range: FloatRange,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HeatmapArgs {
    #[arg(long = "L", default_value_t = 2)]
    pub settings: usize,
    /// Inclusive gain grid a:b:step
    #[arg(long = "gamma-range", default_value = "0.05:1.5:0.05")]
    pub gamma_range: FloatRange,
    /// Inclusive efficiency grid a:b:step
    #[arg(long = "eta-range", default_value = "0.5:1:0.01")]
    pub eta_range: FloatRange,
    #[command(flatten)]
    pub truncation: TruncationArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Largest N covered by the Fock-space oracle suite
    #[arg(long = "oracle-max-N", default_value_t = 8)]
    pub oracle_max_photons: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte-Carlo samples per loss configuration
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Random strategies for the polygon suite
    #[arg(long = "polygon-samples", default_value_t = 100_000)]
    pub polygon_samples: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

/// `a:b`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntRange {
    pub start: usize,
    pub end: usize,
}

impl IntRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected a:b, got {s:?}"))?;
        let start = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let end = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
        if start > end {
            return Err(format!("empty range {s:?}"));
        }
        Ok(IntRange { start, end })
    }
}

/// `a:b:step`, inclusive of `b` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloatRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl FloatRange {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                if (v - self.end).abs() < 1e-9 * self.step {
                    self.end
                } else {
                    v
                }
            })
            .collect()
    }
}

impl FromStr for FloatRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(format!("expected a:b:step, got {s:?}"));
        };
        let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let (start, end, step) = (parse(a)?, parse(b)?, parse(step)?);
        if !(start.is_finite() && end.is_finite() && step.is_finite()) {
            return Err(format!("non-finite range {s:?}"));
        }
        if step <= 0.0 || start > end {
            return Err(format!("empty range {s:?}"));
        }
        Ok(FloatRange { start, end, step })
    }
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error("i/o error: {0}")]
    Io(std::io::Error),
    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Bell(BellError::CapExceeded { .. }) => EXIT_NUMERICAL,
            CliError::Bell(_) => EXIT_INVALID,
            // an unwritable --out path
            CliError::Io(_) => EXIT_INVALID,
            CliError::VerificationFailed => EXIT_VERIFY_FAILED,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parses `args` (including the program name), runs the subcommand, and
/// returns the process exit code. Tables go to `stdout` unless `--out` is set.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write) -> std::result::Result<(), CliError> {
    let (table, output) = match command {
        Command::Dist(a) => (cmd_dist(a)?, &a.output),
        Command::SweepSettings(a) => (cmd_sweep_settings(a)?, &a.output),
        Command::SweepEta(a) => (cmd_sweep_eta(a)?, &a.output),
        Command::Heatmap(a) => (cmd_heatmap(a)?, &a.output),
        Command::Verify(a) => {
            let (table, passed) = cmd_verify(a)?;
            table.emit(a.output.format, a.output.out.as_deref(), stdout)?;
            return if passed {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            };
        }
    };
    table.emit(output.format, output.out.as_deref(), stdout)?;
    Ok(())
}

enum Source {
    Fixed(usize),
    Mixture(SvSpec),
}

fn resolve_source(source: &SourceArgs, trunc: &TruncationArgs) -> Result<Source> {
    match (source.photons, source.gamma) {
        (Some(n), None) => Ok(Source::Fixed(n)),
        (None, Some(g)) => Ok(Source::Mixture(sv_spec(g, trunc)?)),
        _ => Err(BellError::invalid(
            "exactly one of --N or --gamma is required",
        )),
    }
}

fn sv_spec(gamma: f64, trunc: &TruncationArgs) -> Result<SvSpec> {
    SvSpec::new(gamma)?
        .with_mass_threshold(trunc.mass)?
        .with_cap(trunc.cap)
}

fn guard_spec(spec: &SvSpec) -> Result<SvSpec> {
    spec.with_mass_threshold(GUARD_MASS_THRESHOLD)
}

fn config_meta(command: &str, args: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(map) = &mut v {
        map.insert("command".into(), json!(command));
    }
    v
}

/// Guard metadata from `(primary, guard)` Bell values; `None` guards mean the
/// guard threshold was unreachable under the cap.
fn guard_meta(pairs: &[(f64, Option<f64>)]) -> Value {
    if pairs.iter().any(|(_, g)| g.is_none()) {
        return json!({
            "mass_threshold": GUARD_MASS_THRESHOLD,
            "status": "unavailable: guard threshold exceeds the cap",
        });
    }
    let delta = pairs
        .iter()
        .map(|(b, g)| (b - g.unwrap()).abs())
        .fold(0.0, f64::max);
    json!({
        "mass_threshold": GUARD_MASS_THRESHOLD,
        "tolerance": GUARD_TOLERANCE,
        "max_abs_delta": delta,
        "flagged": delta > GUARD_TOLERANCE,
    })
}

fn optional_guard<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(BellError::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn cmd_dist(args: &DistArgs) -> Result<Table> {
    let theta = Angle::new(args.theta)?.check_relative()?;
    let loss = LossSpec::new(args.eta)?;
    let mut table = Table::new(vec!["n", "m", "p"]);
    table.meta("config", config_meta("dist", args));
    let dist = match resolve_source(&args.source, &args.truncation)? {
        Source::Fixed(n) => {
            table.meta("n_max", json!(n));
            binomial_thin(&joint_distribution(n, theta)?, loss)
        }
        Source::Mixture(spec) => {
            let (n_max, retained) = truncation(&spec)?;
            table.meta("n_max", json!(n_max));
            table.meta("truncation_mass", json!(retained));
            sv_mixture(theta, &spec, loss)?
        }
    };
    table.meta("mass", json!(dist.mass()));
    table.rows = dist
        .iter()
        .map(|(n, m, p)| vec![n.into(), m.into(), p.into()])
        .collect();
    Ok(table)
}

fn bell_row(l: usize, b: &BellBreakdown) -> Vec<Cell> {
    vec![l.into(), b.lhs.into(), b.rhs.into(), b.bell.into()]
}

pub fn cmd_sweep_settings(args: &SweepSettingsArgs) -> Result<Table> {
    let loss = LossSpec::new(args.eta)?;
    let settings = args.l_range.values();
    let chains = settings
        .iter()
        .map(|&l| make_chain(l))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(vec!["L", "lhs", "rhs", "bell"]);
    table.meta("config", config_meta("sweep-settings", args));
    match resolve_source(&args.source, &args.truncation)? {
        Source::Fixed(n) => {
            let results = chains
                .par_iter()
                .map(|c| bell_fixed_n(n, c, loss))
                .collect::<Result<Vec<_>>>()?;
            table.meta("n_max", json!(n));
            table.rows = settings
                .iter()
                .zip(&results)
                .map(|(&l, b)| bell_row(l, b))
                .collect();
        }
        Source::Mixture(spec) => {
            let (n_max, retained) = truncation(&spec)?;
            let results = chains
                .par_iter()
                .map(|c| bell_sv(c, &spec, loss))
                .collect::<Result<Vec<_>>>()?;
            let guard = optional_guard(guard_spec(&spec).and_then(|g| {
                chains
                    .par_iter()
                    .map(|c| bell_sv(c, &g, loss))
                    .collect::<Result<Vec<_>>>()
            }))?;
            let pairs: Vec<(f64, Option<f64>)> = results
                .iter()
                .enumerate()
                .map(|(i, b)| (b.bell, guard.as_ref().map(|g| g[i].bell)))
                .collect();
            table.meta("n_max", json!(n_max));
            table.meta("truncation_mass", json!(retained));
            table.meta("convergence_guard", guard_meta(&pairs));
            table.rows = settings
                .iter()
                .zip(&results)
                .map(|(&l, b)| bell_row(l, b))
                .collect();
        }
    }
    Ok(table)
}

pub fn cmd_sweep_eta(args: &SweepEtaArgs) -> Result<Table> {
    let etas = args.eta_range.values();
    let losses = etas
        .iter()
        .map(|&e| LossSpec::new(e))
        .collect::<Result<Vec<_>>>()?;
    if args.settings.is_empty() {
        return Err(BellError::invalid("no settings given"));
    }
    let mut settings = args.settings.clone();
    settings.sort_unstable();
    settings.dedup();
    let chains = settings
        .iter()
        .map(|&l| make_chain(l))
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<(usize, usize)> = (0..chains.len())
        .flat_map(|i| (0..losses.len()).map(move |j| (i, j)))
        .collect();

    let mut table = Table::new(vec!["L", "eta", "bell"]);
    table.meta("config", config_meta("sweep-eta", args));
    let source = resolve_source(&args.source, &args.truncation)?;
    let evaluate = |spec: Option<&SvSpec>| -> Result<Vec<f64>> {
        grid.par_iter()
            .map(|&(i, j)| match (&source, spec) {
                (Source::Fixed(n), _) => bell_fixed_n(*n, &chains[i], losses[j]).map(|b| b.bell),
                (Source::Mixture(_), Some(s)) => bell_sv(&chains[i], s, losses[j]).map(|b| b.bell),
                (Source::Mixture(_), None) => unreachable!(),
            })
            .collect()
    };
    let bells = match &source {
        Source::Fixed(n) => {
            table.meta("n_max", json!(n));
            evaluate(None)?
        }
        Source::Mixture(spec) => {
            let (n_max, retained) = truncation(spec)?;
            let bells = evaluate(Some(spec))?;
            let guard = optional_guard(guard_spec(spec).and_then(|g| evaluate(Some(&g))))?;
            let pairs: Vec<(f64, Option<f64>)> = bells
                .iter()
                .enumerate()
                .map(|(k, &b)| (b, guard.as_ref().map(|g| g[k])))
                .collect();
            table.meta("n_max", json!(n_max));
            table.meta("truncation_mass", json!(retained));
            table.meta("convergence_guard", guard_meta(&pairs));
            bells
        }
    };
    table.rows = grid
        .iter()
        .zip(&bells)
        .map(|(&(i, j), &b)| vec![settings[i].into(), etas[j].into(), b.into()])
        .collect();
    Ok(table)
}

pub fn cmd_heatmap(args: &HeatmapArgs) -> Result<Table> {
    let chain = make_chain(args.settings)?;
    let gammas = args.gamma_range.values();
    let etas = args.eta_range.values();
    let losses = etas
        .iter()
        .map(|&e| LossSpec::new(e))
        .collect::<Result<Vec<_>>>()?;
    let specs = gammas
        .iter()
        .map(|&g| sv_spec(g, &args.truncation))
        .collect::<Result<Vec<_>>>()?;
    let cuts = specs.iter().map(truncation).collect::<Result<Vec<_>>>()?;
    let guard_cuts = specs
        .iter()
        .map(|s| optional_guard(guard_spec(s).and_then(|g| truncation(&g))))
        .collect::<Result<Vec<_>>>()?;
    let deepest = cuts
        .iter()
        .map(|c| c.0)
        .chain(guard_cuts.iter().flatten().map(|c| c.0))
        .max()
        .unwrap_or(0);

    // Per-N components depend on eta only; the gain enters through weights.
    let components = losses
        .par_iter()
        .map(|&loss| {
            (0..=deepest)
                .map(|n| bell_fixed_n(n, &chain, loss))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(vec!["gamma", "eta", "bell"]);
    table.meta("config", config_meta("heatmap", args));
    let mut pairs = Vec::new();
    for (gi, &gamma) in gammas.iter().enumerate() {
        let weights: Vec<f64> = (0..=cuts[gi].0).map(|n| lambda_sq(n, gamma)).collect();
        let guard_weights: Option<Vec<f64>> =
            guard_cuts[gi].map(|(n_max, _)| (0..=n_max).map(|n| lambda_sq(n, gamma)).collect());
        for (ei, &eta) in etas.iter().enumerate() {
            let comps = &components[ei];
            let b = combine_weighted(&weights, &comps[..weights.len()], &chain, losses[ei]);
            let g = guard_weights
                .as_ref()
                .map(|w| combine_weighted(w, &comps[..w.len()], &chain, losses[ei]).bell);
            pairs.push((b.bell, g));
            table
                .rows
                .push(vec![gamma.into(), eta.into(), b.bell.into()]);
        }
    }
    let trunc: Vec<Value> = gammas
        .iter()
        .zip(&cuts)
        .map(|(g, (n_max, mass))| json!({"gamma": g, "n_max": n_max, "mass": mass}))
        .collect();
    table.meta("truncation", Value::Array(trunc));
    table.meta("convergence_guard", guard_meta(&pairs));
    Ok(table)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(Table, bool)> {
    let config = VerifyConfig {
        oracle_max_photons: args.oracle_max_photons,
        seed: args.seed,
        samples: args.samples,
        polygon_samples: args.polygon_samples,
    };
    let results = run_verification(&config)?;
    let passed = results.iter().all(|r| r.passed);
    let mut table = Table::new(vec!["suite", "passed", "checks", "max_error", "tolerance"]);
    table.meta("config", config_meta("verify", args));
    table.meta("passed", json!(passed));
    table.rows = results
        .iter()
        .map(|r| {
            vec![
                r.suite.into(),
                r.passed.into(),
                Cell::Int(r.checks),
                r.max_error.into(),
                r.tolerance.into(),
            ]
        })
        .collect();
    Ok((table, passed))
}
