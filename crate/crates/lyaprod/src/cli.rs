//! Command-line front end: argument and config-file ingestion, seeding,
//! thread-pool setup, dispatch into the library, and report emission.
//!
//! Reports are JSON envelopes carrying the command name, crate version, the
//! resolved seed, and the effective config next to the result, so any run can
//! be reproduced from its own output. CSV exists only for the two commands
//! that dump per-replication samples. [`run`] takes the argv and the two
//! output streams and returns the process exit code, which keeps every path
//! testable without spawning.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::clt::{
    even_odd_cancellation, ks_against_normal, simulate_normalized, CltError, LambdaSource,
};
use crate::dist::{DistError, EntryDistribution};
use crate::estimators::{
    block_moments, classify_degeneracy, lambda_closed_form, lambda_direct_estimate,
    lambda_exact_sums, sigma2_block_estimate, sigma2_closed_form, sigma2_exact_sums,
    EstimateError, DEFAULT_DEGENERACY_RTOL,
};
use crate::hill::{unstable_growth_check, HillError, ScalarLaw};
use crate::quad::{lambda_quadrature, sigma2_quadrature, QuadError, QuadratureSpec};

const ABOUT: &str = "Growth rate and fluctuation variance for products of random \
singular 2x2 matrices: closed forms, Monte Carlo, quadrature, and experiments";

const AFTER_HELP: &str = "\
EXIT CODES:
  0  success
  2  config error: malformed flags, config file, or output path
  3  validation error: parameters outside the model
  4  quadrature failed to reach its tolerance within budget
  5  zero-product retry cap exhausted (degenerate sampling)

CONFIG FILE (--config file.json; explicit flags override its fields):
  {
    \"dist\": {\"kind\": \"binary\", \"a\": 1.0, \"b\": 2.0, \"p\": 0.5},
    \"n\": 1000000, \"reps\": 100, \"seed\": 42, \"threads\": 8,
    \"format\": \"json\", \"route\": \"block\", \"lambda_source\": \"closed-form\",
    \"sigma2_ref\": 0.25, \"abs_tol\": 1e-10, \"rel_tol\": 1e-9,
    \"max_subdivisions\": 20000, \"rtol\": 1e-9
  }
  dist kinds: binary {a, b, p}; uniform {lo, hi}; exponential {rate};
  laplace {scale}; atoms {atoms: [..], weights: [..]}.
  Hill laws (--h/--h-lo/--h-hi, --g/--g-lo/--g-hi) are flag-only.

EXAMPLES:
  lyaprod closed-form --dist exponential --rate 1
  lyaprod estimate-lambda --dist uniform --lo 0 --hi 1 --n 1000000 --seed 42
  lyaprod classify --atoms 1,-5.82842712474619 --weights 0.4,0.6
  lyaprod clt-test --dist exponential --rate 1 --n 4000 --reps 5000 --seed 7
  lyaprod hill-demo --h-lo 50 --h-hi 100 --g 1 --n 10000 --reps 100 --seed 1";

#[derive(Parser, Debug)]
#[command(name = "lyaprod", version, about = ABOUT, after_help = AFTER_HELP)]
struct Cli {
    /// JSON config file; explicit flags override its fields
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// RNG seed; defaults to fresh entropy and is echoed in the report
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: machine parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report format; csv exists only for sample dumps (clt-test, cancellation)
    #[arg(long, global = true, value_enum)]
    format: Option<FormatKind>,
    /// Write the report to this path instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact growth rate and fluctuation variance for an entry law
    ClosedForm(ClosedFormArgs),
    /// Monte Carlo growth-rate estimate with a dependence-aware stderr
    EstimateLambda(EstimateLambdaArgs),
    /// Monte Carlo moment table for the fluctuation variance
    EstimateSigma2(EstimateSigma2Args),
    /// Independent reference values: quadrature for continuous laws, exact
    /// sums for atomic ones
    Oracle(OracleArgs),
    /// Normalized-score simulation plus a KS test against the normal limit
    CltTest(CltTestArgs),
    /// Even/odd cancellation experiment on the centered factor sums
    Cancellation(CancellationArgs),
    /// Degeneracy verdict (which atom configurations kill the variance)
    Classify(ClassifyArgs),
    /// Growth-rate gap between exact cycle propagators and their scaled-Y
    /// approximations
    HillDemo(HillDemoArgs),
    /// Closed form, Monte Carlo, and oracle values for the worked example
    /// families, one row each
    PaperTable(PaperTableArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum FormatKind {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Route {
    /// One long path, factor terms averaged in place
    Block,
    /// Independent replications of the full matrix product
    Direct,
}

impl Route {
    fn as_str(self) -> &'static str {
        match self {
            Route::Block => "block",
            Route::Direct => "direct",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum LambdaSourceArg {
    ClosedForm,
    Estimate,
}

impl From<LambdaSourceArg> for LambdaSource {
    fn from(v: LambdaSourceArg) -> LambdaSource {
        match v {
            LambdaSourceArg::ClosedForm => LambdaSource::ClosedForm,
            LambdaSourceArg::Estimate => LambdaSource::Estimate,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DistKind {
    Binary,
    Uniform,
    Exponential,
    Laplace,
    Atoms,
}

/// Entry-law flags shared by every command that takes a distribution.
#[derive(Args, Debug, Default)]
struct DistArgs {
    /// Entry-law family; implied by --atoms when omitted
    #[arg(long, value_enum)]
    dist: Option<DistKind>,
    /// binary: first atom
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// binary: second atom
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// binary: probability of the first atom
    #[arg(long)]
    p: Option<f64>,
    /// uniform: lower endpoint (lo <= 0 < hi)
    #[arg(long, allow_negative_numbers = true)]
    lo: Option<f64>,
    /// uniform: upper endpoint
    #[arg(long, allow_negative_numbers = true)]
    hi: Option<f64>,
    /// exponential: rate
    #[arg(long)]
    rate: Option<f64>,
    /// laplace: scale
    #[arg(long)]
    scale: Option<f64>,
    /// atoms: comma-separated support points
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    atoms: Option<Vec<f64>>,
    /// atoms: comma-separated probabilities, same length as --atoms
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct ClosedFormArgs {
    #[command(flatten)]
    dist: DistArgs,
}

#[derive(Args, Debug)]
struct EstimateLambdaArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Path length (block) or per-replication length (direct); default 1000000
    #[arg(long)]
    n: Option<u64>,
    /// Estimation route
    #[arg(long, value_enum)]
    route: Option<Route>,
    /// Replications; direct route only, default 100
    #[arg(long)]
    reps: Option<u64>,
}

#[derive(Args, Debug)]
struct EstimateSigma2Args {
    #[command(flatten)]
    dist: DistArgs,
    /// Path length; default 1000000
    #[arg(long)]
    n: Option<u64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Absolute tolerance per integral; default 1e-10
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Relative tolerance per integral; default 1e-9
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Bisection budget per integral; default 20000
    #[arg(long)]
    max_subdivisions: Option<u32>,
}

#[derive(Args, Debug)]
struct CltTestArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Factors per replication; default 4000
    #[arg(long)]
    n: Option<u64>,
    /// Replications; default 5000
    #[arg(long)]
    reps: Option<u64>,
    /// Where the centering constant comes from; default closed-form
    #[arg(long, value_enum)]
    lambda_source: Option<LambdaSourceArg>,
    /// Reference variance for the KS test; default closed form, falling back
    /// to quadrature when no closed form exists
    #[arg(long)]
    sigma2_ref: Option<f64>,
}

#[derive(Args, Debug)]
struct CancellationArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Factors per replication, even; default 10000
    #[arg(long)]
    n: Option<u64>,
    /// Replications; default 2000
    #[arg(long)]
    reps: Option<u64>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Relative tolerance on the atom ratio; default 1e-9
    #[arg(long)]
    rtol: Option<f64>,
}

#[derive(Args, Debug)]
struct HillDemoArgs {
    /// Constant trace parameter (exclusive with --h-lo/--h-hi)
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    /// Uniform trace law, lower endpoint
    #[arg(long, allow_negative_numbers = true)]
    h_lo: Option<f64>,
    /// Uniform trace law, upper endpoint
    #[arg(long, allow_negative_numbers = true)]
    h_hi: Option<f64>,
    /// Constant coupling (exclusive with --g-lo/--g-hi); default 1
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    /// Uniform coupling law, lower endpoint
    #[arg(long, allow_negative_numbers = true)]
    g_lo: Option<f64>,
    /// Uniform coupling law, upper endpoint
    #[arg(long, allow_negative_numbers = true)]
    g_hi: Option<f64>,
    /// Cycles per path; default 2000
    #[arg(long)]
    n: Option<u64>,
    /// Paths; default 8
    #[arg(long)]
    reps: Option<u64>,
}

#[derive(Args, Debug)]
struct PaperTableArgs {
    /// Path length for the Monte Carlo column; default 1000000
    #[arg(long)]
    n: Option<u64>,
}

/// Config-file mirror of the flags; any field may be omitted.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    dist: Option<EntryDistribution>,
    n: Option<u64>,
    reps: Option<u64>,
    seed: Option<u64>,
    threads: Option<usize>,
    format: Option<FormatKind>,
    route: Option<Route>,
    lambda_source: Option<LambdaSourceArg>,
    sigma2_ref: Option<f64>,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    rtol: Option<f64>,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Validation(String),
    Nonconvergence(String),
    Degenerate(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Nonconvergence(_) => 4,
            CliError::Degenerate(_) => 5,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Validation(_) => "validation",
            CliError::Nonconvergence(_) => "nonconvergence",
            CliError::Degenerate(_) => "degenerate_sample",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Validation(m)
            | CliError::Nonconvergence(m)
            | CliError::Degenerate(m) => m,
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::DegenerateSample { .. } => CliError::Degenerate(e.to_string()),
            EstimateError::Dist(d) => d.into(),
            EstimateError::TooShort(..) => CliError::Validation(e.to_string()),
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::Nonconvergence { .. } => CliError::Nonconvergence(e.to_string()),
            QuadError::Dist(d) => d.into(),
            QuadError::Unsupported(_) | QuadError::BadSpec(_) => {
                CliError::Validation(e.to_string())
            }
        }
    }
}

impl From<CltError> for CliError {
    fn from(e: CltError) -> Self {
        match e {
            CltError::DegenerateSample { .. } => CliError::Degenerate(e.to_string()),
            CltError::Dist(d) => d.into(),
            CltError::Estimate(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<HillError> for CliError {
    fn from(e: HillError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("report serialization: {e}"))
    }
}

/// Full report envelope; field order is the emission order.
#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    threads: usize,
    config: &'a Value,
    result: &'a Value,
}

/// What one command produced, before the envelope is applied.
struct Emission {
    command: &'static str,
    config: Value,
    result: Value,
    /// Sample dump; present exactly when csv format was requested.
    csv: Option<String>,
}

/// Parses `argv`, runs the command, and writes the report; returns the
/// process exit code. All output goes through the two writers.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let out_path = cli.out.clone();
    match execute(cli) {
        Ok(text) => match out_path {
            None => {
                let _ = stdout.write_all(text.as_bytes());
                0
            }
            Some(path) => match fs::write(&path, &text) {
                Ok(()) => 0,
                Err(e) => {
                    let err = CliError::Config(format!("cannot write {}: {e}", path.display()));
                    emit_error(stderr, &err);
                    err.exit_code()
                }
            },
        },
        Err(err) => {
            emit_error(stderr, &err);
            err.exit_code()
        }
    }
}

fn emit_error(stderr: &mut dyn Write, err: &CliError) {
    let payload = json!({
        "error": {
            "exit_code": err.exit_code(),
            "kind": err.kind(),
            "message": err.message(),
        }
    });
    let _ = writeln!(stderr, "{payload}");
}

fn execute(cli: Cli) -> Result<String, CliError> {
    let file = match &cli.config {
        None => FileConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?
        }
    };
    let seed = cli.seed.or(file.seed).unwrap_or_else(entropy_seed);
    let format = cli.format.or(file.format).unwrap_or(FormatKind::Json);
    if format == FormatKind::Csv
        && !matches!(cli.command, Command::CltTest(_) | Command::Cancellation(_))
    {
        return Err(CliError::Config(
            "csv output exists only for the sample dumps of clt-test and cancellation".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.or(file.threads).unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let threads = pool.current_num_threads();
    let emission = pool.install(|| dispatch(&cli.command, &file, seed, format))?;
    if let Some(csv) = emission.csv {
        return Ok(csv);
    }
    let report = Report {
        command: emission.command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        threads,
        config: &emission.config,
        result: &emission.result,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(text)
}

/// Seed when none was given: OS-entropy hasher state, echoed in the report so
/// the run can be replayed.
fn entropy_seed() -> u64 {
    use std::collections::hash_map::RandomState;
    use std::hash::{BuildHasher, Hasher};
    let mut h = RandomState::new().build_hasher();
    h.write_u64(std::process::id() as u64);
    h.finish()
}

fn dispatch(
    cmd: &Command,
    file: &FileConfig,
    seed: u64,
    format: FormatKind,
) -> Result<Emission, CliError> {
    match cmd {
        Command::ClosedForm(a) => closed_form_cmd(a, file),
        Command::EstimateLambda(a) => estimate_lambda_cmd(a, file, seed),
        Command::EstimateSigma2(a) => estimate_sigma2_cmd(a, file, seed),
        Command::Oracle(a) => oracle_cmd(a, file),
        Command::CltTest(a) => clt_test_cmd(a, file, seed, format),
        Command::Cancellation(a) => cancellation_cmd(a, file, seed, format),
        Command::Classify(a) => classify_cmd(a, file),
        Command::HillDemo(a) => hill_demo_cmd(a, file, seed),
        Command::PaperTable(a) => paper_table_cmd(a, file, seed),
    }
}

// ---------------------------------------------------------------------------
// resolution helpers

fn pick<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn kind_of(d: &EntryDistribution) -> DistKind {
    match d {
        EntryDistribution::Binary { .. } => DistKind::Binary,
        EntryDistribution::Uniform { .. } => DistKind::Uniform,
        EntryDistribution::Exponential { .. } => DistKind::Exponential,
        EntryDistribution::Laplace { .. } => DistKind::Laplace,
        EntryDistribution::DiscreteAtoms { .. } => DistKind::Atoms,
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Config(format!("missing {flag} (flag or config file)"))
}

/// Distribution from flags over config file, field by field; the family is
/// taken from --dist, implied by --atoms, or read from the file.
fn resolve_dist(
    args: &DistArgs,
    file_dist: Option<&EntryDistribution>,
) -> Result<EntryDistribution, CliError> {
    let kind = match (args.dist, &args.atoms) {
        (Some(k), _) => k,
        (None, Some(_)) => DistKind::Atoms,
        (None, None) => match file_dist {
            Some(d) => kind_of(d),
            None => {
                return Err(CliError::Config(
                    "no distribution: pass --dist (or --atoms/--weights) or put one in --config"
                        .into(),
                ))
            }
        },
    };
    if args.atoms.is_some() && kind != DistKind::Atoms {
        return Err(CliError::Config(
            "--atoms only applies to the atoms family".into(),
        ));
    }
    if args.weights.is_some() && kind != DistKind::Atoms {
        return Err(CliError::Config(
            "--weights only applies to the atoms family".into(),
        ));
    }
    // field fallbacks come only from a same-family config entry
    let fallback = file_dist.filter(|d| kind_of(d) == kind);
    let dist = match kind {
        DistKind::Binary => {
            let (fa, fb, fp) = match fallback {
                Some(EntryDistribution::Binary { a, b, p }) => (Some(*a), Some(*b), Some(*p)),
                _ => (None, None, None),
            };
            EntryDistribution::Binary {
                a: args.a.or(fa).ok_or_else(|| missing("--a"))?,
                b: args.b.or(fb).ok_or_else(|| missing("--b"))?,
                p: args.p.or(fp).ok_or_else(|| missing("--p"))?,
            }
        }
        DistKind::Uniform => {
            let (flo, fhi) = match fallback {
                Some(EntryDistribution::Uniform { lo, hi }) => (Some(*lo), Some(*hi)),
                _ => (None, None),
            };
            EntryDistribution::Uniform {
                lo: args.lo.or(flo).ok_or_else(|| missing("--lo"))?,
                hi: args.hi.or(fhi).ok_or_else(|| missing("--hi"))?,
            }
        }
        DistKind::Exponential => {
            let frate = match fallback {
                Some(EntryDistribution::Exponential { rate }) => Some(*rate),
                _ => None,
            };
            EntryDistribution::Exponential {
                rate: args.rate.or(frate).ok_or_else(|| missing("--rate"))?,
            }
        }
        DistKind::Laplace => {
            let fscale = match fallback {
                Some(EntryDistribution::Laplace { scale }) => Some(*scale),
                _ => None,
            };
            EntryDistribution::Laplace {
                scale: args.scale.or(fscale).ok_or_else(|| missing("--scale"))?,
            }
        }
        DistKind::Atoms => {
            let (fatoms, fweights) = match fallback {
                Some(EntryDistribution::DiscreteAtoms { atoms, weights }) => {
                    (Some(atoms.clone()), Some(weights.clone()))
                }
                _ => (None, None),
            };
            EntryDistribution::DiscreteAtoms {
                atoms: args.atoms.clone().or(fatoms).ok_or_else(|| missing("--atoms"))?,
                weights: args
                    .weights
                    .clone()
                    .or(fweights)
                    .ok_or_else(|| missing("--weights"))?,
            }
        }
    };
    Ok(dist)
}

/// Scalar law from a constant flag or a lo/hi pair, with an optional default.
fn resolve_law(
    name: &str,
    constant: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
    default: Option<ScalarLaw>,
) -> Result<ScalarLaw, CliError> {
    match (constant, lo, hi) {
        (Some(v), None, None) => Ok(ScalarLaw::Constant { value: v }),
        (None, Some(lo), Some(hi)) => Ok(ScalarLaw::Uniform { lo, hi }),
        (None, None, None) => default.ok_or_else(|| {
            CliError::Config(format!("missing --{name} or --{name}-lo/--{name}-hi"))
        }),
        _ => Err(CliError::Config(format!(
            "pass either --{name} or both --{name}-lo and --{name}-hi"
        ))),
    }
}

fn resolve_quad_spec(
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    max_subdivisions: Option<u32>,
    file: &FileConfig,
) -> QuadratureSpec {
    let d = QuadratureSpec::default();
    QuadratureSpec {
        abs_tol: pick(abs_tol, file.abs_tol, d.abs_tol),
        rel_tol: pick(rel_tol, file.rel_tol, d.rel_tol),
        max_subdivisions: pick(max_subdivisions, file.max_subdivisions, d.max_subdivisions),
        tail_quantile: d.tail_quantile,
    }
}

/// JSON number, or null for the NaN sentinels some estimates carry.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn opt_num(v: Option<f64>) -> Value {
    match v {
        Some(v) => num(v),
        None => Value::Null,
    }
}

// ---------------------------------------------------------------------------
// commands

fn closed_form_cmd(args: &ClosedFormArgs, file: &FileConfig) -> Result<Emission, CliError> {
    let dist = resolve_dist(&args.dist, file.dist.as_ref())?;
    let lambda = lambda_closed_form(&dist)?;
    let sigma2 = sigma2_closed_form(&dist)?;
    Ok(Emission {
        command: "closed-form",
        config: json!({ "dist": serde_json::to_value(&dist)? }),
        result: json!({ "lambda": num(lambda), "sigma2": opt_num(sigma2) }),
        csv: None,
    })
}

fn estimate_lambda_cmd(
    args: &EstimateLambdaArgs,
    file: &FileConfig,
    seed: u64,
) -> Result<Emission, CliError> {
    let dist = resolve_dist(&args.dist, file.dist.as_ref())?;
    let n = pick(args.n, file.n, 1_000_000);
    let route = pick(args.route, file.route, Route::Block);
    let result = match route {
        Route::Block => {
            let (est, zero_resamples) = block_moments(&dist, n, seed)?;
            json!({
                "route": route.as_str(),
                "lambda_hat": num(est.lambda_hat),
                "stderr": num(est.stderr_lambda),
                "n_samples": est.n_samples,
                "zero_resamples": zero_resamples,
            })
        }
        Route::Direct => {
            let reps = pick(args.reps, file.reps, 100);
            let (lambda_hat, stderr) = lambda_direct_estimate(&dist, n, reps, seed)?;
            json!({
                "route": route.as_str(),
                "lambda_hat": num(lambda_hat),
                "stderr": num(stderr),
                "n": n,
                "reps": reps,
            })
        }
    };
    Ok(Emission {
        command: "estimate-lambda",
        config: json!({
            "dist": serde_json::to_value(&dist)?,
            "n": n,
            "route": route.as_str(),
            "reps": if route == Route::Direct { json!(pick(args.reps, file.reps, 100)) } else { Value::Null },
        }),
        result,
        csv: None,
    })
}

fn estimate_sigma2_cmd(
    args: &EstimateSigma2Args,
    file: &FileConfig,
    seed: u64,
) -> Result<Emission, CliError> {
    let dist = resolve_dist(&args.dist, file.dist.as_ref())?;
    let n = pick(args.n, file.n, 1_000_000);
    let est = sigma2_block_estimate(&dist, n, seed)?;
    Ok(Emission {
        command: "estimate-sigma2",
        config: json!({ "dist": serde_json::to_value(&dist)?, "n": n }),
        result: json!({
            "lambda_hat": num(est.lambda_hat),
            "m2_hat": num(est.m2_hat),
            "c1_hat": num(est.c1_hat),
            "sigma2_hat": num(est.sigma2_hat),
            "n_samples": est.n_samples,
            "stderr_lambda": num(est.stderr_lambda),
            "stderr_sigma2": num(est.stderr_sigma2),
        }),
        csv: None,
    })
}

fn oracle_cmd(args: &OracleArgs, file: &FileConfig) -> Result<Emission, CliError> {
    let dist = resolve_dist(&args.dist, file.dist.as_ref())?;
    let spec = resolve_quad_spec(args.abs_tol, args.rel_tol, args.max_subdivisions, file);
    dist.validate()?;
    let result = match dist.charged_atoms() {
        Some(atoms) => {
            let lambda = lambda_exact_sums(&atoms);
            let sigma2 = sigma2_exact_sums(&atoms);
            json!({
                "method": "exact_sum",
                "lambda": num(lambda),
                "sigma2": num(sigma2),
            })
        }
        None => {
            let lambda = lambda_quadrature(&dist, &spec)?;
            let sigma2 = sigma2_quadrature(&dist, &spec)?;
            json!({
                "method": "quadrature",
                "lambda": {
                    "value": num(lambda.value),
                    "error_bound": num(lambda.error_bound),
                    "subdivisions": lambda.subdivisions,
                },
                "sigma2": {
                    "value": num(sigma2.sigma2),
                    "error_bound": num(sigma2.error_bound),
                    "m2": num(sigma2.m2.value),
                    "c1": num(sigma2.c1.value),
                },
            })
        }
    };
    Ok(Emission {
        command: "oracle",
        config: json!({
            "dist": serde_json::to_value(&dist)?,
            "abs_tol": spec.abs_tol,
            "rel_tol": spec.rel_tol,
            "max_subdivisions": spec.max_subdivisions,
        }),
        result,
        csv: None,
    })
}

fn clt_test_cmd(
    args: &CltTestArgs,
    file: &FileConfig,
    seed: u64,
    format: FormatKind,
) -> Result<Emission, CliError> {
    let dist = resolve_dist(&args.dist, file.dist.as_ref())?;
    let n = pick(args.n, file.n, 4_000);
    let reps = pick(args.reps, file.reps, 5_000);
    let source: LambdaSource = pick(
        args.lambda_source,
        file.lambda_source,
        LambdaSourceArg::ClosedForm,
    )
    .into();
    let sigma2_ref = match args.sigma2_ref.or(file.sigma2_ref) {
        Some(v) => v,
        None => match sigma2_closed_form(&dist)? {
            Some(v) => v,
            None => sigma2_quadrature(&dist, &QuadratureSpec::default())?.sigma2,
        },
    };
    let sample = simulate_normalized(&dist, n, reps, seed, source)?;
    let ks = ks_against_normal(&sample.scores, sigma2_ref)?;
    let csv = if format == FormatKind::Csv {
        let mut text = String::from("rep,score\n");
        for (i, s) in sample.scores.iter().enumerate() {
            text.push_str(&format!("{i},{s}\n"));
        }
        Some(text)
    } else {
        None
    };
    Ok(Emission {
        command: "clt-test",
        config: json!({
            "dist": serde_json::to_value(&dist)?,
            "n": n,
            "reps": reps,
            "lambda_source": serde_json::to_value(sample.lambda_source)?,
            "sigma2_ref": num(sigma2_ref),
        }),
        result: json!({
            "lambda_used": num(sample.lambda_used),
            "empirical_mean": num(sample.empirical_mean),
            "empirical_var": num(sample.empirical_var),
            "sigma2_ref": num(sigma2_ref),
            "ks_distance": num(ks.statistic),
            "ks_threshold_1pct": num(ks.threshold_1pct),
            "reject_at_1pct": ks.reject_at_1pct,
        }),
        csv,
    })
}

fn cancellation_cmd(
    args: &CancellationArgs,
    file: &FileConfig,
    seed: u64,
    format: FormatKind,
) -> Result<Emission, CliError> {
    let dist = resolve_dist(&args.dist, file.dist.as_ref())?;
    let n = pick(args.n, file.n, 10_000);
    let reps = pick(args.reps, file.reps, 2_000);
    let rep = even_odd_cancellation(&dist, n, reps, seed)?;
    let csv = if format == FormatKind::Csv {
        let mut text = String::from("rep,s_total,s_even,s_odd\n");
        for (i, r) in rep.runs.iter().enumerate() {
            text.push_str(&format!("{i},{},{},{}\n", r.s_total, r.s_even, r.s_odd));
        }
        Some(text)
    } else {
        None
    };
    Ok(Emission {
        command: "cancellation",
        config: json!({ "dist": serde_json::to_value(&dist)?, "n": n, "reps": reps }),
        result: json!({
            "lambda": num(rep.lambda),
            "var_total_over_n": num(rep.var_total_over_n),
            "var_even_over_half": num(rep.var_even_over_half),
            "var_odd_over_half": num(rep.var_odd_over_half),
            "correlation_even_odd": num(rep.correlation_even_odd),
        }),
        csv,
    })
}

fn classify_cmd(args: &ClassifyArgs, file: &FileConfig) -> Result<Emission, CliError> {
    let dist = resolve_dist(&args.dist, file.dist.as_ref())?;
    let rtol = pick(args.rtol, file.rtol, DEFAULT_DEGENERACY_RTOL);
    let verdict = classify_degeneracy(&dist, rtol)?;
    let lambda = lambda_closed_form(&dist)?;
    let sigma2 = sigma2_closed_form(&dist)?;
    Ok(Emission {
        command: "classify",
        config: json!({ "dist": serde_json::to_value(&dist)?, "rtol": rtol }),
        result: json!({
            "verdict": serde_json::to_value(verdict)?,
            "lambda": num(lambda),
            "sigma2": opt_num(sigma2),
        }),
        csv: None,
    })
}

fn hill_demo_cmd(
    args: &HillDemoArgs,
    file: &FileConfig,
    seed: u64,
) -> Result<Emission, CliError> {
    let h_law = resolve_law("h", args.h, args.h_lo, args.h_hi, None)?;
    let g_law = resolve_law(
        "g",
        args.g,
        args.g_lo,
        args.g_hi,
        Some(ScalarLaw::Constant { value: 1.0 }),
    )?;
    let n = pick(args.n, file.n, 2_000);
    let reps = pick(args.reps, file.reps, 8);
    let out = unstable_growth_check(&h_law, &g_law, n, reps, seed)?;
    Ok(Emission {
        command: "hill-demo",
        config: json!({
            "h_law": serde_json::to_value(h_law)?,
            "g_law": serde_json::to_value(g_law)?,
            "n": n,
            "reps": reps,
        }),
        result: json!({
            "h_floor": num(out.h_floor),
            "mean_log_h": num(h_law.mean_log_abs()),
            "rate_exact": num(out.rate_exact),
            "rate_approx": num(out.rate_approx),
            "gap": num(out.gap),
            "residual_ratio_max": num(out.residual_ratio_max),
        }),
        csv: None,
    })
}

fn paper_table_cmd(
    args: &PaperTableArgs,
    file: &FileConfig,
    seed: u64,
) -> Result<Emission, CliError> {
    let n = pick(args.n, file.n, 1_000_000);
    let spec = QuadratureSpec::default();
    let families: [(&str, EntryDistribution); 5] = [
        (
            "binary a=1 b=2 p=1/2",
            EntryDistribution::Binary { a: 1.0, b: 2.0, p: 0.5 },
        ),
        (
            "uniform on [0, 1]",
            EntryDistribution::Uniform { lo: 0.0, hi: 1.0 },
        ),
        (
            "uniform on [-1, 1]",
            EntryDistribution::Uniform { lo: -1.0, hi: 1.0 },
        ),
        (
            "exponential rate=1",
            EntryDistribution::Exponential { rate: 1.0 },
        ),
        (
            "laplace scale=1",
            EntryDistribution::Laplace { scale: 1.0 },
        ),
    ];
    let mut rows = Vec::with_capacity(families.len());
    for (idx, (label, dist)) in families.iter().enumerate() {
        rows.push(table_row(label, dist, n, seed.wrapping_add(idx as u64), &spec)?);
    }
    Ok(Emission {
        command: "paper-table",
        config: json!({ "n": n, "abs_tol": spec.abs_tol, "rel_tol": spec.rel_tol }),
        result: json!({ "rows": rows }),
        csv: None,
    })
}

fn table_row(
    label: &str,
    dist: &EntryDistribution,
    n: u64,
    seed: u64,
    spec: &QuadratureSpec,
) -> Result<Value, CliError> {
    let lambda_closed = lambda_closed_form(dist)?;
    let sigma2_closed = sigma2_closed_form(dist)?;
    let est = sigma2_block_estimate(dist, n, seed)?;
    let (lambda_oracle, sigma2_oracle) = match dist.charged_atoms() {
        Some(atoms) => (lambda_exact_sums(&atoms), sigma2_exact_sums(&atoms)),
        None => (
            lambda_quadrature(dist, spec)?.value,
            sigma2_quadrature(dist, spec)?.sigma2,
        ),
    };
    Ok(json!({
        "label": label,
        "family": serde_json::to_value(dist)?,
        "lambda_closed": num(lambda_closed),
        "sigma2_closed": opt_num(sigma2_closed),
        "lambda_mc": num(est.lambda_hat),
        "lambda_stderr": num(est.stderr_lambda),
        "sigma2_mc": num(est.sigma2_hat),
        "sigma2_stderr": num(est.stderr_sigma2),
        "lambda_oracle": num(lambda_oracle),
        "sigma2_oracle": num(sigma2_oracle),
    }))
}
