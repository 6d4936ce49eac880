//! Command-line front end: argument types, subcommand drivers, and the mapping
//! from library errors to process exit codes.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or configuration error,
//! 3 solver or generation failure.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{
    estimate_transition_acf, generate_trial_data, grid_search, run_synthetic, ExperimentConfig,
    GraphSpec, SignalSpec, Summary, SweepReport,
};
use crate::io::{
    load_laplacian, load_matrix, parse_matrix, save_laplacian, save_matrix, save_report,
};
use crate::metrics::{edges_from_laplacian, MetricsReport};
use crate::signal::SignalMatrix;
use crate::solver::{solve, SolverConfig};
use crate::transition::{TransitionMatrix, TransitionSpec};

#[derive(Parser, Debug)]
#[command(
    name = "stgl",
    version,
    about = "Learn graph Laplacians and low-rank components from spatiotemporal signals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run synthetic Monte Carlo trials and write an aggregate report.
    Synth(SynthArgs),
    /// Grid-search the regularization weights over shared-seed synthetic trials.
    Sweep(SweepArgs),
    /// Learn a Laplacian and signal estimate from a CSV observation matrix.
    Learn(LearnArgs),
    /// Score a learned Laplacian against a reference Laplacian.
    Metrics(MetricsArgs),
    /// Generate a synthetic dataset and write its ground truth to disk.
    Gen(GenArgs),
}

/// Flags shared by the config-driven subcommands; each one overrides the
/// matching field of the JSON config (or of the built-in benchmark config).
#[derive(Args, Debug, Default)]
pub struct ConfigArgs {
    /// JSON experiment configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Base RNG seed; trial k uses stream k + 1.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Graph smoothness weight.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Laplacian Frobenius weight.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Nuclear-norm weight; 0 disables the low-rank prior.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// ADMM penalty parameter.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Edge-detection threshold on -L(i,j).
    #[arg(long, value_name = "T")]
    pub tau_edge: Option<f64>,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for trials (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    /// Observation matrix Y: CSV, row = vertex, column = time instant.
    #[arg(value_name = "Y_CSV")]
    pub input: PathBuf,
    /// Transition matrix to solve with: the identity, lag-1 autocorrelation
    /// coefficients estimated from Y, or a CSV file holding per-vertex
    /// coefficients (one row or column) or a full dense matrix.
    #[arg(long, default_value = "identity", value_name = "identity|acf|file:<path>")]
    pub transition: String,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Learned Laplacian, dense CSV.
    #[arg(value_name = "LEARNED_CSV")]
    pub learned: PathBuf,
    /// Reference Laplacian, dense CSV.
    #[arg(value_name = "TRUTH_CSV")]
    pub truth: PathBuf,
    /// Edge-detection threshold on -L(i,j).
    #[arg(long, value_name = "T")]
    pub tau_edge: Option<f64>,
    /// Also write the scores to <DIR>/metrics.json.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

/// A classified command failure carrying its process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Malformed flag values or flag combinations.
    Usage(String),
    /// Unreadable, unparsable, or invalid input data and configuration.
    Data(Error),
    /// Numerical failure while solving or generating.
    Solver(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Solver(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "{msg}"),
            Failure::Data(e) | Failure::Solver(e) => write!(f, "{e}"),
        }
    }
}

/// Sorts a library error into data-vs-solver by its variant.
fn classify(e: Error) -> Failure {
    match e {
        Error::Convergence { .. }
        | Error::Linalg { .. }
        | Error::NonFinite(_)
        | Error::Generation { .. } => Failure::Solver(e),
        _ => Failure::Data(e),
    }
}

pub fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Synth(args) => run_synth(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Learn(args) => run_learn(args),
        Command::Metrics(args) => run_metrics(args),
        Command::Gen(args) => run_gen(args),
    }
}

/// The benchmark experiment used when no config file is given: a 30-vertex
/// random geometric graph, 100 instants of rank-3 signals at noise 0.5.
fn benchmark_config() -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphSpec::Rgg { n: 30, sigma: 0.5, threshold: 0.7 },
        signal: SignalSpec { rank: 3, m: 100, sigma_n: 0.5, transition: TransitionSpec::Identity },
        solver: SolverConfig::default(),
        trials: 20,
        seed: 0,
        sweep: None,
        tau_edge: crate::metrics::DEFAULT_TAU_EDGE,
    }
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(Error::io(path))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => benchmark_config(),
    };
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.trials {
        config.trials = v;
    }
    if let Some(v) = args.alpha {
        config.solver.alpha = v;
    }
    if let Some(v) = args.beta {
        config.solver.beta = v;
    }
    if let Some(v) = args.gamma {
        config.solver.gamma = v;
    }
    if let Some(v) = args.rho {
        config.solver.rho = v;
    }
    if let Some(v) = args.tau_edge {
        config.tau_edge = v;
    }
    config.validate()?;
    Ok(config)
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::io(dir))
}

fn fmt_mean_std(name: &str, mean: Option<f64>, std: Option<f64>) -> Option<String> {
    let m = mean?;
    match std {
        Some(s) => Some(format!("{name}: {m:.4} +/- {s:.4}")),
        None => Some(format!("{name}: {m:.4}")),
    }
}

fn print_summary(summary: &Summary) {
    println!("trials: {} succeeded, {} failed", summary.succeeded, summary.failed);
    let pairs = [
        ("precision", summary.mean.precision, summary.std.precision),
        ("recall", summary.mean.recall, summary.std.recall),
        ("f-measure", summary.mean.f_measure, summary.std.f_measure),
        ("nmi", summary.mean.nmi, summary.std.nmi),
        ("gse", summary.mean.gse, summary.std.gse),
        ("lce", summary.mean.lce, summary.std.lce),
    ];
    for (name, mean, std) in pairs {
        if let Some(line) = fmt_mean_std(name, mean, std) {
            println!("{line}");
        }
    }
}

fn run_synth(args: SynthArgs) -> std::result::Result<(), Failure> {
    let config = load_config(&args.config).map_err(classify)?;
    configure_threads(args.out.threads).map_err(classify)?;
    ensure_dir(&args.out.out).map_err(classify)?;
    // Config is valid here, so run_synthetic cannot fail; trial errors live in
    // the report.
    let report = run_synthetic(&config).map_err(classify)?;
    let path = args.out.out.join("report.json");
    save_report(&report, &path).map_err(classify)?;
    print_summary(&report.summary);
    for flag in &report.flags {
        println!("flag: {flag}");
    }
    println!("report: {}", path.display());
    if report.summary.succeeded == 0 {
        let first = report
            .trials
            .iter()
            .find_map(|t| t.error.clone())
            .unwrap_or_else(|| "no trials ran".into());
        return Err(Failure::Solver(Error::Data(format!(
            "all trials failed; first error: {first}"
        ))));
    }
    Ok(())
}

/// Tidy per-point table with every aggregate column, for plotting curves
/// against any of the three weights.
fn sweep_table_csv(report: &SweepReport) -> String {
    let mut out = String::from(
        "alpha,beta,gamma,succeeded,failed,precision_mean,precision_std,recall_mean,recall_std,\
         f_measure_mean,f_measure_std,nmi_mean,nmi_std,gse_mean,gse_std,lce_mean,lce_std,error\n",
    );
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
    for row in &report.table {
        let s = &row.summary;
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.alpha,
            row.beta,
            row.gamma,
            s.succeeded,
            s.failed,
            cell(s.mean.precision),
            cell(s.std.precision),
            cell(s.mean.recall),
            cell(s.std.recall),
            cell(s.mean.f_measure),
            cell(s.std.f_measure),
            cell(s.mean.nmi),
            cell(s.std.nmi),
            cell(s.mean.gse),
            cell(s.std.gse),
            cell(s.mean.lce),
            cell(s.std.lce),
            row.error.clone().unwrap_or_default().replace(',', ";"),
        ));
    }
    out
}

fn run_sweep(args: SweepArgs) -> std::result::Result<(), Failure> {
    let config = load_config(&args.config).map_err(classify)?;
    if config.sweep.is_none() {
        return Err(Failure::Data(Error::Config(
            "sweep needs a sweep specification in the config file".into(),
        )));
    }
    configure_threads(args.out.threads).map_err(classify)?;
    ensure_dir(&args.out.out).map_err(classify)?;
    // Per-point failures are rows in the table; an error past this point means
    // no grid point produced a usable aggregate.
    let report = grid_search(&config).map_err(|e| Failure::Solver(e))?;
    let json_path = args.out.out.join("sweep.json");
    save_report(&report, &json_path).map_err(classify)?;
    let csv_path = args.out.out.join("sweep.csv");
    fs::write(&csv_path, sweep_table_csv(&report))
        .map_err(|e| classify(Error::io(&csv_path)(e)))?;
    println!(
        "best: alpha = {:.6e}, beta = {:.6e}, gamma = {:.6e}",
        report.best.alpha, report.best.beta, report.best.gamma
    );
    println!("evaluated {} grid points", report.table.len());
    println!("table: {}", csv_path.display());
    println!("report: {}", json_path.display());
    Ok(())
}

/// What `learn` writes next to the estimated Laplacian and signals.
#[derive(Debug, Serialize)]
struct LearnReport {
    version: String,
    input: String,
    n: usize,
    m: usize,
    transition: String,
    /// Diagonal of the transition matrix when one was estimated or loaded.
    #[serde(skip_serializing_if = "Option::is_none")]
    transition_coefficients: Option<Vec<f64>>,
    solver: SolverConfig,
    tau_edge: f64,
    outer_iterations: usize,
    objective_trace: Vec<f64>,
    edge_count: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    flags: Vec<String>,
    wall_seconds: f64,
}

/// Resolves the `--transition` flag against the observations.
fn resolve_transition(
    mode: &str,
    y: &SignalMatrix,
) -> std::result::Result<TransitionMatrix, Failure> {
    match mode {
        "identity" => Ok(TransitionMatrix::identity(y.n())),
        "acf" => estimate_transition_acf(y).map_err(classify),
        other => {
            let Some(path) = other.strip_prefix("file:") else {
                return Err(Failure::Usage(format!(
                    "--transition must be identity, acf, or file:<path>, got {other:?}"
                )));
            };
            load_transition_file(Path::new(path)).map_err(classify)
        }
    }
}

/// Reads a transition matrix from CSV: a single row or column is taken as
/// per-vertex coefficients, anything square as a dense matrix (diagonal or
/// symmetric).
fn load_transition_file(path: &Path) -> Result<TransitionMatrix> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    let m = parse_matrix(&text).map_err(|e| crate::io::at_path(path, e))?;
    let (rows, cols) = m.dim();
    if rows == 1 {
        TransitionMatrix::diagonal(m.row(0).to_owned())
    } else if cols == 1 {
        TransitionMatrix::diagonal(m.column(0).to_owned())
    } else if rows == cols {
        let off_diag = m
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .map(|(_, v)| v.abs())
            .fold(0.0f64, f64::max);
        if off_diag == 0.0 {
            TransitionMatrix::diagonal(m.diag().to_owned())
        } else {
            TransitionMatrix::symmetric(m)
        }
    } else {
        Err(Error::Data(format!(
            "{}: transition file must be one row, one column, or square, got {rows}x{cols}",
            path.display()
        )))
    }
}

fn run_learn(args: LearnArgs) -> std::result::Result<(), Failure> {
    let started = Instant::now();
    let config = load_config(&args.config).map_err(classify)?;
    configure_threads(args.out.threads).map_err(classify)?;
    let y = load_matrix(&args.input).map_err(classify)?;
    let transition = resolve_transition(&args.transition, &y)?;
    if transition.n() != y.n() {
        return Err(Failure::Data(Error::Dimension(format!(
            "transition is {0}x{0} but Y has {1} rows",
            transition.n(),
            y.n()
        ))));
    }
    ensure_dir(&args.out.out).map_err(classify)?;
    let result = solve(&y, &transition, &config.solver).map_err(|e| Failure::Solver(e))?;

    let dense_path = args.out.out.join("laplacian.csv");
    let edges_path = args.out.out.join("laplacian_edges.csv");
    save_laplacian(&result.l_hat, &dense_path, &edges_path, config.tau_edge).map_err(classify)?;
    let x_path = args.out.out.join("x_hat.csv");
    save_matrix(result.x_hat.array(), &x_path).map_err(classify)?;

    let mut flags = Vec::new();
    if config.solver.gamma == 0.0 {
        flags.push("gamma = 0: nuclear-norm ablation".into());
    }
    let report = LearnReport {
        version: env!("CARGO_PKG_VERSION").into(),
        input: args.input.display().to_string(),
        n: y.n(),
        m: y.m(),
        transition: args.transition.clone(),
        transition_coefficients: transition.coeffs().map(|c| c.to_vec()),
        solver: config.solver.clone(),
        tau_edge: config.tau_edge,
        outer_iterations: result.outer_iterations,
        objective_trace: result.objective_trace.clone(),
        edge_count: edges_from_laplacian(&result.l_hat, config.tau_edge).edge_count(),
        flags,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    let report_path = args.out.out.join("report.json");
    save_report(&report, &report_path).map_err(classify)?;

    println!(
        "converged in {} outer iterations; objective {:.6e}",
        result.outer_iterations,
        result.objective_trace.last().copied().unwrap_or(f64::NAN)
    );
    println!("edges: {}", report.edge_count);
    for flag in &report.flags {
        println!("flag: {flag}");
    }
    println!("laplacian: {}", dense_path.display());
    println!("edge list: {}", edges_path.display());
    println!("signal estimate: {}", x_path.display());
    println!("report: {}", report_path.display());
    Ok(())
}

fn run_metrics(args: MetricsArgs) -> std::result::Result<(), Failure> {
    let learned = load_laplacian(&args.learned).map_err(classify)?;
    let truth = load_laplacian(&args.truth).map_err(classify)?;
    let tau = args.tau_edge.unwrap_or(crate::metrics::DEFAULT_TAU_EDGE);
    let report = MetricsReport::compute(&learned, &truth, None, tau).map_err(classify)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| classify(Error::Json(e)))?;
    println!("{json}");
    if let Some(dir) = &args.out {
        ensure_dir(dir).map_err(classify)?;
        let path = dir.join("metrics.json");
        save_report(&report, &path).map_err(classify)?;
    }
    Ok(())
}

fn run_gen(args: GenArgs) -> std::result::Result<(), Failure> {
    let mut config = load_config(&args.config).map_err(classify)?;
    // One dataset unless the user asked for more; the synth default of 20
    // trials is an aggregation count, not a number of files to emit.
    if args.config.config.is_none() && args.config.trials.is_none() {
        config.trials = 1;
    }
    ensure_dir(&args.out.out).map_err(classify)?;
    for index in 0..config.trials {
        let data = generate_trial_data(&config, index).map_err(classify)?;
        let dir = if config.trials == 1 {
            args.out.out.clone()
        } else {
            args.out.out.join(format!("trial_{index:03}"))
        };
        ensure_dir(&dir).map_err(classify)?;
        save_matrix(data.y.array(), &dir.join("y.csv")).map_err(classify)?;
        save_matrix(data.x_true.array(), &dir.join("x_true.csv")).map_err(classify)?;
        save_laplacian(
            &data.laplacian,
            &dir.join("laplacian.csv"),
            &dir.join("laplacian_edges.csv"),
            config.tau_edge,
        )
        .map_err(classify)?;
        save_matrix(&data.transition.dense(), &dir.join("transition.csv")).map_err(classify)?;
        println!("trial {index}: {}", dir.display());
    }
    let config_path = args.out.out.join("config.json");
    save_report(&config, &config_path).map_err(classify)?;
    println!("config: {}", config_path.display());
    Ok(())
}
