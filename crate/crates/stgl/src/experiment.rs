//! Experiment orchestration: synthetic Monte Carlo benchmarks, hyperparameter grid
//! search with shared seeds, and transition-coefficient estimation from data.

use std::time::Instant;

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CglMatrix, Graph};
use crate::metrics::{MetricsReport, DEFAULT_TAU_EDGE};
use crate::signal::SignalMatrix;
use crate::solver::{solve, SolverConfig};
use crate::synth::{generate_grid, generate_rgg, generate_signals};
use crate::transition::{sample_transition, TransitionMatrix, TransitionSpec};

/// Which synthetic graph family a trial draws from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Random geometric graph: uniform coordinates in the unit square, Gaussian
    /// kernel weights `exp(-d^2 / 2 sigma^2)` kept above `threshold`.
    Rgg {
        n: usize,
        #[serde(default = "default_rgg_sigma")]
        sigma: f64,
        #[serde(default = "default_rgg_threshold")]
        threshold: f64,
    },
    /// Nearest-neighbor graph on uniform coordinates: union of `k`-NN links with
    /// inverse-distance weights.
    Grid {
        n: usize,
        #[serde(default = "default_grid_k")]
        k: usize,
    },
}

fn default_rgg_sigma() -> f64 {
    0.5
}
fn default_rgg_threshold() -> f64 {
    0.7
}
fn default_grid_k() -> usize {
    5
}

impl GraphSpec {
    pub fn n(&self) -> usize {
        match self {
            GraphSpec::Rgg { n, .. } | GraphSpec::Grid { n, .. } => *n,
        }
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<Graph> {
        match self {
            GraphSpec::Rgg { n, sigma, threshold } => generate_rgg(*n, *sigma, *threshold, rng),
            GraphSpec::Grid { n, k } => generate_grid(*n, *k, rng),
        }
    }
}

/// Signal-model parameters for one synthetic trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub rank: usize,
    pub m: usize,
    pub sigma_n: f64,
    #[serde(default)]
    pub transition: TransitionSpec,
}

/// Value grids for the hyperparameter sweep; an empty list keeps the solver
/// config's fixed value for that weight.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub gamma: Vec<f64>,
}

impl SweepSpec {
    /// The benchmark grids: alpha over `10^0 .. 10^-2` and beta over `10^2 .. 10^0`,
    /// both with exponent step 0.1 (21 points each; the exponent-step reading of the
    /// stated ranges), gamma over `2^0 .. 2^4.8` with exponent step 0.4 (13 points).
    pub fn benchmark_defaults() -> SweepSpec {
        SweepSpec {
            alpha: (0..=20).map(|k| 10f64.powf(-0.1 * k as f64)).collect(),
            beta: (0..=20).map(|k| 10f64.powf(2.0 - 0.1 * k as f64)).collect(),
            gamma: gamma_grid(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_empty() && self.beta.is_empty() && self.gamma.is_empty() {
            return Err(Error::Config("sweep present but all grids empty".into()));
        }
        for (name, grid) in [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma)] {
            if grid.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Config(format!("sweep grid {name} has invalid values")));
            }
        }
        Ok(())
    }

    /// Cartesian product, lexicographic in (alpha, beta, gamma); missing grids are
    /// pinned to the base config's values.
    pub fn points(&self, base: &SolverConfig) -> Vec<(f64, f64, f64)> {
        let pick = |grid: &Vec<f64>, fixed: f64| -> Vec<f64> {
            if grid.is_empty() {
                vec![fixed]
            } else {
                grid.clone()
            }
        };
        let alphas = pick(&self.alpha, base.alpha);
        let betas = pick(&self.beta, base.beta);
        let gammas = pick(&self.gamma, base.gamma);
        let mut out = Vec::with_capacity(alphas.len() * betas.len() * gammas.len());
        for &a in &alphas {
            for &b in &betas {
                for &g in &gammas {
                    out.push((a, b, g));
                }
            }
        }
        out
    }
}

/// The gamma grid of the nuclear-norm sweep: `2^(0.4 k)` for `k = 0..=12`.
pub fn gamma_grid() -> Vec<f64> {
    (0..=12).map(|k| 2f64.powf(0.4 * k as f64)).collect()
}

/// Everything one synthetic experiment needs: graph family, signal model, solver
/// weights, trial count, base seed, optional sweep grids, and the edge threshold
/// used for scoring.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub signal: SignalSpec,
    pub solver: SolverConfig,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "default_tau")]
    pub tau_edge: f64,
}

fn default_trials() -> usize {
    20
}
fn default_tau() -> f64 {
    DEFAULT_TAU_EDGE
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        if n < 2 {
            return Err(Error::Config(format!("graph needs at least 2 vertices, got {n}")));
        }
        if self.signal.rank == 0 || self.signal.rank > n {
            return Err(Error::Config(format!(
                "rank must be in 1..={n}, got {}",
                self.signal.rank
            )));
        }
        if self.signal.m < 2 {
            return Err(Error::Config(format!(
                "need at least 2 time instants, got {}",
                self.signal.m
            )));
        }
        if !(self.signal.sigma_n >= 0.0) {
            return Err(Error::Config(format!(
                "noise std must be >= 0, got {}",
                self.signal.sigma_n
            )));
        }
        self.signal.transition.validate()?;
        self.solver.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.tau_edge >= 0.0) {
            return Err(Error::Config(format!("tau_edge must be >= 0, got {}", self.tau_edge)));
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        Ok(())
    }
}

/// One Monte Carlo trial's outcome; failures are recorded, not propagated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Index of the trial; its RNG stream is `seed` with stream id `index + 1`.
    pub index: usize,
    pub metrics: Option<MetricsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub objective_trace: Vec<f64>,
    pub outer_iterations: usize,
    pub wall_seconds: f64,
}

/// Per-metric mean and standard deviation over the successful trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub mean: MetricsReport,
    pub std: MetricsReport,
    pub succeeded: usize,
    pub failed: usize,
}

/// Full record of a synthetic run: config echo, per-trial results, aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
    pub wall_seconds: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Runs `config.trials` independent synthetic trials and aggregates their metrics.
///
/// Trial `k` draws, in order, the graph, the transition matrix, and the signals
/// from ChaCha stream `k + 1` of the base seed, then solves and scores against the
/// generated ground truth. Failing trials are recorded and excluded from the
/// aggregates; the run itself only errors on invalid configuration. Trials run in
/// parallel on the global thread pool, folded back in index order.
pub fn run_synthetic(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let started = Instant::now();
    let trials: Vec<TrialRecord> =
        (0..config.trials).into_par_iter().map(|k| run_trial(config, k)).collect();
    let summary = summarize(&trials);
    let mut flags = Vec::new();
    if config.solver.gamma == 0.0 {
        flags.push("gamma = 0: nuclear-norm ablation".into());
    }
    if summary.succeeded == 0 {
        flags.push("all trials failed".into());
    }
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        trials,
        summary,
        wall_seconds: started.elapsed().as_secs_f64(),
        flags,
    })
}

/// Ground truth and observations for one trial, exposed for dataset emission.
pub struct TrialData {
    pub graph: Graph,
    pub laplacian: CglMatrix,
    pub transition: TransitionMatrix,
    pub x_true: SignalMatrix,
    pub y: SignalMatrix,
}

/// Generates trial `index`'s ground truth exactly as [`run_synthetic`] would.
pub fn generate_trial_data(config: &ExperimentConfig, index: usize) -> Result<TrialData> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64 + 1);
    let n = config.graph.n();
    let graph = config.graph.generate(&mut rng)?;
    let laplacian = graph.laplacian().normalize_trace(n as f64)?;
    let transition = sample_transition(&config.signal.transition, n, &mut rng)?;
    let (x_true, y) = generate_signals(
        &laplacian,
        &transition,
        config.signal.rank,
        config.signal.m,
        config.signal.sigma_n,
        &mut rng,
    )?;
    Ok(TrialData { graph, laplacian, transition, x_true, y })
}

fn run_trial(config: &ExperimentConfig, index: usize) -> TrialRecord {
    let started = Instant::now();
    let outcome = generate_trial_data(config, index).and_then(|data| {
        let result = solve(&data.y, &data.transition, &config.solver)?;
        let metrics = MetricsReport::compute(
            &result.l_hat,
            &data.laplacian,
            Some((&result.x_hat, &data.x_true)),
            config.tau_edge,
        )?;
        Ok((metrics, result))
    });
    match outcome {
        Ok((metrics, result)) => TrialRecord {
            index,
            metrics: Some(metrics),
            error: None,
            objective_trace: result.objective_trace,
            outer_iterations: result.outer_iterations,
            wall_seconds: started.elapsed().as_secs_f64(),
        },
        Err(e) => TrialRecord {
            index,
            metrics: None,
            error: Some(e.to_string()),
            objective_trace: Vec::new(),
            outer_iterations: 0,
            wall_seconds: started.elapsed().as_secs_f64(),
        },
    }
}

fn summarize(trials: &[TrialRecord]) -> Summary {
    let metrics: Vec<&MetricsReport> = trials.iter().filter_map(|t| t.metrics.as_ref()).collect();
    let field = |get: &dyn Fn(&MetricsReport) -> Option<f64>| -> (Option<f64>, Option<f64>) {
        let values: Vec<f64> = metrics.iter().filter_map(|m| get(m)).collect();
        if values.is_empty() {
            return (None, None);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        (Some(mean), Some(var.sqrt()))
    };
    let (p_m, p_s) = field(&|m| m.precision);
    let (r_m, r_s) = field(&|m| m.recall);
    let (f_m, f_s) = field(&|m| m.f_measure);
    let (n_m, n_s) = field(&|m| m.nmi);
    let (g_m, g_s) = field(&|m| m.gse);
    let (l_m, l_s) = field(&|m| m.lce);
    let make = |p, r, f, n, g, l| MetricsReport {
        precision: p,
        recall: r,
        f_measure: f,
        nmi: n,
        gse: g,
        lce: l,
        flags: Vec::new(),
    };
    Summary {
        mean: make(p_m, r_m, f_m, n_m, g_m, l_m),
        std: make(p_s, r_s, f_s, n_s, g_s, l_s),
        succeeded: metrics.len(),
        failed: trials.len() - metrics.len(),
    }
}

/// One evaluated grid point of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Grid-search outcome: the winning weights (as a full solver config) plus the
/// complete table, one row per grid point in evaluation order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub best: SolverConfig,
    pub table: Vec<SweepRow>,
    pub wall_seconds: f64,
}

/// Evaluates every sweep grid point with shared trial seeds and picks the one
/// maximizing mean F-measure; ties break toward lower mean GSE, then
/// lexicographically smaller (alpha, beta, gamma).
///
/// Grid points whose runs fail entirely are kept in the table with their error and
/// excluded from selection. Errors only if no point produced a usable aggregate.
pub fn grid_search(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("grid search needs a sweep specification".into()))?;
    let started = Instant::now();
    struct Best {
        f: f64,
        gse: f64,
        point: (f64, f64, f64),
    }
    let mut table = Vec::new();
    let mut best: Option<Best> = None;
    for point @ (alpha, beta, gamma) in sweep.points(&config.solver) {
        let mut point_config = config.clone();
        point_config.sweep = None;
        point_config.solver.alpha = alpha;
        point_config.solver.beta = beta;
        point_config.solver.gamma = gamma;
        let row = match run_synthetic(&point_config) {
            Ok(report) => SweepRow { alpha, beta, gamma, summary: report.summary, error: None },
            Err(e) => {
                SweepRow { alpha, beta, gamma, summary: summarize(&[]), error: Some(e.to_string()) }
            }
        };
        if row.error.is_none() {
            if let (Some(f), Some(g)) = (row.summary.mean.f_measure, row.summary.mean.gse) {
                let better = match &best {
                    None => true,
                    Some(b) => {
                        f > b.f
                            || (f == b.f && g < b.gse)
                            || (f == b.f && g == b.gse && point < b.point)
                    }
                };
                if better {
                    best = Some(Best { f, gse: g, point });
                }
            }
        }
        table.push(row);
    }
    let best =
        best.ok_or_else(|| Error::Validation("no sweep point produced a usable aggregate".into()))?;
    let mut chosen = config.solver.clone();
    chosen.alpha = best.point.0;
    chosen.beta = best.point.1;
    chosen.gamma = best.point.2;
    Ok(SweepReport {
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        best: chosen,
        table,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Per-vertex transition coefficients from lag-1 autocorrelations.
///
/// Each row's coefficient is the mean-removed, biased lag-1 autocorrelation
/// (lag-1 autocovariance over lag-0), clamped into `[0, 1)`. Needs at least 3
/// instants; a zero-variance row is an error naming the row.
pub fn estimate_transition_acf(y: &SignalMatrix) -> Result<TransitionMatrix> {
    if y.m() < 3 {
        return Err(Error::Validation(format!(
            "ACF estimation needs at least 3 instants, got {}",
            y.m()
        )));
    }
    let mut coeffs = Array1::zeros(y.n());
    for (i, row) in y.array().rows().into_iter().enumerate() {
        let mean = row.sum() / row.len() as f64;
        let c0: f64 = row.iter().map(|v| (v - mean) * (v - mean)).sum();
        if c0 <= 0.0 {
            return Err(Error::Data(format!("row {i} has zero variance; cannot estimate ACF")));
        }
        let c1: f64 =
            row.iter().zip(row.iter().skip(1)).map(|(a, b)| (a - mean) * (b - mean)).sum();
        coeffs[i] = (c1 / c0).clamp(0.0, 1.0 - 1e-12);
    }
    TransitionMatrix::diagonal(coeffs)
}
