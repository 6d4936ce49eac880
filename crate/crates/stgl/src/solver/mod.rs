//! Joint estimation of a graph Laplacian and a low-rank signal component from
//! noisy spatiotemporal observations.
//!
//! The objective couples a fidelity term on weighted time differences, graph
//! smoothness of those differences, a Frobenius penalty on the Laplacian, and a
//! nuclear-norm penalty on the signal estimate:
//!
//! ```text
//! Q(L, X) = ||D(X - Y)||_F^2 + alpha tr(D(X)^T L D(X)) + beta ||L||_F^2 + gamma ||X||_*
//! ```
//!
//! [`solve`] alternates the two inner ADMM solvers ([`refine_graph`],
//! [`estimate_lowrank`]) from `X^0 = Y` until the objective stalls.

mod admm;
mod projection;
mod xstep;

pub use admm::{estimate_lowrank, refine_graph, AdmmRun, GraphState, LowrankState};
pub use projection::project_cgl;
pub use xstep::{nuclear_norm, svt, CgRun, XSubproblem};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CglMatrix;
use crate::signal::{weighted_difference, SignalMatrix};
use crate::transition::TransitionMatrix;

/// Regularization weights and iteration budgets for [`solve`] and the inner solvers.
///
/// `alpha` scales graph smoothness, `beta` the Laplacian norm, `gamma` the nuclear
/// norm (zero disables the low-rank prior), `rho` the ADMM penalty. The remaining
/// fields are stopping tolerances and iteration caps; defaults suit the benchmark
/// scales in this crate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_k_outer")]
    pub k_outer: usize,
    #[serde(default = "default_eps_outer")]
    pub eps_outer: f64,
    #[serde(default = "default_k_cg")]
    pub k_cg: usize,
    #[serde(default = "default_delta_cg")]
    pub delta_cg: f64,
    #[serde(default = "default_tol_admm")]
    pub tol_admm: f64,
    #[serde(default = "default_k_admm")]
    pub k_admm: usize,
    #[serde(default = "default_proj_tol")]
    pub proj_tol: f64,
    #[serde(default = "default_proj_max_iter")]
    pub proj_max_iter: usize,
    /// Carry inner ADMM states across outer iterations instead of restarting cold.
    #[serde(default = "default_warm_start")]
    pub warm_start: bool,
}

fn default_rho() -> f64 {
    1.0
}
fn default_k_outer() -> usize {
    50
}
fn default_eps_outer() -> f64 {
    1e-4
}
fn default_k_cg() -> usize {
    500
}
fn default_delta_cg() -> f64 {
    1e-6
}
fn default_tol_admm() -> f64 {
    1e-6
}
fn default_k_admm() -> usize {
    200
}
fn default_proj_tol() -> f64 {
    1e-8
}
fn default_proj_max_iter() -> usize {
    1000
}
fn default_warm_start() -> bool {
    true
}

impl SolverConfig {
    /// Spec'd defaults around the three regularization weights.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> SolverConfig {
        SolverConfig { alpha, beta, gamma, ..SolverConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::Config(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::Config(format!("rho must be positive, got {}", self.rho)));
        }
        for (name, v) in [
            ("eps_outer", self.eps_outer),
            ("delta_cg", self.delta_cg),
            ("tol_admm", self.tol_admm),
            ("proj_tol", self.proj_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("k_outer", self.k_outer),
            ("k_cg", self.k_cg),
            ("k_admm", self.k_admm),
            ("proj_max_iter", self.proj_max_iter),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            alpha: 0.1,
            beta: 10.0,
            gamma: 1.0,
            rho: default_rho(),
            k_outer: default_k_outer(),
            eps_outer: default_eps_outer(),
            k_cg: default_k_cg(),
            delta_cg: default_delta_cg(),
            tol_admm: default_tol_admm(),
            k_admm: default_k_admm(),
            proj_tol: default_proj_tol(),
            proj_max_iter: default_proj_max_iter(),
            warm_start: default_warm_start(),
        }
    }
}

/// Inner-solver diagnostics for one outer iteration.
#[derive(Debug, Clone, Copy)]
pub struct OuterTrace {
    pub graph: AdmmRun,
    pub lowrank: AdmmRun,
}

/// Output of [`solve`]: the learned Laplacian, the signal estimate, and the
/// per-outer-iteration objective and residual traces.
#[derive(Debug, Clone)]
pub struct SolverResult {
    pub l_hat: CglMatrix,
    pub x_hat: SignalMatrix,
    pub objective_trace: Vec<f64>,
    pub inner_traces: Vec<OuterTrace>,
    pub outer_iterations: usize,
}

/// The joint objective `Q(L, X)` for given data and weights.
pub fn objective(
    l: &CglMatrix,
    x: &SignalMatrix,
    y: &SignalMatrix,
    r: &TransitionMatrix,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<f64> {
    if x.n() != y.n() || x.m() != y.m() {
        return Err(Error::Dimension(format!(
            "x is {}x{}, y is {}x{}",
            x.n(),
            x.m(),
            y.n(),
            y.m()
        )));
    }
    let residual = SignalMatrix::new(x.array() - y.array())?;
    let d_res = weighted_difference(&residual, r)?;
    let fidelity: f64 = d_res.array().iter().map(|v| v * v).sum();
    let smooth = l.spatiotemporal_smoothness(x, r)?;
    let l_norm2: f64 = l.matrix().iter().map(|v| v * v).sum();
    let nuclear = if gamma > 0.0 { nuclear_norm(x.array())? } else { 0.0 };
    Ok(fidelity + alpha * smooth + beta * l_norm2 + gamma * nuclear)
}

/// Alternating minimization of `Q` from `X^0 = Y`.
///
/// Each outer iteration refines the graph with `X` fixed, then re-estimates `X`
/// with the graph fixed, and records `Q(L^k, X^k)`. Stops when the objective
/// changes by less than `eps_outer` between consecutive outer iterations, or at
/// `k_outer`. Requires at least two observation instants.
pub fn solve(y: &SignalMatrix, r: &TransitionMatrix, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    if y.m() < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 observation instants, got {}",
            y.m()
        )));
    }
    if r.n() != y.n() {
        return Err(Error::Dimension(format!("transition size {} vs {} vertices", r.n(), y.n())));
    }
    let mut x = SignalMatrix::new(y.array().clone())?;
    let mut graph_state: Option<GraphState> = None;
    let mut lowrank_state: Option<LowrankState> = None;
    let mut objective_trace = Vec::new();
    let mut inner_traces = Vec::new();
    let mut l_hat: Option<CglMatrix> = None;
    let mut outer_iterations = 0;
    for k in 1..=cfg.k_outer {
        outer_iterations = k;
        let (l, gs, g_run) = refine_graph(&x, r, cfg, graph_state.take())?;
        let (x_new, ls, x_run) = estimate_lowrank(y, &l, r, cfg, lowrank_state.take())?;
        if cfg.warm_start {
            graph_state = Some(gs);
            lowrank_state = Some(ls);
        }
        x = x_new;
        let q = objective(&l, &x, y, r, cfg.alpha, cfg.beta, cfg.gamma)?;
        if !q.is_finite() {
            return Err(Error::NonFinite(format!("objective at outer iteration {k}")));
        }
        l_hat = Some(l);
        inner_traces.push(OuterTrace { graph: g_run, lowrank: x_run });
        objective_trace.push(q);
        let len = objective_trace.len();
        if len >= 2 && (objective_trace[len - 1] - objective_trace[len - 2]).abs() < cfg.eps_outer {
            break;
        }
    }
    let l_hat = l_hat.expect("k_outer >= 1 guarantees at least one outer iteration");
    let trace_target = y.n() as f64;
    if (l_hat.trace() - trace_target).abs() > 1e-6 * trace_target {
        return Err(Error::Validation(format!(
            "learned Laplacian trace {} drifted from {trace_target}",
            l_hat.trace()
        )));
    }
    Ok(SolverResult { l_hat, x_hat: x, objective_trace, inner_traces, outer_iterations })
}
