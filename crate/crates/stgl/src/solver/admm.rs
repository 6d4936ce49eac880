//! The two inner ADMM solvers of the alternating scheme: graph refinement with the
//! signal estimate fixed, and low-rank signal estimation with the graph fixed.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::CglMatrix;
use crate::signal::{diff_op, SignalMatrix};
use crate::transition::TransitionMatrix;

use super::projection::project_cgl;
use super::xstep::{svt, XSubproblem};
use super::SolverConfig;

/// Scaled dual and splitting variables carried between calls to warm-start the
/// graph ADMM.
#[derive(Debug, Clone)]
pub struct GraphState {
    z: Array2<f64>,
    xi: Array2<f64>,
}

/// Splitting variables carried between calls to warm-start the low-rank ADMM.
/// `x` additionally seeds the conjugate-gradient subproblem.
#[derive(Debug, Clone)]
pub struct LowrankState {
    p: Array2<f64>,
    q: Array2<f64>,
    x: Array2<f64>,
}

/// Iterations and final residuals of one inner ADMM run.
#[derive(Debug, Clone, Copy)]
pub struct AdmmRun {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Total conjugate-gradient iterations across the run (zero for the graph ADMM).
    pub cg_iterations: usize,
}

/// Minimizes `alpha tr(D(X)^T L D(X)) + beta ||L||_F^2` over fixed-trace CGLs.
///
/// ADMM splitting `L = Z` with `Z` constrained to the CGL set: the L-update is the
/// closed form `(rho Z + Xi - alpha D(X) D(X)^T) / (2 beta + rho)`, the Z-update a
/// Dykstra projection, and the stopping rule bounds both `||Z - L||_F` and the
/// scaled dual change `rho ||Z_k+1 - Z_k||_F` by `tol_admm`.
pub fn refine_graph(
    x: &SignalMatrix,
    r: &TransitionMatrix,
    cfg: &SolverConfig,
    warm: Option<GraphState>,
) -> Result<(CglMatrix, GraphState, AdmmRun)> {
    cfg.validate()?;
    let n = x.n();
    if r.n() != n {
        return Err(Error::Dimension(format!("transition size {} vs {} vertices", r.n(), n)));
    }
    let dx = diff_op(x.array(), r);
    let mut s = dx.dot(&dx.t());
    s = (&s + &s.t()) * 0.5;
    let rho = cfg.rho;
    let denom = 2.0 * cfg.beta + rho;
    let (mut z, mut xi) = match warm {
        Some(state) if state.z.dim() == (n, n) => (state.z, state.xi),
        _ => (Array2::zeros((n, n)), Array2::zeros((n, n))),
    };
    let mut best: Option<CglMatrix> = None;
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    for k in 1..=cfg.k_admm {
        iterations = k;
        let l = (&(&z * rho) + &xi - &(&s * cfg.alpha)) / denom;
        if !l.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("graph ADMM iterate at iteration {k}")));
        }
        let target = &l - &(&xi / rho);
        let z_cgl = project_cgl(&target, n as f64, cfg.proj_tol, cfg.proj_max_iter)?;
        let z_new = z_cgl.matrix().clone();
        primal = frob(&(&z_new - &l));
        dual = rho * frob(&(&z_new - &z));
        xi = &xi + &((&z_new - &l) * rho);
        z = z_new;
        best = Some(z_cgl);
        if primal.max(dual) < cfg.tol_admm {
            break;
        }
    }
    let l_hat = best.expect("k_admm >= 1 guarantees at least one iterate");
    Ok((
        l_hat,
        GraphState { z, xi },
        AdmmRun { iterations, primal_residual: primal, dual_residual: dual, cg_iterations: 0 },
    ))
}

/// Minimizes `||D(X - Y)||_F^2 + alpha tr(D(X)^T L D(X)) + gamma ||X||_*`.
///
/// ADMM splitting `X = P` with the nuclear norm on `P`: the X-update is the
/// conjugate-gradient quadratic solve, the P-update singular value thresholding at
/// `gamma / rho`, and the stopping rule mirrors the graph ADMM's.
pub fn estimate_lowrank(
    y: &SignalMatrix,
    l: &CglMatrix,
    r: &TransitionMatrix,
    cfg: &SolverConfig,
    warm: Option<LowrankState>,
) -> Result<(SignalMatrix, LowrankState, AdmmRun)> {
    cfg.validate()?;
    let (n, m) = (y.n(), y.m());
    if l.n() != n || r.n() != n {
        return Err(Error::Dimension(format!(
            "low-rank ADMM shapes disagree: y has {n} rows, l {}, r {}",
            l.n(),
            r.n()
        )));
    }
    let rho = cfg.rho;
    let (mut p, mut q, mut x) = match warm {
        Some(state) if state.p.dim() == (n, m) => (state.p, state.q, state.x),
        _ => (y.array().clone(), Array2::zeros((n, m)), y.array().clone()),
    };
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    let mut cg_total = 0;
    for k in 1..=cfg.k_admm {
        iterations = k;
        let sub = XSubproblem::new(y.array(), l.matrix(), r, &p, &q, rho, cfg.alpha)?;
        let (x_new, run) = sub.minimize_cg(Some(&x), cfg.delta_cg, cfg.k_cg)?;
        cg_total += run.iterations;
        x = x_new;
        let p_new = svt(&(&x + &(&q / rho)), cfg.gamma / rho)?;
        primal = frob(&(&x - &p_new));
        dual = rho * frob(&(&p_new - &p));
        q = &q + &((&x - &p_new) * rho);
        p = p_new;
        if primal.max(dual) < cfg.tol_admm {
            break;
        }
    }
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "low-rank ADMM output after {iterations} iterations"
        )));
    }
    let estimate = SignalMatrix::new(p.clone())?;
    Ok((
        estimate,
        LowrankState { p, q, x },
        AdmmRun {
            iterations,
            primal_residual: primal,
            dual_residual: dual,
            cg_iterations: cg_total,
        },
    ))
}

fn frob(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}
