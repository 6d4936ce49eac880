//! Projection onto the constraint set of combinatorial graph Laplacians with a
//! fixed trace: symmetric, nonpositive off-diagonals, zero row sums, trace = target.
//!
//! Dykstra's alternating projections between the sign cone and the affine set of
//! the linear constraints. Both partial projections are closed-form, and the affine
//! set needs no Dykstra correction, so one cycle is two O(n^2) passes.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::{CglMatrix, CGL_ROWSUM_TOL};

/// Nearest matrix (Frobenius) in the fixed-trace CGL set.
///
/// `m` must be symmetric up to roundoff; it is symmetrized before iterating.
/// Convergence requires both the cycle delta to drop below `tol` and the candidate
/// to satisfy the CGL constraints at construction tolerances, so a returned value
/// always validates. Inputs already in the set come back unchanged within `tol`.
pub fn project_cgl(
    m: &Array2<f64>,
    target_trace: f64,
    tol: f64,
    max_iter: usize,
) -> Result<CglMatrix> {
    let n = m.nrows();
    if m.ncols() != n || n < 2 {
        return Err(Error::Dimension(format!(
            "projection needs a square matrix with n >= 2, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if !(target_trace > 0.0) || !target_trace.is_finite() {
        return Err(Error::Validation(format!(
            "target trace must be positive and finite, got {target_trace}"
        )));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::Config(format!(
            "projection needs tol > 0 and max_iter >= 1, got {tol}, {max_iter}"
        )));
    }
    let scale = m.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1.0);
    let mut worst_asym = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            if !m[[i, j]].is_finite() || !m[[j, i]].is_finite() {
                return Err(Error::NonFinite(format!("projection input at ({i},{j})")));
            }
            worst_asym = worst_asym.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    if worst_asym > 1e-8 * scale {
        return Err(Error::Validation(format!("projection input asymmetric by {worst_asym:.3e}")));
    }

    let mut v = (m + &m.t()) * 0.5;
    // Dykstra correction for the sign cone; the affine set, being affine, needs none.
    let mut p = Array2::<f64>::zeros((n, n));
    let mut y_prev: Option<Array2<f64>> = None;
    let mut delta = f64::INFINITY;
    for _ in 0..max_iter {
        let u = project_affine(&v, target_trace);
        let mut y = &u + &p;
        clamp_positive_offdiag(&mut y);
        p = &u + &p - &y;
        if let Some(prev) = &y_prev {
            delta = y.iter().zip(prev.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if delta <= tol && candidate_feasible(&y, target_trace) {
                return CglMatrix::new(y);
            }
        }
        y_prev = Some(y.clone());
        v = y;
    }
    Err(Error::Convergence { method: "cgl projection", iterations: max_iter, residual: delta })
}

/// Exact projection onto `{A symmetric : A 1 = 0, tr(A) = target}`.
///
/// The residual must lie in the span of the constraint normals,
/// `mu 1^T + 1 mu^T + nu I`; matching row sums and trace gives a 2x2 system for
/// the scalars and a closed form for `mu`.
pub(crate) fn project_affine(m: &Array2<f64>, target_trace: f64) -> Array2<f64> {
    let n = m.nrows();
    let nf = n as f64;
    let s: Array1<f64> = m.rows().into_iter().map(|r| r.sum()).collect();
    let total = s.sum();
    let trace: f64 = m.diag().sum();
    let sigma = (total - trace + target_trace) / (2.0 * nf - 2.0);
    let nu = (total - 2.0 * nf * sigma) / nf;
    let mu: Array1<f64> = s.mapv(|si| (si - (sigma + nu)) / nf);
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] -= mu[i] + mu[j];
        }
        out[[i, i]] -= nu;
    }
    out
}

fn clamp_positive_offdiag(m: &mut Array2<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            if i != j && m[[i, j]] > 0.0 {
                m[[i, j]] = 0.0;
            }
        }
    }
}

// Stricter than CglMatrix's own tolerances so the final construction cannot fail.
fn candidate_feasible(y: &Array2<f64>, target_trace: f64) -> bool {
    let worst_row = y.rows().into_iter().map(|r| r.sum().abs()).fold(0.0_f64, f64::max);
    let trace: f64 = y.diag().sum();
    worst_row <= 0.5 * CGL_ROWSUM_TOL
        && (trace - target_trace).abs() <= 1e-8 * target_trace.max(1.0)
}
