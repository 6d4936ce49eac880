//! The quadratic X-subproblem of the low-rank ADMM, and the nuclear-norm prox.
//!
//! With the graph fixed, the augmented Lagrangian in X is the strictly convex quadratic
//!
//! ```text
//! f(X) = ||D(X - Y)||_F^2 + alpha tr(D(X)^T L D(X)) + <Q, X - P> + (rho/2) ||X - P||_F^2
//! ```
//!
//! minimized either by conjugate gradients with exact line search (matrix-free, the
//! production path) or by materializing the vectorized normal equations (the oracle
//! path for small instances).

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::{diff_op, diff_op_adjoint};
use crate::transition::TransitionMatrix;

/// One X-update's worth of fixed data: everything in `f` except `X` itself.
pub struct XSubproblem<'a> {
    y: &'a Array2<f64>,
    l: &'a Array2<f64>,
    r: &'a TransitionMatrix,
    p: &'a Array2<f64>,
    q: &'a Array2<f64>,
    rho: f64,
    alpha: f64,
    dy: Array2<f64>,
}

/// Iteration count and final gradient norm of a conjugate-gradient minimization.
#[derive(Debug, Clone, Copy)]
pub struct CgRun {
    pub iterations: usize,
    pub gradient_norm: f64,
}

impl<'a> XSubproblem<'a> {
    pub fn new(
        y: &'a Array2<f64>,
        l: &'a Array2<f64>,
        r: &'a TransitionMatrix,
        p: &'a Array2<f64>,
        q: &'a Array2<f64>,
        rho: f64,
        alpha: f64,
    ) -> Result<XSubproblem<'a>> {
        let (n, m) = y.dim();
        if l.dim() != (n, n) {
            return Err(Error::Dimension(format!(
                "Laplacian {}x{} vs {n} vertices",
                l.nrows(),
                l.ncols()
            )));
        }
        if r.n() != n || p.dim() != (n, m) || q.dim() != (n, m) {
            return Err(Error::Dimension(format!(
                "X-subproblem shapes disagree: y {n}x{m}, r {}, p {:?}, q {:?}",
                r.n(),
                p.dim(),
                q.dim()
            )));
        }
        if !(rho >= 0.0) || !(alpha >= 0.0) {
            return Err(Error::Config(format!("rho and alpha must be >= 0, got {rho}, {alpha}")));
        }
        let dy = diff_op(y, r);
        Ok(XSubproblem { y, l, r, p, q, rho, alpha, dy })
    }

    /// Objective value at `x`.
    pub fn value(&self, x: &Array2<f64>) -> f64 {
        let dx = diff_op(x, self.r);
        let fid: f64 = dx.iter().zip(self.dy.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        let ldx = self.l.dot(&dx);
        let smooth: f64 = dx.iter().zip(ldx.iter()).map(|(a, b)| a * b).sum();
        let diff = x - self.p;
        let coupling: f64 = self.q.iter().zip(diff.iter()).map(|(a, b)| a * b).sum();
        let prox: f64 = diff.iter().map(|v| v * v).sum();
        fid + self.alpha * smooth + coupling + 0.5 * self.rho * prox
    }

    /// Gradient at `x`:
    /// `2 D(X-Y) - 2 R D(X-Y) B^T + 2 alpha (L D(X) - R L D(X) B^T) + rho (X - P) + Q`,
    /// i.e. the adjoint `D*` applied to `2 (D(X) - D(Y)) + 2 alpha L D(X)`.
    pub fn gradient(&self, x: &Array2<f64>) -> Array2<f64> {
        let dx = diff_op(x, self.r);
        let mut inner = (&dx - &self.dy) * 2.0;
        if self.alpha != 0.0 {
            inner += &(self.l.dot(&dx) * (2.0 * self.alpha));
        }
        let mut g = diff_op_adjoint(&inner, self.r);
        g.zip_mut_with(x, |gi, xi| *gi += self.rho * xi);
        g.zip_mut_with(self.p, |gi, pi| *gi -= self.rho * pi);
        g += self.q;
        g
    }

    /// The quadratic form's linear map applied to a direction:
    /// `A v = 2 D*(D(v)) + 2 alpha D*(L D(v)) + rho v`, so that
    /// `A v = gradient(x + v) - gradient(x)` for every `x`.
    pub fn apply_curvature(&self, v: &Array2<f64>) -> Array2<f64> {
        let dv = diff_op(v, self.r);
        let mut inner = &dv * 2.0;
        if self.alpha != 0.0 {
            inner += &(self.l.dot(&dv) * (2.0 * self.alpha));
        }
        let mut av = diff_op_adjoint(&inner, self.r);
        av.zip_mut_with(v, |a, b| *a += self.rho * b);
        av
    }

    /// Conjugate gradients with exact line search and Fletcher-Reeves restarts.
    ///
    /// Starts at `x0` (zero when absent), stops when the gradient norm drops below
    /// `delta * max(1, ||g(x0)||_F)` or after `k_max` iterations. The stepsize comes
    /// from the exact quadratic line minimization `mu = -<d, g> / <d, A d>`.
    pub fn minimize_cg(
        &self,
        x0: Option<&Array2<f64>>,
        delta: f64,
        k_max: usize,
    ) -> Result<(Array2<f64>, CgRun)> {
        let mut x = match x0 {
            Some(x0) => x0.clone(),
            None => Array2::zeros(self.y.dim()),
        };
        let mut g = self.gradient(&x);
        let mut g_norm2: f64 = g.iter().map(|v| v * v).sum();
        let threshold = delta * g_norm2.sqrt().max(1.0);
        let threshold2 = threshold * threshold;
        if g_norm2 <= threshold2 {
            return Ok((x, CgRun { iterations: 0, gradient_norm: g_norm2.sqrt() }));
        }
        let mut d = -&g;
        for iter in 1..=k_max {
            let ad = self.apply_curvature(&d);
            let curvature: f64 = d.iter().zip(ad.iter()).map(|(a, b)| a * b).sum();
            if !curvature.is_finite() || curvature <= 0.0 {
                return Err(Error::Convergence {
                    method: "cg x-update (non-positive curvature)",
                    iterations: iter,
                    residual: curvature,
                });
            }
            let dg: f64 = d.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
            let mu = -dg / curvature;
            x.zip_mut_with(&d, |xi, di| *xi += mu * di);
            if iter % 50 == 0 {
                // Fresh gradient occasionally, against recurrence drift.
                g = self.gradient(&x);
            } else {
                g.zip_mut_with(&ad, |gi, ai| *gi += mu * ai);
            }
            let new_norm2: f64 = g.iter().map(|v| v * v).sum();
            if new_norm2 <= threshold2 {
                return Ok((x, CgRun { iterations: iter, gradient_norm: new_norm2.sqrt() }));
            }
            let theta = new_norm2 / g_norm2; // Fletcher-Reeves
            g_norm2 = new_norm2;
            d = d * theta - &g;
        }
        Ok((x, CgRun { iterations: k_max, gradient_norm: g_norm2.sqrt() }))
    }

    /// Closed-form minimizer via the vectorized normal equations; the small-instance
    /// oracle path, refusing shapes with `n * m > cap`.
    ///
    /// Materializes the block-bidiagonal difference operator `T` (identity blocks on
    /// the diagonal, `-R` on the superdiagonal) and solves
    /// `(2 T T^T + 2 alpha T (I_M (x) L) T^T + rho I) vec(X) = vec(rho P - Q) + 2 T T^T vec(Y)`.
    pub fn solve_direct(&self, cap: usize) -> Result<Array2<f64>> {
        let (n, m) = self.y.dim();
        let nm = n * m;
        if nm > cap {
            return Err(Error::Config(format!(
                "closed-form path supports n*m <= {cap}, got {nm}; use minimize_cg"
            )));
        }
        if self.rho == 0.0 {
            // The quadratic can be singular without the prox term (e.g. alpha = 0 and
            // a transition with unit coefficients); the iterative path handles that.
            return Err(Error::Config("closed-form path requires rho > 0".into()));
        }
        let t = self.difference_operator();
        let ttt = t.dot(&t.t());
        // I_M (x) L, block diagonal.
        let mut kron = Array2::zeros((nm, nm));
        for b in 0..m {
            for i in 0..n {
                for j in 0..n {
                    kron[[b * n + i, b * n + j]] = self.l[[i, j]];
                }
            }
        }
        let mut a = &ttt * 2.0 + &t.dot(&kron).dot(&t.t()) * (2.0 * self.alpha);
        for i in 0..nm {
            a[[i, i]] += self.rho;
        }
        let rhs_mat = self.p * self.rho - self.q;
        let rhs = &ttt.dot(&vec_columns(self.y)) * 2.0 + &vec_columns(&rhs_mat);
        let x_vec = linalg::solve_linear(&a, &rhs)?;
        Ok(unvec_columns(&x_vec, n, m))
    }

    // T is NM x NM over column-stacked vectors: T^T vec(X) = vec(D(X)).
    fn difference_operator(&self) -> Array2<f64> {
        let (n, m) = self.y.dim();
        let r_dense = self.r.dense();
        let mut t = Array2::zeros((n * m, n * m));
        for b in 0..m {
            for i in 0..n {
                t[[b * n + i, b * n + i]] = 1.0;
            }
            if b + 1 < m {
                for i in 0..n {
                    for j in 0..n {
                        t[[b * n + i, (b + 1) * n + j]] = -r_dense[[i, j]];
                    }
                }
            }
        }
        t
    }
}

fn vec_columns(x: &Array2<f64>) -> Array1<f64> {
    let (n, m) = x.dim();
    Array1::from_shape_fn(n * m, |k| x[[k % n, k / n]])
}

fn unvec_columns(v: &Array1<f64>, n: usize, m: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, m), |(i, t)| v[t * n + i])
}

/// Singular value thresholding: soft-thresholds the singular values by `tau`,
/// the proximal operator of `tau * ||.||_*`.
pub fn svt(m: &Array2<f64>, tau: f64) -> Result<Array2<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::Config(format!("svt threshold must be >= 0, got {tau}")));
    }
    if let Some((idx, v)) = m.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite(format!("svt input at {idx:?} is {v}")));
    }
    let (u, s, vt) = linalg::svd_full(m)?;
    let k = s.len();
    let mut scaled = u.slice(ndarray::s![.., ..k]).to_owned();
    for (mut col, &sigma) in scaled.columns_mut().into_iter().zip(s.iter()) {
        let kept = (sigma - tau).max(0.0);
        col.mapv_inplace(|v| v * kept);
    }
    Ok(scaled.dot(&vt.slice(ndarray::s![..k, ..])))
}

/// Sum of singular values.
pub fn nuclear_norm(m: &Array2<f64>) -> Result<f64> {
    Ok(linalg::singular_values(m)?.sum())
}
