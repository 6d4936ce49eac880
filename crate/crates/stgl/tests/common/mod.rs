//! Shared oracles and fixtures for the integration suites.
//!
//! Everything here solves the same problems as the library by an independent
//! route: explicit quadratic programs over edge weights, finite differences,
//! and long-run first-order methods.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use stgl::linalg;

/// Enumerates the unordered vertex pairs of an `n`-vertex graph.
pub fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Elementary Laplacian of a single unit-weight edge: L(i,i) = L(j,j) = 1,
/// L(i,j) = L(j,i) = -1.
pub fn edge_laplacian(n: usize, i: usize, j: usize) -> Array2<f64> {
    let mut e = Array2::zeros((n, n));
    e[[i, i]] = 1.0;
    e[[j, j]] = 1.0;
    e[[i, j]] = -1.0;
    e[[j, i]] = -1.0;
    e
}

/// Solves min_w 1/2 w'Aw + b'w subject to w >= 0 and 2 sum(w) = tau by
/// enumerating active sets over the edge weights.
///
/// Every Laplacian with zero row sums, symmetric structure, and nonpositive
/// off-diagonals is a nonnegative combination of single-edge Laplacians, so any
/// quadratic objective over that set becomes this program in the weight vector.
/// For each subset of weights pinned to zero, the KKT equalities are solved
/// directly; the first candidate that is primal and dual feasible is the
/// optimum (the program is convex). `A` must be positive definite on the
/// feasible subspace.
pub fn qp_over_edge_weights(a: &Array2<f64>, b: &Array1<f64>, tau: f64) -> Array1<f64> {
    let p = b.len();
    assert!(p <= 16, "active-set enumeration is exponential in the pair count");
    assert_eq!(a.dim(), (p, p));
    let mut best: Option<(f64, Array1<f64>)> = None;
    for mask in 0u32..(1 << p) {
        let free: Vec<usize> = (0..p).filter(|k| mask & (1 << k) == 0).collect();
        if free.is_empty() {
            continue;
        }
        // KKT system in the free weights plus the multiplier of 2 sum(w) = tau:
        // A_ff w_f + b_f + 2 lambda = 0, 2 sum(w_f) = tau.
        let f = free.len();
        let mut kkt = Array2::zeros((f + 1, f + 1));
        let mut rhs = Array1::zeros(f + 1);
        for (r, &i) in free.iter().enumerate() {
            for (c, &j) in free.iter().enumerate() {
                kkt[[r, c]] = a[[i, j]];
            }
            kkt[[r, f]] = 2.0;
            kkt[[f, r]] = 2.0;
            rhs[r] = -b[i];
        }
        rhs[f] = tau;
        let Ok(sol) = kkt.solve(&rhs) else { continue };
        let lambda = sol[f];
        let mut w = Array1::zeros(p);
        for (r, &i) in free.iter().enumerate() {
            w[i] = sol[r];
        }
        // Primal feasibility on the free weights.
        if w.iter().any(|v| *v < -1e-12 || !v.is_finite()) {
            continue;
        }
        // Dual feasibility on the pinned weights: gradient + 2 lambda >= 0.
        let grad = a.dot(&w) + b;
        let dual_ok =
            (0..p).filter(|k| mask & (1 << k) != 0).all(|k| grad[k] + 2.0 * lambda >= -1e-9);
        if !dual_ok {
            continue;
        }
        let value = 0.5 * w.dot(&a.dot(&w)) + b.dot(&w);
        match &best {
            Some((v, _)) if *v <= value => {}
            _ => best = Some((value, w)),
        }
    }
    best.expect("no KKT-feasible active set; the program should always be solvable").1
}

/// Assembles a Laplacian from edge weights in `vertex_pairs` order.
pub fn laplacian_from_weights(n: usize, w: &Array1<f64>) -> Array2<f64> {
    let mut l = Array2::zeros((n, n));
    for (k, (i, j)) in vertex_pairs(n).into_iter().enumerate() {
        l = l + w[k] * &edge_laplacian(n, i, j);
    }
    l
}

/// Projection of a symmetric matrix onto the valid-Laplacian set with the
/// given trace, via the edge-weight quadratic program.
///
/// min ||L(w) - M||_F^2 expands to 1/2 w'(2G)w + (-2c)'w + const, where G is
/// the Gram matrix of the edge Laplacians and c_k = <E_k, M>.
pub fn project_cgl_oracle(m: &Array2<f64>, tau: f64) -> Array2<f64> {
    let n = m.nrows();
    let pairs = vertex_pairs(n);
    let p = pairs.len();
    let mut gram = Array2::zeros((p, p));
    let mut c = Array1::zeros(p);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let ek = edge_laplacian(n, i, j);
        c[k] = (&ek * m).sum();
        for (l, &(s, t)) in pairs.iter().enumerate() {
            gram[[k, l]] = (&ek * &edge_laplacian(n, s, t)).sum();
        }
    }
    let a = 2.0 * &gram;
    let b = -2.0 * &c;
    let w = qp_over_edge_weights(&a, &b, tau);
    laplacian_from_weights(n, &w)
}

/// Minimizer of alpha tr(S L) + beta ||L||_F^2 over the valid-Laplacian set
/// with trace `tau`, where `s` is any symmetric matrix (the graph-refinement
/// objective with S = D(X) D(X)').
pub fn refine_graph_oracle(s: &Array2<f64>, alpha: f64, beta: f64, tau: f64) -> Array2<f64> {
    let n = s.nrows();
    let pairs = vertex_pairs(n);
    let p = pairs.len();
    let mut gram = Array2::zeros((p, p));
    let mut c = Array1::zeros(p);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let ek = edge_laplacian(n, i, j);
        c[k] = (&ek * s).sum();
        for (l, &(st, tt)) in pairs.iter().enumerate() {
            gram[[k, l]] = (&ek * &edge_laplacian(n, st, tt)).sum();
        }
    }
    // alpha tr(S L(w)) + beta w'Gw = 1/2 w'(2 beta G)w + (alpha c)'w.
    let a = 2.0 * beta * &gram;
    let b = alpha * &c;
    let w = qp_over_edge_weights(&a, &b, tau);
    laplacian_from_weights(n, &w)
}

/// Nuclear-norm prox objective 1/2 ||P - M||_F^2 + tau ||P||_*.
pub fn prox_objective(p: &Array2<f64>, m: &Array2<f64>, tau: f64) -> f64 {
    let diff = p - m;
    let s = linalg::singular_values(p).unwrap();
    0.5 * linalg::frob(&diff).powi(2) + tau * s.sum()
}

/// First-order solver for the nuclear-norm prox: subgradient steps on the
/// smooth part with a proximal correction, run to a tight fixed point.
///
/// The iteration is proximal-gradient on f(P) = 1/2 ||P - M||^2 with step
/// `step`, whose prox operator is evaluated by soft-thresholding singular
/// values directly (independent of the library's svt).
pub fn prox_oracle(m: &Array2<f64>, tau: f64, step: f64, iters: usize) -> Array2<f64> {
    let mut p = Array2::zeros(m.dim());
    for _ in 0..iters {
        let grad = &p - m;
        let z: Array2<f64> = &p - &(step * &grad);
        let (u, s, vt) = linalg::svd_full(&z).unwrap();
        let k = s.len();
        let mut shrunk = Array2::zeros(z.dim());
        for i in 0..k {
            let si = (s[i] - step * tau).max(0.0);
            if si > 0.0 {
                let ui = u.column(i).to_owned().insert_axis(ndarray::Axis(1));
                let vi = vt.row(i).to_owned().insert_axis(ndarray::Axis(0));
                shrunk = shrunk + si * &ui.dot(&vi);
            }
        }
        p = shrunk;
    }
    p
}

/// A symmetric matrix with i.i.d. Gaussian entries above the diagonal.
pub fn random_symmetric(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v: f64 = scale * rng.sample::<f64, _>(StandardNormal);
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    m
}

/// A dense random matrix with i.i.d. Gaussian entries.
pub fn random_dense(rows: usize, cols: usize, scale: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| scale * rng.sample::<f64, _>(StandardNormal))
}
