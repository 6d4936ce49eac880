//! Thin wrappers over the LAPACK-backed kernels so the backend choice stays in one place.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Solve, SVD, UPLO};

use crate::error::{Error, Result};

/// Symmetric eigendecomposition with eigenvalues in ascending order.
///
/// The caller is responsible for `a` being symmetric; only the lower triangle is read.
pub fn eigh_ascending(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (vals, vecs) = a.eigh(UPLO::Lower).map_err(Error::linalg("eigh"))?;
    // LAPACK returns ascending order; keep a cheap guard against backend drift.
    debug_assert!(vals.windows(2).into_iter().all(|w| w[0] <= w[1]));
    Ok((vals, vecs))
}

/// Full SVD `a = u * diag(s) * vt` with singular values in descending order.
pub fn svd_full(a: &Array2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let (u, s, vt) = a.svd(true, true).map_err(Error::linalg("svd"))?;
    Ok((u.expect("u requested"), s, vt.expect("vt requested")))
}

/// Singular values only, descending.
pub fn singular_values(a: &Array2<f64>) -> Result<Array1<f64>> {
    let (_, s, _) = a.svd(false, false).map_err(Error::linalg("svd"))?;
    Ok(s)
}

/// Dense LU solve of `a x = b` for square `a`.
pub fn solve_linear(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    a.solve(b).map_err(Error::linalg("lu solve"))
}

/// Frobenius norm.
pub fn frob(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Largest absolute entry; 0 for empty input.
pub fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
