//! Signal matrices and the weighted time-difference operator.

use ndarray::{s, Array2};

use crate::error::{Error, Result};
use crate::transition::TransitionMatrix;

/// An N x M matrix of vertex signals: row i = vertex i, column t = time instant t.
#[derive(Debug, Clone)]
pub struct SignalMatrix {
    data: Array2<f64>,
}

impl SignalMatrix {
    /// Wraps a dense matrix, rejecting non-finite entries and empty shapes.
    pub fn new(data: Array2<f64>) -> Result<SignalMatrix> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "signal matrix must be nonempty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if let Some(((i, t), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(format!("signal entry ({i},{t}) is {v}")));
        }
        Ok(SignalMatrix { data })
    }

    /// Vertex count (rows).
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    /// Time-instant count (columns).
    pub fn m(&self) -> usize {
        self.data.ncols()
    }

    pub fn array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }
}

/// `D(X) = [x_1, x_2 - R x_1, ..., x_M - R x_{M-1}]`.
///
/// Matrix-free: the time-shift is a column copy, and diagonal `R` is a row scaling;
/// neither the shift matrix nor any NM x NM operator is ever materialized.
pub fn weighted_difference(x: &SignalMatrix, r: &TransitionMatrix) -> Result<SignalMatrix> {
    if x.n() != r.n() {
        return Err(Error::Dimension(format!(
            "signal has {} rows vs transition size {}",
            x.n(),
            r.n()
        )));
    }
    SignalMatrix::new(diff_op(x.array(), r))
}

/// `D(X) = X - R (X B)` on raw storage; `X B` right-shifts columns (column t
/// receives column t-1, first column zero).
pub(crate) fn diff_op(x: &Array2<f64>, r: &TransitionMatrix) -> Array2<f64> {
    let m = x.ncols();
    let mut out = x.clone();
    if m > 1 {
        let shifted = r.apply(&x.slice(s![.., ..m - 1]).to_owned());
        out.slice_mut(s![.., 1..]).zip_mut_with(&shifted, |o, s| *o -= s);
    }
    out
}

/// Adjoint `D*(Z) = Z - R (Z B^T)` for symmetric (incl. diagonal) `R`; `Z B^T`
/// left-shifts columns (column t receives column t+1, last column zero).
pub(crate) fn diff_op_adjoint(z: &Array2<f64>, r: &TransitionMatrix) -> Array2<f64> {
    let m = z.ncols();
    let mut out = z.clone();
    if m > 1 {
        let shifted = r.apply(&z.slice(s![.., 1..]).to_owned());
        out.slice_mut(s![.., ..m - 1]).zip_mut_with(&shifted, |o, s| *o -= s);
    }
    out
}
