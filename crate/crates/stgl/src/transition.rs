//! Per-vertex temporal transition coefficients and their sampling specs.
//!
//! The transition matrix `R` weights the previous time instant inside the difference
//! `x_t - R x_{t-1}`. The model works with diagonal `R` (one lag-1 coefficient per
//! vertex); a real symmetric `R` is supported through the eigenbasis transform below,
//! which reduces it to an equivalent diagonal problem.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::SignalMatrix;

const SYMMETRY_TOL: f64 = 1e-12;
const RESAMPLE_BUDGET: usize = 10_000;

#[derive(Debug, Clone)]
enum Repr {
    Diagonal(Array1<f64>),
    Symmetric(Array2<f64>),
}

/// Transition matrix in diagonal or general symmetric form.
///
/// Model-facing diagonal matrices keep every coefficient in `[0, 1]`
/// ([`TransitionMatrix::diagonal`]). The eigenvalues coming out of
/// [`symmetric_transition_transform`] are unconstrained, so that path uses
/// [`TransitionMatrix::from_eigenvalues`], which only requires finite entries.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    repr: Repr,
}

impl TransitionMatrix {
    pub fn identity(n: usize) -> TransitionMatrix {
        TransitionMatrix { repr: Repr::Diagonal(Array1::ones(n)) }
    }

    /// Diagonal transition with per-vertex coefficients in `[0, 1]`.
    pub fn diagonal(coeffs: Array1<f64>) -> Result<TransitionMatrix> {
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_finite() || *c < 0.0 || *c > 1.0 {
                return Err(Error::Validation(format!(
                    "transition coefficient {i} out of [0,1]: {c}"
                )));
            }
        }
        Ok(TransitionMatrix { repr: Repr::Diagonal(coeffs) })
    }

    /// Diagonal transition from eigenvalues of a symmetric matrix; no range constraint.
    pub fn from_eigenvalues(coeffs: Array1<f64>) -> Result<TransitionMatrix> {
        if let Some((i, c)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite(format!("eigenvalue {i} is {c}")));
        }
        Ok(TransitionMatrix { repr: Repr::Diagonal(coeffs) })
    }

    /// General real symmetric transition (asymmetry beyond 1e-12 is rejected).
    pub fn symmetric(m: Array2<f64>) -> Result<TransitionMatrix> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Dimension(format!(
                "transition matrix must be square, got {}x{}",
                n,
                m.ncols()
            )));
        }
        for i in 0..n {
            for j in i..n {
                if !m[[i, j]].is_finite() {
                    return Err(Error::NonFinite(format!("transition entry ({i},{j})")));
                }
                if (m[[i, j]] - m[[j, i]]).abs() > SYMMETRY_TOL {
                    return Err(Error::Validation(format!(
                        "transition asymmetric at ({i},{j}) by {:.3e}",
                        (m[[i, j]] - m[[j, i]]).abs()
                    )));
                }
            }
        }
        Ok(TransitionMatrix { repr: Repr::Symmetric(m) })
    }

    pub fn n(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(c) => c.len(),
            Repr::Symmetric(m) => m.nrows(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal(_))
    }

    /// Diagonal coefficients, when this transition is diagonal.
    pub fn coeffs(&self) -> Option<&Array1<f64>> {
        match &self.repr {
            Repr::Diagonal(c) => Some(c),
            Repr::Symmetric(_) => None,
        }
    }

    /// `R x` for a single vertex signal.
    pub fn apply_vec(&self, x: ArrayView1<f64>) -> Array1<f64> {
        match &self.repr {
            Repr::Diagonal(c) => &x * c,
            Repr::Symmetric(m) => m.dot(&x),
        }
    }

    /// `R X`, scaling rows in the diagonal case.
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        match &self.repr {
            Repr::Diagonal(c) => x * &c.view().insert_axis(Axis(1)),
            Repr::Symmetric(m) => m.dot(x),
        }
    }

    /// Dense N x N form (diagonal embedded on the diagonal).
    pub fn dense(&self) -> Array2<f64> {
        match &self.repr {
            Repr::Diagonal(c) => Array2::from_diag(c),
            Repr::Symmetric(m) => m.clone(),
        }
    }
}

/// How to obtain a transition matrix for generation or solving.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransitionSpec {
    /// `R = I`: plain first differences.
    Identity,
    /// Independent per-vertex draws from `N(mean, std^2)`, resampled into `[0, 1)`.
    DiagonalGaussian { mean: f64, std: f64 },
    /// Fixed coefficients, each in `[0, 1]`.
    Explicit { coeffs: Vec<f64> },
}

impl Default for TransitionSpec {
    fn default() -> TransitionSpec {
        TransitionSpec::Identity
    }
}

impl TransitionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            TransitionSpec::Identity => Ok(()),
            TransitionSpec::DiagonalGaussian { mean, std } => {
                if !mean.is_finite() || !std.is_finite() || *std < 0.0 {
                    return Err(Error::Config(format!(
                        "diagonal_gaussian needs finite mean and std >= 0, got ({mean}, {std})"
                    )));
                }
                Ok(())
            }
            TransitionSpec::Explicit { coeffs } => {
                for (i, c) in coeffs.iter().enumerate() {
                    if !c.is_finite() || *c < 0.0 || *c > 1.0 {
                        return Err(Error::Config(format!(
                            "explicit transition coefficient {i} out of [0,1]: {c}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Draws a transition matrix per `spec` for an `n`-vertex graph.
pub fn sample_transition<R: Rng>(
    spec: &TransitionSpec,
    n: usize,
    rng: &mut R,
) -> Result<TransitionMatrix> {
    spec.validate()?;
    match spec {
        TransitionSpec::Identity => Ok(TransitionMatrix::identity(n)),
        TransitionSpec::DiagonalGaussian { mean, std } => {
            let normal = Normal::new(*mean, *std)
                .map_err(|e| Error::Config(format!("bad gaussian spec: {e}")))?;
            let mut coeffs = Array1::zeros(n);
            for i in 0..n {
                let mut accepted = false;
                for _ in 0..RESAMPLE_BUDGET {
                    let c = normal.sample(rng);
                    if (0.0..1.0).contains(&c) {
                        coeffs[i] = c;
                        accepted = true;
                        break;
                    }
                }
                if !accepted {
                    return Err(Error::Generation {
                        attempts: RESAMPLE_BUDGET,
                        reason: format!(
                            "no draw from N({mean}, {std}^2) landed in [0,1) for vertex {i}"
                        ),
                    });
                }
            }
            TransitionMatrix::diagonal(coeffs)
        }
        TransitionSpec::Explicit { coeffs } => {
            if coeffs.len() != n {
                return Err(Error::Dimension(format!(
                    "explicit transition has {} coefficients for {n} vertices",
                    coeffs.len()
                )));
            }
            TransitionMatrix::diagonal(Array1::from(coeffs.clone()))
        }
    }
}

/// Rotates observations of a symmetric-transition process into the eigenbasis of `R`.
///
/// With `R = Q diag(lambda) Q^T`, the rotated signals `Y~ = Q^T Y` follow the same
/// model with the diagonal transition `diag(lambda)`; `Q Y~` recovers `Y` exactly up
/// to roundoff. Returns `(Y~, diag(lambda), Q)`.
pub fn symmetric_transition_transform(
    y: &SignalMatrix,
    r_sym: &TransitionMatrix,
) -> Result<(SignalMatrix, TransitionMatrix, Array2<f64>)> {
    let m = match &r_sym.repr {
        Repr::Symmetric(m) => m,
        Repr::Diagonal(_) => {
            return Err(Error::Validation(
                "transform expects a transition in symmetric form".into(),
            ))
        }
    };
    if y.n() != m.nrows() {
        return Err(Error::Dimension(format!(
            "signals have {} rows vs transition size {}",
            y.n(),
            m.nrows()
        )));
    }
    let (lambda, q) = linalg::eigh_ascending(m)?;
    let y_tilde = SignalMatrix::new(q.t().dot(y.array()))?;
    Ok((y_tilde, TransitionMatrix::from_eigenvalues(lambda)?, q))
}
