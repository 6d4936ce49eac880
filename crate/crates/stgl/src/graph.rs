//! Weighted graphs, combinatorial graph Laplacians, and the smoothness functionals.
//!
//! A combinatorial graph Laplacian (CGL) is `L = D - W` for a nonnegatively weighted
//! undirected graph: symmetric, nonpositive off-diagonals, zero row sums, and therefore
//! positive semidefinite. Smoothness of a signal `x` is the quadratic form `x^T L x`;
//! its spatiotemporal extension applies the same form to weighted time differences.

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::{weighted_difference, SignalMatrix};
use crate::transition::TransitionMatrix;

/// Symmetry tolerance accepted by [`CglMatrix::new`].
pub const CGL_SYMMETRY_TOL: f64 = 1e-10;
/// Largest positive off-diagonal entry accepted by [`CglMatrix::new`].
pub const CGL_OFFDIAG_TOL: f64 = 1e-10;
/// Largest absolute row sum accepted by [`CglMatrix::new`].
pub const CGL_ROWSUM_TOL: f64 = 1e-8;
/// Smallest eigenvalue accepted by [`CglMatrix::new`] (PSD up to roundoff).
pub const CGL_PSD_TOL: f64 = 1e-8;

/// An undirected graph with nonnegative edge weights and optional vertex coordinates.
#[derive(Debug, Clone)]
pub struct Graph {
    weights: Array2<f64>,
    coords: Option<Array2<f64>>,
}

impl Graph {
    /// Builds a graph from a symmetric nonnegative weight matrix with zero diagonal.
    ///
    /// Rejection messages name the first offending entry.
    pub fn new(weights: Array2<f64>, coords: Option<Array2<f64>>) -> Result<Graph> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::Dimension(format!(
                "weight matrix must be square, got {}x{}",
                n,
                weights.ncols()
            )));
        }
        if n == 0 {
            return Err(Error::Validation("graph needs at least one vertex".into()));
        }
        for i in 0..n {
            if weights[[i, i]] != 0.0 {
                return Err(Error::Validation(format!(
                    "nonzero diagonal weight at ({i},{i}): {}",
                    weights[[i, i]]
                )));
            }
            for j in 0..n {
                let w = weights[[i, j]];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Validation(format!(
                        "negative or non-finite weight at ({i},{j}): {w}"
                    )));
                }
                if w != weights[[j, i]] {
                    return Err(Error::Validation(format!(
                        "asymmetric weights at ({i},{j}): {w} vs {}",
                        weights[[j, i]]
                    )));
                }
            }
        }
        if let Some(c) = &coords {
            if c.nrows() != n {
                return Err(Error::Dimension(format!(
                    "coordinate rows ({}) must match vertex count ({n})",
                    c.nrows()
                )));
            }
        }
        Ok(Graph { weights, coords })
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn coords(&self) -> Option<&Array2<f64>> {
        self.coords.as_ref()
    }

    /// `L = D - W` with `D = diag(row sums of W)`. The degree matrix is derived here,
    /// never stored, so it cannot drift out of sync with the weights.
    pub fn laplacian(&self) -> CglMatrix {
        let n = self.n();
        let mut l = -self.weights.clone();
        let degrees = self.weights.sum_axis(Axis(1));
        for i in 0..n {
            l[[i, i]] = degrees[i];
        }
        CglMatrix::new(l).expect("Laplacian of a valid graph is a valid CGL")
    }
}

/// A validated combinatorial graph Laplacian.
#[derive(Debug, Clone)]
pub struct CglMatrix {
    l: Array2<f64>,
}

impl CglMatrix {
    /// Validates the CGL constraints at construction tolerances.
    ///
    /// The PSD bound is certified by Gershgorin discs: every eigenvalue is at least
    /// `min_i (L_ii - sum_j |L_ij|)`, which the sign and row-sum checks bound from below.
    /// Only if that cheap certificate is inconclusive is an eigendecomposition consulted.
    pub fn new(l: Array2<f64>) -> Result<CglMatrix> {
        let n = l.nrows();
        if l.ncols() != n || n == 0 {
            return Err(Error::Dimension(format!(
                "Laplacian must be square and nonempty, got {}x{}",
                n,
                l.ncols()
            )));
        }
        let report = validate_structure(&l);
        if report.symmetry.worst > CGL_SYMMETRY_TOL {
            return Err(Error::Validation(format!(
                "Laplacian asymmetric by {:.3e} (tol {CGL_SYMMETRY_TOL:.0e})",
                report.symmetry.worst
            )));
        }
        if report.off_diagonal.worst > CGL_OFFDIAG_TOL {
            return Err(Error::Validation(format!(
                "positive off-diagonal by {:.3e} (tol {CGL_OFFDIAG_TOL:.0e})",
                report.off_diagonal.worst
            )));
        }
        if report.row_sums.worst > CGL_ROWSUM_TOL {
            return Err(Error::Validation(format!(
                "row sum off zero by {:.3e} (tol {CGL_ROWSUM_TOL:.0e})",
                report.row_sums.worst
            )));
        }
        let gershgorin_floor =
            report.row_sums.worst + 2.0 * (n as f64 - 1.0) * report.off_diagonal.worst;
        if gershgorin_floor > CGL_PSD_TOL {
            let (vals, _) = linalg::eigh_ascending(&l)?;
            if vals[0] < -CGL_PSD_TOL {
                return Err(Error::Validation(format!(
                    "smallest eigenvalue {:.3e} below -{CGL_PSD_TOL:.0e}",
                    vals[0]
                )));
            }
        }
        Ok(CglMatrix { l })
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.l
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.l
    }

    pub fn trace(&self) -> f64 {
        self.l.diag().sum()
    }

    /// Rescales so that `trace(result) = target`. Errors on nonpositive trace.
    pub fn normalize_trace(&self, target: f64) -> Result<CglMatrix> {
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(Error::Validation(format!("cannot normalize trace {tr} (empty graph?)")));
        }
        if !(target > 0.0) {
            return Err(Error::Validation(format!("trace target must be positive, got {target}")));
        }
        CglMatrix::new(&self.l * (target / tr))
    }

    /// `x^T L x`, the graph smoothness of a vertex signal.
    pub fn smoothness(&self, x: ArrayView1<f64>) -> Result<f64> {
        if x.len() != self.n() {
            return Err(Error::Dimension(format!(
                "signal length {} vs {} vertices",
                x.len(),
                self.n()
            )));
        }
        Ok(x.dot(&self.l.dot(&x)))
    }

    /// `tr(D(X)^T L D(X))`: summed smoothness of the weighted time differences
    /// `x_t - R x_{t-1}` (the t = 1 term is the smoothness of `x_1` itself).
    pub fn spatiotemporal_smoothness(&self, x: &SignalMatrix, r: &TransitionMatrix) -> Result<f64> {
        if x.n() != self.n() {
            return Err(Error::Dimension(format!(
                "signal has {} rows vs {} vertices",
                x.n(),
                self.n()
            )));
        }
        let d = weighted_difference(x, r)?;
        let ld = self.l.dot(d.array());
        Ok(d.array().iter().zip(ld.iter()).map(|(a, b)| a * b).sum())
    }

    /// Ascending eigendecomposition `L = U diag(lambda) U^T`.
    pub fn eigendecompose(&self) -> Result<Spectrum> {
        let (vals, vecs) = linalg::eigh_ascending(&self.l).map_err(|e| match e {
            Error::Linalg { source, .. } => {
                Error::Linalg { context: "CGL eigendecomposition", source }
            }
            other => other,
        })?;
        Spectrum::new(vals, vecs, &self.l)
    }
}

/// Eigenpairs of a CGL, ascending, columns of `u` matching `eigenvalues`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<f64>,
}

impl Spectrum {
    fn new(
        eigenvalues: Array1<f64>,
        eigenvectors: Array2<f64>,
        l: &Array2<f64>,
    ) -> Result<Spectrum> {
        let n = eigenvalues.len();
        // Orthonormality check: ||U^T U - I||_max <= 1e-8.
        let gram = eigenvectors.t().dot(&eigenvectors);
        let mut ortho_worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                ortho_worst = ortho_worst.max((gram[[i, j]] - target).abs());
            }
        }
        if ortho_worst > 1e-8 {
            return Err(Error::Validation(format!(
                "eigenvector matrix lost orthonormality by {ortho_worst:.3e}"
            )));
        }
        // Reconstruction check: ||L - U diag(lambda) U^T||_max <= 1e-7 * max(1, ||L||_max).
        let recon = (&eigenvectors * &eigenvalues).dot(&eigenvectors.t());
        let resid = linalg::max_abs(&(&recon - l));
        let scale = linalg::max_abs(l).max(1.0);
        if resid > 1e-7 * scale {
            return Err(Error::Validation(format!(
                "eigendecomposition reconstruction residual {resid:.3e} exceeds {:.3e}",
                1e-7 * scale
            )));
        }
        Ok(Spectrum { eigenvalues, eigenvectors })
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    /// Second-smallest eigenvalue; positive exactly when the graph is connected.
    pub fn fiedler_value(&self) -> f64 {
        self.eigenvalues[1]
    }
}

/// One constraint's outcome inside a [`ValidationReport`].
#[derive(Debug, Clone, Copy)]
pub struct ConstraintCheck {
    pub passed: bool,
    /// Worst violation magnitude (0 when satisfied exactly).
    pub worst: f64,
    /// Entry where the worst violation occurs, when localized.
    pub location: Option<(usize, usize)>,
}

/// Per-constraint CGL validity report produced by [`validate_cgl`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub symmetry: ConstraintCheck,
    pub off_diagonal: ConstraintCheck,
    pub row_sums: ConstraintCheck,
    pub psd: ConstraintCheck,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.symmetry.passed && self.off_diagonal.passed && self.row_sums.passed && self.psd.passed
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let line = |c: &ConstraintCheck| if c.passed { "pass" } else { "FAIL" };
        writeln!(f, "symmetry:     {} (worst {:.3e})", line(&self.symmetry), self.symmetry.worst)?;
        writeln!(
            f,
            "off-diagonal: {} (worst {:.3e})",
            line(&self.off_diagonal),
            self.off_diagonal.worst
        )?;
        writeln!(f, "row sums:     {} (worst {:.3e})", line(&self.row_sums), self.row_sums.worst)?;
        write!(f, "psd:          {} (worst {:.3e})", line(&self.psd), self.psd.worst)
    }
}

// Symmetry, sign, and row-sum violations in one pass; PSD is filled in by the caller.
fn validate_structure(m: &Array2<f64>) -> ValidationReport {
    let n = m.nrows();
    let mut sym = (0.0_f64, None);
    let mut off = (0.0_f64, None);
    let mut rows = (0.0_f64, None);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            let v = m[[i, j]];
            row_sum += v;
            if j > i {
                let asym = (v - m[[j, i]]).abs();
                if asym > sym.0 {
                    sym = (asym, Some((i, j)));
                }
            }
            if i != j && v > off.0 {
                off = (v, Some((i, j)));
            }
        }
        if row_sum.abs() > rows.0 {
            rows = (row_sum.abs(), Some((i, i)));
        }
    }
    ValidationReport {
        symmetry: ConstraintCheck { passed: true, worst: sym.0, location: sym.1 },
        off_diagonal: ConstraintCheck { passed: true, worst: off.0, location: off.1 },
        row_sums: ConstraintCheck { passed: true, worst: rows.0, location: rows.1 },
        psd: ConstraintCheck { passed: true, worst: 0.0, location: None },
    }
}

/// Checks an arbitrary square matrix against the four CGL constraints at tolerance `tol`.
///
/// Always returns a report; nothing here is an error. The PSD violation is the amount by
/// which the smallest eigenvalue drops below zero (0 when the decomposition fails, with
/// the failure reflected as a failed check).
pub fn validate_cgl(m: &Array2<f64>, tol: f64) -> ValidationReport {
    assert_eq!(m.nrows(), m.ncols(), "validate_cgl expects a square matrix");
    let mut report = validate_structure(m);
    report.symmetry.passed = report.symmetry.worst <= tol;
    report.off_diagonal.passed = report.off_diagonal.worst <= tol;
    report.row_sums.passed = report.row_sums.worst <= tol;
    match linalg::eigh_ascending(&symmetrize(m)) {
        Ok((vals, _)) => {
            let violation = (-vals[0]).max(0.0);
            report.psd =
                ConstraintCheck { passed: violation <= tol, worst: violation, location: None };
        }
        Err(_) => {
            report.psd = ConstraintCheck { passed: false, worst: f64::NAN, location: None };
        }
    }
    report
}

fn symmetrize(m: &Array2<f64>) -> Array2<f64> {
    (m + &m.t()) * 0.5
}
