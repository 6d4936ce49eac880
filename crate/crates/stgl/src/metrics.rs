//! Evaluation measures for learned graphs and signal estimates: edge-recovery
//! precision/recall/F-measure and NMI, plus relative Frobenius errors for the
//! Laplacian (GSE) and the low-rank component (LCE).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CglMatrix;
use crate::linalg;
use crate::signal::SignalMatrix;

/// Default threshold on `-L(i,j)` above which a pair counts as an edge; two orders
/// of magnitude above solver tolerance.
pub const DEFAULT_TAU_EDGE: f64 = 1e-4;

/// Presence indicators over the `n(n-1)/2` unordered vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    n: usize,
    present: Vec<bool>,
}

impl EdgeSet {
    pub fn new(n: usize) -> Result<EdgeSet> {
        if n == 0 {
            return Err(Error::Validation("edge set needs at least one vertex".into()));
        }
        Ok(EdgeSet { n, present: vec![false; n * (n - 1) / 2] })
    }

    pub fn from_pairs(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<EdgeSet> {
        let mut set = EdgeSet::new(n)?;
        for (i, j) in pairs {
            set.insert(i, j)?;
        }
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.present.len()
    }

    pub fn edge_count(&self) -> usize {
        self.present.iter().filter(|p| **p).count()
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<()> {
        let k = self.index(i, j)?;
        self.present[k] = true;
        Ok(())
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.index(i, j).map(|k| self.present[k]).unwrap_or(false)
    }

    /// Present pairs with `i < j`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn index(&self, i: usize, j: usize) -> Result<usize> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::Validation(format!(
                "({i},{j}) is not an unordered pair of {} vertices",
                self.n
            )));
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // Row-major position among pairs: all pairs starting below `a`, then offset.
        Ok(a * self.n - a * (a + 1) / 2 + (b - a - 1))
    }
}

/// Thresholded edge extraction: pair `(i,j)` is an edge iff `-L(i,j) > tau_edge`.
pub fn edges_from_laplacian(l: &CglMatrix, tau_edge: f64) -> EdgeSet {
    let n = l.n();
    let m = l.matrix();
    let mut set = EdgeSet::new(n).expect("CglMatrix is nonempty");
    for i in 0..n {
        for j in i + 1..n {
            if -m[[i, j]] > tau_edge {
                set.insert(i, j).expect("indices are in range");
            }
        }
    }
    set
}

/// Which degenerate case, if any, a PRF computation hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrfDegeneracy {
    None,
    /// No learned edges: precision is reported as 0 rather than 0/0.
    EmptyLearned,
    /// No true edges: recall and F are undefined, reported as 0.
    EmptyTruth,
    BothEmpty,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub degeneracy: PrfDegeneracy,
}

/// Precision/recall/F-measure of learned edges against ground truth.
pub fn edge_prf(learned: &EdgeSet, truth: &EdgeSet) -> Result<PrfScores> {
    if learned.n != truth.n {
        return Err(Error::Dimension(format!(
            "edge sets over {} vs {} vertices",
            learned.n, truth.n
        )));
    }
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for (a, b) in learned.present.iter().zip(truth.present.iter()) {
        match (a, b) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let degeneracy = match (tp + fp == 0, tp + fn_ == 0) {
        (true, true) => PrfDegeneracy::BothEmpty,
        (true, false) => PrfDegeneracy::EmptyLearned,
        (false, true) => PrfDegeneracy::EmptyTruth,
        (false, false) => PrfDegeneracy::None,
    };
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(PrfScores {
        precision,
        recall,
        f_measure,
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        degeneracy,
    })
}

/// How the mutual information is normalized into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NmiNormalization {
    /// `I / ((H(A) + H(B)) / 2)`, the default.
    #[default]
    Mean,
    /// `I / sqrt(H(A) H(B))`.
    SqrtProduct,
}

/// Normalized mutual information of the two binary pair labelings, natural logs,
/// arithmetic-mean normalization.
///
/// Zero entropy on either side is degenerate: returns 1 when the labelings are
/// identical and 0 otherwise.
pub fn nmi_edges(learned: &EdgeSet, truth: &EdgeSet) -> Result<f64> {
    nmi_edges_with(learned, truth, NmiNormalization::Mean)
}

pub fn nmi_edges_with(
    learned: &EdgeSet,
    truth: &EdgeSet,
    normalization: NmiNormalization,
) -> Result<f64> {
    if learned.n != truth.n {
        return Err(Error::Dimension(format!(
            "edge sets over {} vs {} vertices",
            learned.n, truth.n
        )));
    }
    let total = learned.pair_count();
    if total == 0 {
        return Err(Error::Validation("NMI needs at least one vertex pair".into()));
    }
    // 2x2 contingency over pair labels: counts[a][b], a = learned, b = truth.
    let mut counts = [[0usize; 2]; 2];
    for (a, b) in learned.present.iter().zip(truth.present.iter()) {
        counts[usize::from(*a)][usize::from(*b)] += 1;
    }
    let n = total as f64;
    let row = [counts[0][0] + counts[0][1], counts[1][0] + counts[1][1]];
    let col = [counts[0][0] + counts[1][0], counts[0][1] + counts[1][1]];
    let entropy = |marginal: [usize; 2]| -> f64 {
        marginal
            .iter()
            .filter(|c| **c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy(row);
    let h_b = entropy(col);
    if h_a == 0.0 || h_b == 0.0 {
        return Ok(if learned.present == truth.present { 1.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let c = counts[a][b];
            if c > 0 {
                let p = c as f64 / n;
                mi += p * (n * c as f64 / (row[a] as f64 * col[b] as f64)).ln();
            }
        }
    }
    let denom = match normalization {
        NmiNormalization::Mean => 0.5 * (h_a + h_b),
        NmiNormalization::SqrtProduct => (h_a * h_b).sqrt(),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Graph structure estimation error: `||L_hat - L_true||_F / ||L_true||_F`.
pub fn gse(l_hat: &CglMatrix, l_true: &CglMatrix) -> Result<f64> {
    if l_hat.n() != l_true.n() {
        return Err(Error::Dimension(format!(
            "Laplacians of size {} vs {}",
            l_hat.n(),
            l_true.n()
        )));
    }
    let denom = linalg::frob(l_true.matrix());
    if denom == 0.0 {
        return Err(Error::Validation("reference Laplacian has zero norm".into()));
    }
    Ok(linalg::frob(&(l_hat.matrix() - l_true.matrix())) / denom)
}

/// Low-rank component estimation error: `||X_hat - X_true||_F / ||X_true||_F`.
pub fn lce(x_hat: &SignalMatrix, x_true: &SignalMatrix) -> Result<f64> {
    if x_hat.n() != x_true.n() || x_hat.m() != x_true.m() {
        return Err(Error::Dimension(format!(
            "signal matrices {}x{} vs {}x{}",
            x_hat.n(),
            x_hat.m(),
            x_true.n(),
            x_true.m()
        )));
    }
    let denom = linalg::frob(x_true.array());
    if denom == 0.0 {
        return Err(Error::Validation("reference signal matrix has zero norm".into()));
    }
    Ok(linalg::frob(&(x_hat.array() - x_true.array())) / denom)
}

/// One evaluation's worth of measures; fields are absent when their inputs are
/// (LCE needs the ground-truth low-rank component).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
    pub nmi: Option<f64>,
    pub gse: Option<f64>,
    pub lce: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl MetricsReport {
    /// Scores a learned Laplacian (and optionally a signal estimate) against truth.
    pub fn compute(
        l_hat: &CglMatrix,
        l_true: &CglMatrix,
        estimates: Option<(&SignalMatrix, &SignalMatrix)>,
        tau_edge: f64,
    ) -> Result<MetricsReport> {
        let learned = edges_from_laplacian(l_hat, tau_edge);
        let truth = edges_from_laplacian(l_true, tau_edge);
        let prf = edge_prf(&learned, &truth)?;
        let mut flags = Vec::new();
        if prf.degeneracy != PrfDegeneracy::None {
            flags.push(format!("prf_degenerate: {:?}", prf.degeneracy));
        }
        let nmi = if learned.pair_count() > 0 { Some(nmi_edges(&learned, &truth)?) } else { None };
        let lce_value = match estimates {
            Some((x_hat, x_true)) => Some(lce(x_hat, x_true)?),
            None => None,
        };
        Ok(MetricsReport {
            precision: Some(prf.precision),
            recall: Some(prf.recall),
            f_measure: Some(prf.f_measure),
            nmi,
            gse: Some(gse(l_hat, l_true)?),
            lce: lce_value,
            flags,
        })
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = |v: Option<f64>| match v {
            Some(x) => format!("{x:.4}"),
            None => "-".into(),
        };
        write!(
            f,
            "precision {}  recall {}  f {}  nmi {}  gse {}  lce {}",
            field(self.precision),
            field(self.recall),
            field(self.f_measure),
            field(self.nmi),
            field(self.gse),
            field(self.lce)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_graph;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edge_indexing_round_trips() {
        let mut set = EdgeSet::new(5).unwrap();
        assert_eq!(set.pair_count(), 10);
        set.insert(3, 1).unwrap();
        assert!(set.contains(1, 3));
        assert!(set.contains(3, 1));
        assert!(!set.contains(0, 1));
        assert_eq!(set.edges(), vec![(1, 3)]);
        assert!(set.insert(2, 2).is_err());
        assert!(set.insert(0, 5).is_err());
    }

    #[test]
    fn thresholding_respects_tau() {
        let l = CglMatrix::new(array![[1.0, -1.0], [-1.0, 1.0]]).unwrap();
        assert_eq!(edges_from_laplacian(&l, 1e-4).edge_count(), 1);
        let faint = CglMatrix::new(array![[5e-5, -5e-5], [-5e-5, 5e-5]]).unwrap();
        assert_eq!(edges_from_laplacian(&faint, 1e-4).edge_count(), 0);
        let zero = CglMatrix::new(Array2::zeros((3, 3))).unwrap();
        assert_eq!(edges_from_laplacian(&zero, 1e-4).edge_count(), 0);
    }

    #[test]
    fn prf_on_identical_nonempty_sets_is_perfect() {
        let set = EdgeSet::from_pairs(4, [(0, 1), (2, 3)]).unwrap();
        let scores = edge_prf(&set, &set).unwrap();
        assert_eq!((scores.precision, scores.recall, scores.f_measure), (1.0, 1.0, 1.0));
        assert_eq!(scores.degeneracy, PrfDegeneracy::None);
    }

    #[test]
    fn prf_on_complementary_sets_is_zero() {
        let a = EdgeSet::from_pairs(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let b = EdgeSet::from_pairs(4, [(1, 2), (1, 3), (2, 3)]).unwrap();
        let scores = edge_prf(&a, &b).unwrap();
        assert_eq!((scores.precision, scores.recall, scores.f_measure), (0.0, 0.0, 0.0));
    }

    #[test]
    fn prf_hand_count() {
        // TP = 3, FP = 1, FN = 2 on five vertices.
        let truth = EdgeSet::from_pairs(5, [(0, 1), (0, 2), (1, 2), (3, 4), (2, 3)]).unwrap();
        let learned = EdgeSet::from_pairs(5, [(0, 1), (0, 2), (1, 2), (0, 4)]).unwrap();
        let scores = edge_prf(&learned, &truth).unwrap();
        assert_eq!(scores.true_positives, 3);
        assert_eq!(scores.false_positives, 1);
        assert_eq!(scores.false_negatives, 2);
        assert!((scores.precision - 0.75).abs() < 1e-15);
        assert!((scores.recall - 0.6).abs() < 1e-15);
        assert!((scores.f_measure - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn prf_flags_empty_sets() {
        let empty = EdgeSet::new(4).unwrap();
        let some = EdgeSet::from_pairs(4, [(0, 1)]).unwrap();
        assert_eq!(edge_prf(&empty, &some).unwrap().degeneracy, PrfDegeneracy::EmptyLearned);
        assert_eq!(edge_prf(&some, &empty).unwrap().degeneracy, PrfDegeneracy::EmptyTruth);
        assert_eq!(edge_prf(&empty, &empty).unwrap().degeneracy, PrfDegeneracy::BothEmpty);
        assert_eq!(edge_prf(&empty, &some).unwrap().precision, 0.0);
    }

    #[test]
    fn nmi_identical_nondegenerate_is_one() {
        let set = EdgeSet::from_pairs(4, [(0, 1), (2, 3)]).unwrap();
        assert!((nmi_edges(&set, &set).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nmi_of_independent_labelings_is_zero() {
        // Contingency (1,1;2,2) over the 6 pairs of 4 vertices factorizes into its
        // marginals, so the mutual information vanishes.
        let a = EdgeSet::from_pairs(4, [(0, 1), (0, 2)]).unwrap();
        let b = EdgeSet::from_pairs(4, [(0, 1), (0, 3), (1, 2)]).unwrap();
        assert!(nmi_edges(&a, &b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn nmi_matches_scalar_formula_on_a_hand_contingency() {
        // Contingency (2,1;1,2) over 6 pairs; expected value from the closed-form
        // scalar expressions, written out term by term.
        let a = EdgeSet::from_pairs(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let b = EdgeSet::from_pairs(4, [(0, 1), (0, 2), (1, 2)]).unwrap();
        // learned \ truth: absent/absent = 2, absent/present = 1,
        //                  present/absent = 1, present/present = 2.
        let n = 6.0_f64;
        let mi = (2.0 / n) * (n * 2.0 / (3.0 * 3.0)).ln()
            + (1.0 / n) * (n * 1.0 / (3.0 * 3.0)).ln()
            + (1.0 / n) * (n * 1.0 / (3.0 * 3.0)).ln()
            + (2.0 / n) * (n * 2.0 / (3.0 * 3.0)).ln();
        let h = -(0.5_f64 * 0.5_f64.ln()) * 2.0;
        let want = mi / h;
        let got = nmi_edges(&a, &b).unwrap();
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        // Equal entropies make both normalizations agree here.
        let sqrt = nmi_edges_with(&a, &b, NmiNormalization::SqrtProduct).unwrap();
        assert!((sqrt - want).abs() < 1e-12);
    }

    #[test]
    fn nmi_degenerate_entropy_falls_back_to_identity_test() {
        let full = EdgeSet::from_pairs(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let empty = EdgeSet::new(3).unwrap();
        let partial = EdgeSet::from_pairs(3, [(0, 1)]).unwrap();
        assert_eq!(nmi_edges(&full, &full).unwrap(), 1.0);
        assert_eq!(nmi_edges(&empty, &empty).unwrap(), 1.0);
        assert_eq!(nmi_edges(&full, &partial).unwrap(), 0.0);
        assert_eq!(nmi_edges(&partial, &full).unwrap(), 0.0);
    }

    #[test]
    fn nmi_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = random_edges(6, &mut rng);
            let b = random_edges(6, &mut rng);
            let ab = nmi_edges(&a, &b).unwrap();
            let ba = nmi_edges(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-12);
        }
    }

    fn random_edges(n: usize, rng: &mut ChaCha8Rng) -> EdgeSet {
        let mut set = EdgeSet::new(n).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.5) {
                    set.insert(i, j).unwrap();
                }
            }
        }
        set
    }

    #[test]
    fn metrics_survive_identical_vertex_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l_true = random_graph(6, 0.5, &mut rng).laplacian();
        let l_hat = random_graph(6, 0.5, &mut rng).laplacian();
        let perm = [3, 0, 5, 1, 4, 2];
        let permute = |l: &CglMatrix| {
            let m = l.matrix();
            CglMatrix::new(Array2::from_shape_fn((6, 6), |(i, j)| m[[perm[i], perm[j]]])).unwrap()
        };
        let before = MetricsReport::compute(&l_hat, &l_true, None, 1e-4).unwrap();
        let after =
            MetricsReport::compute(&permute(&l_hat), &permute(&l_true), None, 1e-4).unwrap();
        for (x, y) in [
            (before.precision, after.precision),
            (before.recall, after.recall),
            (before.f_measure, after.f_measure),
            (before.nmi, after.nmi),
            (before.gse, after.gse),
        ] {
            assert!((x.unwrap() - y.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn gse_trivia_and_direct_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l0 = random_graph(5, 0.5, &mut rng).laplacian();
        assert_eq!(gse(&l0, &l0).unwrap(), 0.0);
        let doubled = CglMatrix::new(l0.matrix() * 2.0).unwrap();
        assert!((gse(&doubled, &l0).unwrap() - 1.0).abs() < 1e-12);
        let other = random_graph(5, 0.5, &mut rng).laplacian();
        let direct = linalg::frob(&(other.matrix() - l0.matrix())) / linalg::frob(l0.matrix());
        assert!((gse(&other, &l0).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn gse_scale_sweep_is_monotone_away_from_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l0 = random_graph(6, 0.5, &mut rng).laplacian();
        let l1 = random_graph(6, 0.5, &mut rng).laplacian();
        let ip: f64 = l1.matrix().iter().zip(l0.matrix().iter()).map(|(a, b)| a * b).sum();
        let best = ip / linalg::frob(l1.matrix()).powi(2);
        let at = |c: f64| {
            let scaled = CglMatrix::new(l1.matrix() * c).unwrap();
            gse(&scaled, &l0).unwrap()
        };
        for k in 1..6 {
            let step = 0.1 * k as f64;
            assert!(at(best + step) >= at(best + step - 0.1) - 1e-12);
            assert!(at((best - step).max(1e-3)) >= at((best - step + 0.1).min(best)) - 1e-12);
        }
    }

    #[test]
    fn lce_trivia() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x0 = SignalMatrix::new(Array2::from_shape_fn((4, 7), |_| rng.random_range(-1.0..1.0)))
            .unwrap();
        assert_eq!(lce(&x0, &x0).unwrap(), 0.0);
        let zero = SignalMatrix::new(Array2::zeros((4, 7))).unwrap();
        assert!((lce(&zero, &x0).unwrap() - 1.0).abs() < 1e-15);
        assert!(lce(&x0, &zero).is_err());
    }

    #[test]
    fn report_round_trips_through_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let l_true = random_graph(5, 0.5, &mut rng).laplacian();
        let l_hat = random_graph(5, 0.5, &mut rng).laplacian();
        let report = MetricsReport::compute(&l_hat, &l_true, None, 1e-4).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: MetricsReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report.f_measure, back.f_measure);
        assert!(report.lce.is_none());
    }
}
