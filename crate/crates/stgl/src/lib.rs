//! Joint graph and low-rank signal learning from noisy spatiotemporal observations.
//!
//! Given an N x M matrix `Y` of per-vertex time series, this crate estimates both an
//! undirected weighted graph (as a combinatorial Laplacian `L`) and a denoised low-rank
//! signal component `X` by alternating two ADMM solvers: one refines the graph under a
//! spatiotemporal-smoothness prior, the other denoises the signals under the learned
//! graph and a nuclear-norm penalty. Synthetic generators, evaluation metrics, and an
//! experiment harness reproduce the usual benchmark protocol (random geometric and
//! nearest-neighbor graphs, Monte Carlo trials, hyperparameter sweeps).
//!
//! Start with [`solver::solve`] for the core algorithm, or the `examples/` directory
//! for end-to-end runs.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod signal;
pub mod solver;
pub mod synth;
#[cfg(test)]
mod testutil;
pub mod transition;

pub use error::{Error, Result};
pub use experiment::{
    estimate_transition_acf, grid_search, run_synthetic, ExperimentConfig, RunReport, SweepReport,
};
pub use graph::{validate_cgl, CglMatrix, Graph, Spectrum, ValidationReport};
pub use metrics::{edges_from_laplacian, EdgeSet, MetricsReport};
pub use signal::{weighted_difference, SignalMatrix};
pub use solver::{solve, SolverConfig, SolverResult};
pub use transition::{
    sample_transition, symmetric_transition_transform, TransitionMatrix, TransitionSpec,
};
