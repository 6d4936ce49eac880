//! Estimates per-vertex transition coefficients from the observations alone
//! via the lag-1 autocorrelation, then learns the graph with them.
//!
//! The data is generated with heterogeneous coefficients, so the example
//! prints estimated-vs-true pairs before scoring the learned graph.

use stgl::experiment::{
    estimate_transition_acf, generate_trial_data, ExperimentConfig, GraphSpec, SignalSpec,
};
use stgl::metrics::MetricsReport;
use stgl::solver::{solve, SolverConfig};
use stgl::transition::TransitionSpec;

fn main() {
    let config = ExperimentConfig {
        graph: GraphSpec::Rgg { n: 20, sigma: 0.5, threshold: 0.7 },
        signal: SignalSpec {
            rank: 3,
            m: 120,
            sigma_n: 0.3,
            transition: TransitionSpec::DiagonalGaussian { mean: 0.5, std: 0.25 },
        },
        solver: SolverConfig { alpha: 0.1, beta: 10.0, gamma: 0.0, ..SolverConfig::default() },
        sweep: None,
        trials: 1,
        seed: 11,
        tau_edge: 1e-4,
    };
    let data = generate_trial_data(&config, 0).expect("generation failed");

    let estimated = estimate_transition_acf(&data.y).expect("estimation failed");
    let est = estimated.coeffs().unwrap();
    let truth = data.transition.coeffs().unwrap();
    println!("vertex   estimated   true");
    for i in 0..6 {
        println!("{i:>6}   {:>9.3}   {:>4.3}", est[i], truth[i]);
    }
    println!("   ...");
    let mad =
        est.iter().zip(truth.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>() / est.len() as f64;
    println!("mean absolute coefficient error: {mad:.3}");

    let result = solve(&data.y, &estimated, &config.solver).expect("solve failed");
    let report =
        MetricsReport::compute(&result.l_hat, &data.laplacian, None, config.tau_edge).unwrap();
    println!(
        "graph learned with the estimated transition: F {:.3} (precision {:.3}, recall {:.3})",
        report.f_measure.unwrap(),
        report.precision.unwrap(),
        report.recall.unwrap()
    );
}
