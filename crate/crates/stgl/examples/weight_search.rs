//! Grid search over the objective weights: every (alpha, beta, gamma) cell
//! runs the same seeded trials, the table is printed in full, and the winner
//! is the cell with the best mean F-measure.

use stgl::experiment::{grid_search, ExperimentConfig, GraphSpec, SignalSpec, SweepSpec};
use stgl::solver::SolverConfig;
use stgl::transition::TransitionSpec;

fn main() {
    let config = ExperimentConfig {
        graph: GraphSpec::Rgg { n: 20, sigma: 0.5, threshold: 0.7 },
        signal: SignalSpec { rank: 3, m: 60, sigma_n: 0.5, transition: TransitionSpec::Identity },
        solver: SolverConfig::default(),
        sweep: Some(SweepSpec {
            alpha: vec![0.05, 0.1, 0.2],
            beta: vec![5.0, 10.0],
            gamma: vec![0.0],
        }),
        trials: 3,
        seed: 5,
        tau_edge: 1e-4,
    };

    let report = grid_search(&config).expect("grid search failed");
    println!("alpha   beta   gamma   mean F    mean graph err");
    for row in &report.table {
        match &row.error {
            None => println!(
                "{:>5}   {:>4}   {:>5}   {:>6.4}   {:>13.4}",
                row.alpha,
                row.beta,
                row.gamma,
                row.summary.mean.f_measure.unwrap_or(f64::NAN),
                row.summary.mean.gse.unwrap_or(f64::NAN)
            ),
            Some(e) => {
                println!("{:>5}   {:>4}   {:>5}   failed: {e}", row.alpha, row.beta, row.gamma)
            }
        }
    }
    println!(
        "\nbest: alpha = {}, beta = {}, gamma = {}",
        report.best.alpha, report.best.beta, report.best.gamma
    );
}
