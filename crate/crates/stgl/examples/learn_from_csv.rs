//! Learns a graph from a CSV of observations: either a file you pass on the
//! command line or, without arguments, a synthetic dataset generated on the
//! spot (so the example is runnable standalone and can score its answer).
//!
//! Usage: learn_from_csv [Y_CSV]

use stgl::experiment::{generate_trial_data, ExperimentConfig, GraphSpec, SignalSpec};
use stgl::io;
use stgl::metrics::{edges_from_laplacian, MetricsReport};
use stgl::solver::{solve, SolverConfig};
use stgl::transition::{TransitionMatrix, TransitionSpec};

fn main() {
    let solver = SolverConfig { alpha: 0.1, beta: 10.0, gamma: 0.0, ..SolverConfig::default() };
    let tau_edge = 1e-4;

    let (y, truth) = match std::env::args().nth(1) {
        Some(path) => (
            io::load_matrix(std::path::Path::new(&path)).expect("cannot read the observations"),
            None,
        ),
        None => {
            let config = ExperimentConfig {
                graph: GraphSpec::Rgg { n: 20, sigma: 0.5, threshold: 0.7 },
                signal: SignalSpec {
                    rank: 3,
                    m: 80,
                    sigma_n: 0.5,
                    transition: TransitionSpec::Identity,
                },
                solver: solver.clone(),
                sweep: None,
                trials: 1,
                seed: 3,
                tau_edge,
            };
            let data = generate_trial_data(&config, 0).expect("generation failed");
            (data.y, Some(data.laplacian))
        }
    };

    let r = TransitionMatrix::identity(y.n());
    let result = solve(&y, &r, &solver).expect("solve failed");
    let edges = edges_from_laplacian(&result.l_hat, tau_edge);

    println!(
        "learned {} edges over {} vertices in {} outer iterations",
        edges.edge_count(),
        y.n(),
        result.outer_iterations
    );
    let mut listed: Vec<(usize, usize)> = edges.edges();
    listed.truncate(12);
    for (i, j) in listed {
        println!("  {i:>3} -- {j:<3} weight {:.4}", -result.l_hat.matrix()[[i, j]]);
    }
    if edges.edge_count() > 12 {
        println!("  ...");
    }

    if let Some(l_true) = truth {
        let report = MetricsReport::compute(&result.l_hat, &l_true, None, tau_edge).unwrap();
        println!(
            "against the generating graph: precision {:.3}, recall {:.3}, F {:.3}",
            report.precision.unwrap(),
            report.recall.unwrap(),
            report.f_measure.unwrap()
        );
    }
}
