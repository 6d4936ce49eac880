//! Generates one synthetic trial and writes it out as CSV files: noisy
//! observations, the clean signals, the ground-truth Laplacian with its edge
//! list, and the transition coefficients.
//!
//! Usage: generate_dataset [OUT_DIR]   (default ./dataset)

use stgl::experiment::{generate_trial_data, ExperimentConfig, GraphSpec, SignalSpec};
use stgl::io;
use stgl::metrics::edges_from_laplacian;
use stgl::solver::SolverConfig;
use stgl::transition::TransitionSpec;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "dataset".into());
    let out = std::path::Path::new(&out);
    std::fs::create_dir_all(out).expect("cannot create the output directory");

    let config = ExperimentConfig {
        graph: GraphSpec::Rgg { n: 30, sigma: 0.5, threshold: 0.7 },
        signal: SignalSpec {
            rank: 3,
            m: 100,
            sigma_n: 0.5,
            transition: TransitionSpec::DiagonalGaussian { mean: 0.5, std: 0.25 },
        },
        solver: SolverConfig::default(),
        sweep: None,
        trials: 1,
        seed: 42,
        tau_edge: 1e-4,
    };

    let data = generate_trial_data(&config, 0).expect("generation failed");
    io::save_matrix(data.y.array(), &out.join("y.csv")).unwrap();
    io::save_matrix(data.x_true.array(), &out.join("x_true.csv")).unwrap();
    io::save_laplacian(
        &data.laplacian,
        &out.join("laplacian.csv"),
        &out.join("laplacian_edges.csv"),
        config.tau_edge,
    )
    .unwrap();
    io::save_matrix(&data.transition.dense(), &out.join("transition.csv")).unwrap();

    println!(
        "wrote a {} x {} dataset ({} edges) to {}",
        data.y.n(),
        data.y.m(),
        edges_from_laplacian(&data.laplacian, config.tau_edge).edge_count(),
        out.display()
    );
}
