//! Runs a single solve and prints the outer objective trace together with
//! the per-iteration inner solver effort, to show where the work goes.

use stgl::experiment::{generate_trial_data, ExperimentConfig, GraphSpec, SignalSpec};
use stgl::solver::{solve, SolverConfig};
use stgl::transition::TransitionSpec;

fn main() {
    let config = ExperimentConfig {
        graph: GraphSpec::Rgg { n: 30, sigma: 0.5, threshold: 0.7 },
        signal: SignalSpec { rank: 3, m: 100, sigma_n: 0.5, transition: TransitionSpec::Identity },
        solver: SolverConfig::default(),
        sweep: None,
        trials: 1,
        seed: 2,
        tau_edge: 1e-4,
    };
    let data = generate_trial_data(&config, 0).expect("generation failed");

    let result = solve(&data.y, &data.transition, &config.solver).expect("solve failed");

    println!("outer   objective      graph admm   lowrank admm   cg steps");
    println!("    0   {:>12.4}   (initial)", result.objective_trace[0]);
    for (k, trace) in result.inner_traces.iter().enumerate() {
        println!(
            "{:>5}   {:>12.4}   {:>10}   {:>12}   {:>8}",
            k + 1,
            result.objective_trace[k + 1],
            trace.graph.iterations,
            trace.lowrank.iterations,
            trace.lowrank.cg_iterations,
        );
    }
    println!(
        "stopped after {} outer iterations; objective fell {:.4} -> {:.4}",
        result.outer_iterations,
        result.objective_trace.first().unwrap(),
        result.objective_trace.last().unwrap()
    );
}
