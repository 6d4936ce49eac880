//! Shared helpers for unit tests across modules. Compiled only under `cfg(test)`.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// Connected random graph: a weighted path backbone plus extra edges with
/// probability `density`.
pub(crate) fn random_graph(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut w = Array2::zeros((n, n));
    for i in 0..n - 1 {
        let v = rng.random_range(0.2..1.0);
        w[[i, i + 1]] = v;
        w[[i + 1, i]] = v;
    }
    for i in 0..n {
        for j in i + 2..n {
            if rng.random_bool(density) {
                let v = rng.random_range(0.1..1.0);
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
    }
    Graph::new(w, None).unwrap()
}
