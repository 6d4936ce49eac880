//! Ground-truth graph generators and the generative spatiotemporal signal model.

use ndarray::{s, Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{CglMatrix, Graph};
use crate::signal::SignalMatrix;
use crate::transition::TransitionMatrix;

/// Coordinate redraws allowed while hunting for a connected graph.
pub const CONNECTIVITY_RETRIES: usize = 100;
/// A graph counts as connected when the second-smallest Laplacian eigenvalue clears this.
pub const CONNECTIVITY_TOL: f64 = 1e-8;

/// Random geometric graph: vertices uniform in the unit square, Gaussian edge weights
/// `exp(-d^2 / (2 sigma^2))` kept only when they exceed `threshold`.
///
/// Coordinates are redrawn (up to [`CONNECTIVITY_RETRIES`] times) until the graph is
/// connected. Draw order per attempt: vertex 0 x, vertex 0 y, vertex 1 x, ...
pub fn generate_rgg<R: Rng>(n: usize, sigma: f64, threshold: f64, rng: &mut R) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 vertices, got {n}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
    }
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::Config(format!("threshold must lie in [0,1), got {threshold}")));
    }
    for _ in 0..CONNECTIVITY_RETRIES {
        let coords = draw_coords(n, rng);
        let weights = gaussian_weights(&coords, sigma, threshold);
        let graph = Graph::new(weights, Some(coords))?;
        if is_connected(&graph)? {
            return Ok(graph);
        }
    }
    Err(Error::Generation {
        attempts: CONNECTIVITY_RETRIES,
        reason: format!(
            "no connected geometric graph at n={n}, sigma={sigma}, threshold={threshold}; \
             lower the threshold or increase sigma"
        ),
    })
}

/// k-nearest-neighbor graph on uniform random coordinates, edge weights `1/distance`,
/// edge set the symmetric union of the directed kNN relations.
///
/// Vertices that collide exactly (infinite weight) are resampled; disconnected draws
/// are retried like the geometric generator.
pub fn generate_grid<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Graph> {
    if k == 0 || n <= k {
        return Err(Error::Config(format!("need n > k >= 1, got n={n}, k={k}")));
    }
    for _ in 0..CONNECTIVITY_RETRIES {
        let mut coords = draw_coords(n, rng);
        resample_duplicates(&mut coords, rng)?;
        let weights = knn_weights(&coords, k);
        let graph = Graph::new(weights, Some(coords))?;
        if is_connected(&graph)? {
            return Ok(graph);
        }
    }
    Err(Error::Generation {
        attempts: CONNECTIVITY_RETRIES,
        reason: format!("no connected {k}-nearest-neighbor graph at n={n}"),
    })
}

fn draw_coords<R: Rng>(n: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_fn((n, 2), |_| rng.random_range(0.0..1.0))
}

fn dist2(coords: &Array2<f64>, i: usize, j: usize) -> f64 {
    let dx = coords[[i, 0]] - coords[[j, 0]];
    let dy = coords[[i, 1]] - coords[[j, 1]];
    dx * dx + dy * dy
}

fn gaussian_weights(coords: &Array2<f64>, sigma: f64, threshold: f64) -> Array2<f64> {
    let n = coords.nrows();
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let v = (-dist2(coords, i, j) / (2.0 * sigma * sigma)).exp();
            if v > threshold {
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
    }
    w
}

fn resample_duplicates<R: Rng>(coords: &mut Array2<f64>, rng: &mut R) -> Result<()> {
    let n = coords.nrows();
    'outer: for _ in 0..CONNECTIVITY_RETRIES {
        for i in 0..n {
            for j in i + 1..n {
                if dist2(coords, i, j) == 0.0 {
                    coords[[j, 0]] = rng.random_range(0.0..1.0);
                    coords[[j, 1]] = rng.random_range(0.0..1.0);
                    continue 'outer;
                }
            }
        }
        return Ok(());
    }
    Err(Error::Generation {
        attempts: CONNECTIVITY_RETRIES,
        reason: "could not separate duplicate coordinates".into(),
    })
}

fn knn_weights(coords: &Array2<f64>, k: usize) -> Array2<f64> {
    let n = coords.nrows();
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        // Ties broken by vertex index so generation is deterministic.
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| {
            dist2(coords, i, a).partial_cmp(&dist2(coords, i, b)).unwrap().then(a.cmp(&b))
        });
        for &j in order.iter().take(k) {
            let weight = 1.0 / dist2(coords, i, j).sqrt();
            w[[i, j]] = weight;
            w[[j, i]] = weight;
        }
    }
    w
}

fn is_connected(graph: &Graph) -> Result<bool> {
    Ok(graph.laplacian().eigendecompose()?.fiedler_value() > CONNECTIVITY_TOL)
}

/// Draws clean signals `X` and noisy observations `Y` from the generative model.
///
/// The process innovation `v_t` lives in the span of the `rank` lowest-frequency
/// eigenvectors of `l`, with component variances `1/lambda_i` (variance 0 along the
/// zero eigenvalue, the pseudo-inverse convention). The recursion is seeded with an
/// extra draw `x_0 = v_0`, then `x_t = R x_{t-1} + v_t` for `t = 1..m`, and
/// `y_t = x_t + n_t` with i.i.d. Gaussian noise of standard deviation `sigma_n`.
///
/// Draw order: for each `t = 0..=m` the `rank` standard normals of `v_t` in ascending
/// eigenvalue order, then (when `sigma_n > 0`) the noise column by column, top to bottom.
pub fn generate_signals<R: Rng>(
    l: &CglMatrix,
    r: &TransitionMatrix,
    rank: usize,
    m: usize,
    sigma_n: f64,
    rng: &mut R,
) -> Result<(SignalMatrix, SignalMatrix)> {
    let n = l.n();
    if rank == 0 || rank > n {
        return Err(Error::Config(format!("rank must lie in 1..={n}, got {rank}")));
    }
    if m == 0 {
        return Err(Error::Config("need at least one time instant".into()));
    }
    if r.n() != n {
        return Err(Error::Dimension(format!("transition size {} vs {} vertices", r.n(), n)));
    }
    if !(sigma_n >= 0.0) {
        return Err(Error::Config(format!("noise std must be >= 0, got {sigma_n}")));
    }
    let spectrum = l.eigendecompose()?;
    if spectrum.fiedler_value() <= CONNECTIVITY_TOL {
        return Err(Error::Validation(format!(
            "signal generation needs a connected graph (second eigenvalue {:.3e})",
            spectrum.fiedler_value()
        )));
    }
    let basis = spectrum.eigenvectors().slice(s![.., ..rank]).to_owned();
    let stds: Array1<f64> = spectrum.eigenvalues().slice(s![..rank]).mapv(|lam| {
        if lam > CONNECTIVITY_TOL {
            1.0 / lam.sqrt()
        } else {
            0.0
        }
    });

    let draw_v = |rng: &mut R| -> Array1<f64> {
        let z: Array1<f64> =
            (0..rank).map(|i| stds[i] * rng.sample::<f64, _>(StandardNormal)).collect();
        basis.dot(&z)
    };

    let mut x = Array2::zeros((n, m));
    let mut prev = draw_v(rng); // x_0 = v_0
    for t in 0..m {
        let xt = r.apply_vec(prev.view()) + draw_v(rng);
        x.column_mut(t).assign(&xt);
        prev = xt;
    }

    let mut y = x.clone();
    if sigma_n > 0.0 {
        for t in 0..m {
            for i in 0..n {
                y[[i, t]] += sigma_n * rng.sample::<f64, _>(StandardNormal);
            }
        }
    }
    Ok((SignalMatrix::new(x)?, SignalMatrix::new(y)?))
}
