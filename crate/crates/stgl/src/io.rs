//! File formats: CSV matrices (row = vertex, column = time instant, no header,
//! an optional leading `#` comment line), Laplacians as dense CSV plus an
//! `i,j,weight` edge list, and JSON reports.
//!
//! Floats are written with 17 significant digits so a save/load round trip is
//! bit-exact.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::CglMatrix;
use crate::metrics::edges_from_laplacian;
use crate::signal::SignalMatrix;

/// Parses CSV text into a dense matrix. The first line is skipped if it starts
/// with `#`; every other line must hold the same number of comma-separated
/// numbers. Errors name the offending line and column (1-based).
pub fn parse_matrix(text: &str) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if idx == 0 && line.trim_start().starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, field) in line.split(',').enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                Error::Data(format!(
                    "line {line_no}, column {}: cannot parse {:?} as a number",
                    col + 1,
                    field.trim()
                ))
            })?;
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Data(format!(
                    "line {line_no}: expected {w} columns, found {}",
                    row.len()
                )));
            }
            Some(_) => {}
        }
        rows.push(row);
    }
    let n = rows.len();
    let m = width.ok_or_else(|| Error::Data("no data rows".into()))?;
    let mut out = Array2::zeros((n, m));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// Formats a matrix as CSV with 17-significant-digit scientific notation.
pub fn format_matrix(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Prefixes a parse error's message with the file it came from.
pub(crate) fn at_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    }
}

pub fn load_matrix(path: &Path) -> Result<SignalMatrix> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    let m = parse_matrix(&text).map_err(|e| at_path(path, e))?;
    SignalMatrix::new(m)
}

pub fn save_matrix(m: &Array2<f64>, path: &Path) -> Result<()> {
    fs::write(path, format_matrix(m)).map_err(Error::io(path))
}

/// Loads a dense CSV Laplacian and validates it as a CGL.
pub fn load_laplacian(path: &Path) -> Result<CglMatrix> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    let m = parse_matrix(&text).map_err(|e| at_path(path, e))?;
    CglMatrix::new(m)
}

/// Writes the Laplacian twice: dense CSV at `dense_path`, and the thresholded
/// edge list at `edges_path` as `i,j,weight` rows with `weight = -L(i,j)`.
pub fn save_laplacian(
    l: &CglMatrix,
    dense_path: &Path,
    edges_path: &Path,
    tau_edge: f64,
) -> Result<()> {
    save_matrix(l.matrix(), dense_path)?;
    let edges = edges_from_laplacian(l, tau_edge);
    let mut out = String::new();
    for (i, j) in edges.edges() {
        let weight = -l.matrix()[[i, j]];
        out.push_str(&format!("{i},{j},{weight:.16e}\n"));
    }
    fs::write(edges_path, out).map_err(Error::io(edges_path))
}

/// Serializes any report type as pretty JSON.
pub fn save_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    fs::write(path, json + "\n").map_err(Error::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    #[test]
    fn parses_a_plain_two_by_two() {
        let m = parse_matrix("1,2\n3,4\n").unwrap();
        assert_eq!(m, array![[1.0, 2.0], [3.0, 4.0]]);
    }

    #[test]
    fn skips_a_leading_comment_line_only() {
        let m = parse_matrix("# vertices x time\n1,2\n3,4\n").unwrap();
        assert_eq!(m.dim(), (2, 2));
        assert!(parse_matrix("1,2\n# not allowed here\n3,4\n").is_err());
    }

    #[test]
    fn names_the_line_and_column_of_a_bad_token() {
        let err = parse_matrix("1,2\n3,oops\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("column 2"), "{msg}");
    }

    #[test]
    fn rejects_ragged_rows_at_the_right_line() {
        let err = parse_matrix("1,2\n3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = Array2::from_shape_fn((7, 11), |_| rng.random_range(-10.0..10.0) / 3.0);
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.csv");
        save_matrix(&m, &path).unwrap();
        let back = load_matrix(&path).unwrap();
        assert_eq!(back.array(), &m);
    }

    #[test]
    fn laplacian_edge_list_matches_the_weights() {
        let l =
            CglMatrix::new(array![[1.5, -1.5, 0.0], [-1.5, 2.0, -0.5], [0.0, -0.5, 0.5]]).unwrap();
        let dir = tempdir().unwrap();
        let dense = dir.path().join("l.csv");
        let edges = dir.path().join("l_edges.csv");
        save_laplacian(&l, &dense, &edges, 1e-4).unwrap();
        let text = fs::read_to_string(&edges).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("0,1,1.5"));
        assert!(lines[1].starts_with("1,2,5.0"));
        let back = load_laplacian(&dense).unwrap();
        assert_eq!(back.matrix(), l.matrix());
    }

    #[test]
    fn load_reports_missing_files_with_the_path() {
        let err = load_matrix(Path::new("/nonexistent/x.csv")).unwrap_err();
        assert!(err.to_string().contains("x.csv"), "{err}");
    }
}
