//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use slp::linalg::Mat;
use slp::problem::Problem;

/// The 2x4 reference instance: two difference constraints, uniform costs and
/// bounds, budget 2. Its optimum is -2, attained on the two supports {0, 1}
/// and {2, 3}; the dual has a tie across all four coordinates, so support
/// certification fails and the solver must fall back to the restricted LP.
pub fn example_problem() -> Problem {
    Problem::new(
        Mat::from_rows(&[vec![1.0, -1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, -1.0]]),
        vec![0.0, 0.0],
        vec![-1.0, -1.0, -1.0, -1.0],
        vec![1.0, 1.0, 1.0, 1.0],
        2,
    )
    .unwrap()
}

/// Drops the final column of every CSV line (the wall-time column, which is
/// the only non-reproducible field).
pub fn strip_last_column(csv: &str) -> String {
    csv.lines()
        .map(|line| line.rsplit_once(',').map(|(head, _)| head).unwrap_or(line))
        .collect::<Vec<_>>()
        .join("\n")
}
