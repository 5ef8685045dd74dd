//! Sparse LP instances: the data `(A, b, c, l, r)` for
//!
//! ```text
//! min c'x   s.t.  Ax = b,  0 <= x <= l,  nnz(x) <= r,
//! ```
//!
//! with validation, feasibility checks, and JSON file I/O.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Mat;

/// Default feasibility tolerance, matching the solver's stopping tolerance.
pub const DEFAULT_FEASTOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Format(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("upper bound l[{index}] = {value} is not strictly positive")]
    NonPositiveBound { index: usize, value: f64 },
    #[error("sparsity level r = {r} outside 1..={n}")]
    SparsityOutOfRange { r: usize, n: usize },
    #[error("non-finite entry in {field} at index {index}")]
    NonFiniteEntry { field: &'static str, index: usize },
}

/// A sparse LP instance. Immutable after construction; `validate` checks all
/// invariants (consistent dimensions, `l > 0`, `1 <= r <= n`, finite data).
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub a: Mat,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub l: Vec<f64>,
    pub r: usize,
}

impl Problem {
    pub fn new(a: Mat, b: Vec<f64>, c: Vec<f64>, l: Vec<f64>, r: usize) -> Result<Self, ProblemError> {
        let p = Problem { a, b, c, l, r };
        p.validate()?;
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let (m, n) = (self.a.rows(), self.a.cols());
        if n == 0 || m == 0 {
            return Err(ProblemError::DimensionMismatch(format!(
                "A is {m}x{n}; both dimensions must be positive"
            )));
        }
        if self.b.len() != m {
            return Err(ProblemError::DimensionMismatch(format!(
                "b has length {}, expected m = {m}",
                self.b.len()
            )));
        }
        if self.c.len() != n {
            return Err(ProblemError::DimensionMismatch(format!(
                "c has length {}, expected n = {n}",
                self.c.len()
            )));
        }
        if self.l.len() != n {
            return Err(ProblemError::DimensionMismatch(format!(
                "l has length {}, expected n = {n}",
                self.l.len()
            )));
        }
        if self.r < 1 || self.r > n {
            return Err(ProblemError::SparsityOutOfRange { r: self.r, n });
        }
        for (index, &value) in self.a.data().iter().enumerate() {
            if !value.is_finite() {
                return Err(ProblemError::NonFiniteEntry { field: "A", index });
            }
        }
        for (field, v) in [("b", &self.b), ("c", &self.c), ("l", &self.l)] {
            if let Some(index) = v.iter().position(|x| !x.is_finite()) {
                return Err(ProblemError::NonFiniteEntry { field, index });
            }
        }
        if let Some(index) = self.l.iter().position(|&x| x <= 0.0) {
            return Err(ProblemError::NonPositiveBound { index, value: self.l[index] });
        }
        Ok(())
    }

    /// True iff `x` satisfies `Ax = b`, the box, and the sparsity budget, all
    /// up to `feastol`. Support is counted as entries with `|x_i| > feastol`.
    pub fn is_feasible(&self, x: &[f64], feastol: f64) -> bool {
        if x.len() != self.n() {
            return false;
        }
        let ax = self.a.mul_vec(x);
        let resid: f64 = ax
            .iter()
            .zip(&self.b)
            .map(|(axi, bi)| (axi - bi) * (axi - bi))
            .sum::<f64>()
            .sqrt();
        if resid > feastol {
            return false;
        }
        for (xi, li) in x.iter().zip(&self.l) {
            if *xi < -feastol || *xi > li + feastol {
                return false;
            }
        }
        let support = x.iter().filter(|xi| xi.abs() > feastol).count();
        support <= self.r
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.c, x)
    }
}

/// Sorted set of distinct 0-based column indices (a candidate support).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct IndexSet {
    indices: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexSetError {
    #[error("index {index} out of range for n = {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("duplicate index {index}")]
    Duplicate { index: usize },
}

impl IndexSet {
    /// Sorts `indices` and verifies they are distinct and `< n`.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self, IndexSetError> {
        indices.sort_unstable();
        for pair in indices.windows(2) {
            if pair[0] == pair[1] {
                return Err(IndexSetError::Duplicate { index: pair[0] });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(IndexSetError::OutOfRange { index: last, n });
            }
        }
        Ok(IndexSet { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    m: usize,
    n: usize,
    r: usize,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Vec<f64>>>,
    #[serde(rename = "A_sparse", default, skip_serializing_if = "Option::is_none")]
    a_sparse: Option<Vec<(usize, usize, f64)>>,
    b: Vec<f64>,
    c: Vec<f64>,
    l: Vec<f64>,
}

/// Parses a JSON instance. `A` is given either dense (`"A"`, list of rows) or
/// as 1-based triplets (`"A_sparse"`, converted to dense).
pub fn load_problem(path: impl AsRef<Path>) -> Result<Problem, ProblemError> {
    let text = fs::read_to_string(path)?;
    problem_from_json(&text)
}

pub fn problem_from_json(text: &str) -> Result<Problem, ProblemError> {
    let file: ProblemFile = serde_json::from_str(text)?;
    let (m, n) = (file.m, file.n);
    let a = match (file.a, file.a_sparse) {
        (Some(rows), None) => {
            if rows.len() != m {
                return Err(ProblemError::DimensionMismatch(format!(
                    "A has {} rows, expected m = {m}",
                    rows.len()
                )));
            }
            if let Some(bad) = rows.iter().find(|row| row.len() != n) {
                return Err(ProblemError::DimensionMismatch(format!(
                    "A row has length {}, expected n = {n}",
                    bad.len()
                )));
            }
            Mat::from_rows(&rows)
        }
        (None, Some(triplets)) => {
            let mut a = Mat::zeros(m, n);
            for &(i, j, v) in &triplets {
                if i < 1 || i > m || j < 1 || j > n {
                    return Err(ProblemError::Format(format!(
                        "A_sparse entry ({i}, {j}) outside 1..={m} x 1..={n}"
                    )));
                }
                a.set(i - 1, j - 1, v);
            }
            a
        }
        (Some(_), Some(_)) => {
            return Err(ProblemError::Format("both A and A_sparse given".into()));
        }
        (None, None) => {
            return Err(ProblemError::Format("neither A nor A_sparse given".into()));
        }
    };
    Problem::new(a, file.b, file.c, file.l, file.r)
}

pub fn save_problem(problem: &Problem, path: impl AsRef<Path>) -> Result<(), ProblemError> {
    let text = problem_to_json(problem)?;
    fs::write(path, text)?;
    Ok(())
}

pub fn problem_to_json(problem: &Problem) -> Result<String, ProblemError> {
    let file = ProblemFile {
        m: problem.m(),
        n: problem.n(),
        r: problem.r,
        a: Some((0..problem.m()).map(|i| problem.a.row(i).to_vec()).collect()),
        a_sparse: None,
        b: problem.b.clone(),
        c: problem.c.clone(),
        l: problem.l.clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}
