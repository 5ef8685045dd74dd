//! Cardinality-constrained linear programming toolkit.
//!
//! Solves `min c'x  s.t.  Ax = b, 0 <= x <= l, ||x||_0 <= r` through its
//! Lagrangian dual: the dual is reformulated as a convex program whose
//! nonsmooth term is a sparsity-capped one-norm, minimized by a semi-proximal
//! ADMM, after which a primal point is recovered from the multiplier or from
//! a restricted LP on a certified support.
//!
//! Module map:
//! - [`linalg`]: dense row-major matrix kernels (optionally rayon-parallel,
//!   bitwise-identical to the sequential path).
//! - [`problem`]: instance type, validation, JSON (de)serialization.
//! - [`sparse_proj`]: sparse projections, the capped-one-norm prox, and its
//!   subdifferential membership test.
//! - [`spadmm`]: the semi-proximal ADMM dual solver.
//! - [`dual_primal`]: support certification and primal recovery.
//! - [`oracle`]: independent ground truth (simplex, enumeration, Moreau prox).
//! - [`gen`]: seeded instance generators.
//! - [`bench`]: batch benchmark driver with CSV output.

pub mod bench;
pub mod dual_primal;
pub mod gen;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod sparse_proj;
pub mod spadmm;

pub use bench::{run_bench, BenchRow};
pub use dual_primal::{solve, Certificate, CertificateKind, Solution};
pub use gen::{generate, GenFamily, GenSpec};
pub use problem::{load_problem, save_problem, IndexSet, Problem, ProblemError};
pub use spadmm::{solve_dual, SolveStats, SolverConfig, SolverError};
