//! Benchmark harness: generates instances per spec, solves each one, and
//! aggregates success rate, dual iteration counts, and solve wall time.
//!
//! Instance `i` of a spec uses seed `spec.seed + i`, so a rerun with the same
//! specs reproduces every instance and every solver trajectory bit for bit;
//! only the timing column varies between runs. Success is scored against the
//! planted point for the `random` family (relative error below a threshold)
//! and against the enumeration oracle (small `n`) or the certificate (large
//! `n`) for the `simplex` family. Instances within a spec are solved in
//! parallel when the `parallel` feature is on; aggregation always walks the
//! outcomes in instance order, so the averages are identical either way.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dual_primal;
use crate::dual_primal::CertificateKind;
use crate::gen::{self, GenError, GenFamily, GenSpec};
use crate::oracle;
use crate::spadmm::{SolverConfig, SolverError};

/// Exact header of the emitted CSV.
pub const CSV_HEADER: &str = "family,n,m,r,instances,mean_iters,success_rate,mean_cpu_s";

/// Default relative-error threshold for scoring the `random` family.
pub const DEFAULT_SUCCESS_REL_ERR: f64 = 1e-2;

/// Slack allowed over the enumeration optimum when scoring small simplex
/// instances.
const ORACLE_SLACK: f64 = 1e-6;

/// Harness failures: bad parameters or an invalid spec/config. Individual
/// solve failures never abort a run; they count as unsuccessful instances.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

fn default_success_rel_err() -> f64 {
    DEFAULT_SUCCESS_REL_ERR
}

/// On-disk description of a benchmark run: the specs, how many instances per
/// spec, the solver configuration, and the success threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub per_spec_instances: usize,
    #[serde(default = "default_success_rel_err")]
    pub success_rel_err: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    pub specs: Vec<GenSpec>,
}

/// Runs a whole [`BenchConfig`].
pub fn run_bench_config(cfg: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    run_bench(&cfg.specs, cfg.per_spec_instances, &cfg.solver, cfg.success_rel_err)
}

/// One aggregated line of benchmark output.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub family: GenFamily,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub instances: usize,
    /// Mean dual iterations over instances whose solve returned a solution;
    /// zero when none did.
    pub mean_iterations: f64,
    pub success_rate: f64,
    /// Mean wall time of the solve call alone, over all instances.
    pub mean_cpu_seconds: f64,
}

struct InstanceOutcome {
    seconds: f64,
    iterations: Option<usize>,
    success: bool,
}

fn run_instance(
    spec: &GenSpec,
    index: usize,
    config: &SolverConfig,
    success_rel_err: f64,
) -> Result<InstanceOutcome, GenError> {
    let inst = GenSpec { seed: spec.seed.wrapping_add(index as u64), ..spec.clone() };
    let (problem, xopt) = gen::generate(&inst)?;
    let start = Instant::now();
    let solved = dual_primal::solve(&problem, config);
    let seconds = start.elapsed().as_secs_f64();
    let (iterations, success) = match solved {
        Ok(sol) => {
            let success = match spec.family {
                GenFamily::RandomPlanted => {
                    let xopt = xopt.expect("planted family always returns its point");
                    let diff: f64 = sol
                        .x
                        .iter()
                        .zip(&xopt)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    let nx: f64 = sol.x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if nx == 0.0 {
                        diff == 0.0
                    } else {
                        diff / nx < success_rel_err
                    }
                }
                GenFamily::SimplexConstrained => {
                    if problem.n() <= oracle::ENUM_MAX_N {
                        match oracle::enumerate_optimal(&problem) {
                            Ok(truth) => sol.objective <= truth.optimum + ORACLE_SLACK,
                            Err(_) => false,
                        }
                    } else {
                        sol.certificate.kind != CertificateKind::Uncertified
                    }
                }
            };
            (Some(sol.dual_stats.iterations), success)
        }
        Err(_) => (None, false),
    };
    Ok(InstanceOutcome { seconds, iterations, success })
}

#[cfg(feature = "parallel")]
fn collect_outcomes(
    spec: &GenSpec,
    count: usize,
    config: &SolverConfig,
    success_rel_err: f64,
) -> Result<Vec<InstanceOutcome>, GenError> {
    (0..count)
        .into_par_iter()
        .map(|i| run_instance(spec, i, config, success_rel_err))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_outcomes(
    spec: &GenSpec,
    count: usize,
    config: &SolverConfig,
    success_rel_err: f64,
) -> Result<Vec<InstanceOutcome>, GenError> {
    (0..count).map(|i| run_instance(spec, i, config, success_rel_err)).collect()
}

/// Runs every spec for `per_spec_instances` instances and returns one row per
/// spec, in spec order.
pub fn run_bench(
    specs: &[GenSpec],
    per_spec_instances: usize,
    config: &SolverConfig,
    success_rel_err: f64,
) -> Result<Vec<BenchRow>, BenchError> {
    if per_spec_instances < 1 {
        return Err(BenchError::InvalidParam("per_spec_instances must be at least 1".into()));
    }
    if !(success_rel_err > 0.0 && success_rel_err.is_finite()) {
        return Err(BenchError::InvalidParam(format!(
            "success_rel_err = {success_rel_err} must be positive and finite"
        )));
    }
    config.validate()?;
    for spec in specs {
        spec.validate()?;
    }
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let outcomes = collect_outcomes(spec, per_spec_instances, config, success_rel_err)?;
        rows.push(aggregate(spec, &outcomes));
    }
    Ok(rows)
}

/// Folds per-instance outcomes into one row, in instance order. Errored
/// solves count as failures and are excluded from the iteration mean.
fn aggregate(spec: &GenSpec, outcomes: &[InstanceOutcome]) -> BenchRow {
    let solved: Vec<usize> = outcomes.iter().filter_map(|o| o.iterations).collect();
    let mean_iterations = if solved.is_empty() {
        0.0
    } else {
        solved.iter().sum::<usize>() as f64 / solved.len() as f64
    };
    let successes = outcomes.iter().filter(|o| o.success).count();
    let total_seconds: f64 = outcomes.iter().map(|o| o.seconds).sum();
    BenchRow {
        family: spec.family,
        n: spec.n,
        m: spec.m,
        r: spec.r,
        instances: outcomes.len(),
        mean_iterations,
        success_rate: successes as f64 / outcomes.len() as f64,
        mean_cpu_seconds: total_seconds / outcomes.len() as f64,
    }
}

/// Renders rows as CSV under [`CSV_HEADER`]. Every column except
/// `mean_cpu_s` is deterministic for fixed specs and seeds.
pub fn csv_string(rows: &[BenchRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6}\n",
            row.family.name(),
            row.n,
            row.m,
            row.r,
            row.instances,
            row.mean_iterations,
            row.success_rate,
            row.mean_cpu_seconds
        ));
    }
    out
}
