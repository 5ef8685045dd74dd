//! Primal recovery from the dual solve: certify an index set from the dual
//! slack vector, or read the solution off the multiplier when it is already
//! r-sparse, then solve the LP restricted to the certified support.

use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::oracle::{self, LpStatus, OracleError};
use crate::problem::{IndexSet, Problem};
use crate::spadmm::{self, SolveStats, SolverConfig, SolverError, TraceRow};

#[derive(Debug, Error)]
pub enum PrimalError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Lp(#[from] OracleError),
    #[error("the LP restricted to the certified support is infeasible")]
    RestrictedInfeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    /// The multiplier itself is r-sparse and feasible after clipping.
    SparseMultiplier,
    /// Every dual slack is strictly negative: the zero vector is optimal.
    ZeroSolution,
    /// Exactly r strictly positive dual slacks.
    IndexSetCaseA,
    /// More than r positive slacks with a strict weighted gap at rank r.
    IndexSetCaseB,
    /// Fewer than r positive slacks and the next-ranked slack is strictly
    /// negative.
    IndexSetCaseC,
    /// Ties or sign ambiguity: the support is a heuristic, the returned
    /// point is feasible but not proven optimal.
    Uncertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// The certified support, present for the three index-set cases.
    pub index_set: Option<IndexSet>,
    /// Which inequality held or failed, for diagnostics.
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub certificate: Certificate,
    pub dual_stats: SolveStats,
    pub dual_objective: f64,
}

/// Stable non-increasing order of the weighted slacks l . z*.
fn weighted_order(problem: &Problem, z_star: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let weighted: Vec<f64> = z_star.iter().zip(&problem.l).map(|(&zi, &li)| li * zi).collect();
    let mut order: Vec<usize> = (0..problem.n()).collect();
    order.sort_unstable_by(|&i, &j| weighted[j].total_cmp(&weighted[i]).then(i.cmp(&j)));
    (weighted, order)
}

/// Default margin for the strict inequalities of `certify`.
pub fn default_certify_tol(problem: &Problem, z_star: &[f64]) -> f64 {
    let winf = z_star
        .iter()
        .zip(&problem.l)
        .fold(0.0_f64, |acc, (&zi, &li)| acc.max((li * zi).abs()));
    1e-6 * (1.0 + winf)
}

/// Certifies an optimal support from the dual slacks z* = A'y* - c.
///
/// Ranks indices by l . z* (stable by index) as t_1, ..., t_n and checks, in
/// order: all slacks strictly negative (zero solution), exactly r strictly
/// positive, more than r positive with a strict gap at rank r, fewer than r
/// positive with the (r+1)-th strictly negative. Anything else is a tie
/// pattern the theory cannot certify.
pub fn certify(problem: &Problem, z_star: &[f64], tol: f64) -> Certificate {
    assert_eq!(z_star.len(), problem.n(), "z* must have length n");
    let r = problem.r;
    let (weighted, order) = weighted_order(problem, z_star);
    let top_r = || IndexSet::new(order[..r].to_vec(), problem.n()).expect("order is a permutation");

    if z_star.iter().all(|&v| v < -tol) {
        return Certificate {
            kind: CertificateKind::ZeroSolution,
            index_set: None,
            detail: "all dual slacks strictly negative; the zero vector is optimal".into(),
        };
    }
    let pos = z_star.iter().filter(|&&v| v > tol).count();
    if pos == r {
        return Certificate {
            kind: CertificateKind::IndexSetCaseA,
            index_set: Some(top_r()),
            detail: format!("exactly r = {r} strictly positive dual slacks"),
        };
    }
    if pos > r && weighted[order[r - 1]] > weighted[order[r]] + tol {
        return Certificate {
            kind: CertificateKind::IndexSetCaseB,
            index_set: Some(top_r()),
            detail: format!(
                "{pos} positive slacks and weighted gap {} > {} at rank r",
                weighted[order[r - 1]],
                weighted[order[r]]
            ),
        };
    }
    if pos > 0 && pos < r && r < problem.n() && z_star[order[r]] < -tol {
        return Certificate {
            kind: CertificateKind::IndexSetCaseC,
            index_set: Some(top_r()),
            detail: format!("{pos} positive slacks and slack {} strictly negative at rank r+1", z_star[order[r]]),
        };
    }
    Certificate {
        kind: CertificateKind::Uncertified,
        index_set: None,
        detail: format!("{pos} positive slacks with ties or sign ambiguity around rank r"),
    }
}

/// Solves the LP restricted to the support `i_set` (columns of A indexed by
/// it, box bounds inherited), embedding the minimizer back into n
/// coordinates with zeros off the support.
pub fn restricted_lp(
    problem: &Problem,
    i_set: &IndexSet,
) -> Result<(Vec<f64>, f64, LpStatus), OracleError> {
    assert!(!i_set.is_empty(), "restricted support must be non-empty");
    oracle::restricted_point(problem, i_set.indices())
}

pub fn solve(problem: &Problem, config: &SolverConfig) -> Result<Solution, PrimalError> {
    solve_traced(problem, config, |_| {})
}

/// Full pipeline with a per-iteration trace hook on the dual solve.
pub fn solve_traced(
    problem: &Problem,
    config: &SolverConfig,
    on_iter: impl FnMut(&TraceRow),
) -> Result<Solution, PrimalError> {
    let (it, stats) = spadmm::solve_dual_traced(problem, config, on_iter)?;
    let theta = stats.theta_y;

    // Multiplier route: an (approximately) r-sparse w is itself the answer.
    let winf = linalg::norm_inf(&it.w);
    let feastol = 1e-6 * (1.0 + winf);
    let support = it.w.iter().filter(|&&v| v.abs() > feastol).count();
    if support <= problem.r {
        let x: Vec<f64> =
            it.w.iter().zip(&problem.l).map(|(&wi, &li)| wi.clamp(0.0, li)).collect();
        if problem.is_feasible(&x, 1e-6) {
            let objective = problem.objective(&x);
            return Ok(Solution {
                x,
                objective,
                certificate: Certificate {
                    kind: CertificateKind::SparseMultiplier,
                    index_set: None,
                    detail: format!("multiplier has {support} <= r significant entries and clips to a feasible point"),
                },
                dual_stats: stats,
                dual_objective: theta,
            });
        }
        // Clipping broke feasibility: fall through to the certified route.
    }

    let aty = problem.a.tr_mul_vec(&it.y);
    let z_star: Vec<f64> = aty.iter().zip(&problem.c).map(|(&ai, &ci)| ai - ci).collect();
    let tol = default_certify_tol(problem, &z_star);
    let certificate = certify(problem, &z_star, tol);
    let (_, order) = weighted_order(problem, &z_star);
    let i_star = IndexSet::new(order[..problem.r].to_vec(), problem.n()).expect("order is a permutation");
    let (x, objective, status) = restricted_lp(problem, &i_star)?;
    if status == LpStatus::Infeasible {
        return Err(PrimalError::RestrictedInfeasible);
    }
    Ok(Solution { x, objective, certificate, dual_stats: stats, dual_objective: theta })
}
