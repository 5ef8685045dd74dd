//! Semi-proximal ADMM for the dual of the cardinality-constrained LP.
//!
//! The dual reformulation minimizes `-b'y + phi(l . z)` over `A'y - z = c`,
//! where `phi` sums the r largest non-negative entries. Each sweep solves a
//! linear system in y (exactly via a cached Cholesky of AA', or diagonally
//! after adding the semi-proximal term `lambda_max I - AA'`), applies the
//! capped-one-norm prox in z, and ascends the multiplier w.
//!
//! Sign convention: the multiplier is oriented so that w converges to the
//! solution of the convexified primal (`Aw = b`, `0 <= w <= l`, budget
//! `sum w_i/l_i <= r`), making `c'w` approach the dual value from the primal
//! side. The mirrored orientation (w update with the opposite sign) drives w
//! to the negative of that point, so the duality-gap metric eta would
//! stagnate at a positive constant and sparse recovery from w would be
//! impossible; only this sign closes the gap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Mat};
use crate::problem::Problem;
use crate::sparse_proj::{prox_sparse_l1, top_r_plus_sum};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("AA' is numerically zero; the y-subproblem is degenerate")]
    DegenerateMatrix,
    #[error("Cholesky factorization of AA' failed; use the spectral mode for rank-deficient rows")]
    FactorizationFailed,
    #[error("iterates became non-finite at iteration {iteration}")]
    NumericalBreakdown { iteration: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YMode {
    Auto,
    Factorize,
    Spectral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Penalty parameter of the augmented term.
    pub sigma: f64,
    /// Multiplier step length; must stay below (1 + sqrt 5)/2.
    pub tau: f64,
    /// Threshold for both stopping metrics.
    pub tol: f64,
    pub maxiter: usize,
    pub y_mode: YMode,
    /// Seed for randomized sub-steps (power-iteration start).
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            sigma: 1.0,
            tau: 1.618,
            tol: 1e-8,
            maxiter: 5000,
            y_mode: YMode::Auto,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let tau_limit = (1.0 + 5.0_f64.sqrt()) / 2.0;
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.tau > 0.0 && self.tau < tau_limit) {
            return Err(SolverError::InvalidConfig(format!(
                "tau must lie in (0, {tau_limit:.12}), got {}",
                self.tau
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.maxiter == 0 {
            return Err(SolverError::InvalidConfig("maxiter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Iterate {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    /// Relative infeasibility ||A'y - z - c|| / (1 + ||c||).
    pub zeta: f64,
    /// Relative duality gap |c'w - theta(y)| / max(1, |c'w|, |theta(y)|).
    pub eta: f64,
    /// Dual objective at the final y.
    pub theta_y: f64,
    pub status: SolveStatus,
}

/// One stopping-metric snapshot per iteration, streamed to trace sinks.
#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    pub iter: usize,
    pub zeta: f64,
    pub eta: f64,
    pub theta: f64,
}

/// Solver for the y-subproblem's normal equations.
#[derive(Clone, Debug)]
pub enum YUpdateKernel {
    /// Exact solve with the Cholesky factor of AA' (proximal term zero).
    Factorized { chol: Mat },
    /// Diagonal solve after adding `lambda_max I - AA'`, which is kept
    /// positive semidefinite by a small inflation of the eigenvalue bound.
    Spectral { lambda_max: f64 },
}

impl YUpdateKernel {
    pub fn mode_name(&self) -> &'static str {
        match self {
            YUpdateKernel::Factorized { .. } => "factorized",
            YUpdateKernel::Spectral { .. } => "spectral",
        }
    }
}

const CHOL_PIVOT_REL: f64 = 1e-12;
const POWER_TOL: f64 = 1e-12;
const POWER_CAP: usize = 10_000;
/// Relative inflation of the power-iteration eigenvalue estimate so the
/// spectral proximal term stays positive semidefinite despite the estimate
/// approaching the true value from below.
const LAMBDA_INFLATION: f64 = 1e-6;

pub fn build_y_kernel(problem: &Problem, config: &SolverConfig) -> Result<YUpdateKernel, SolverError> {
    let gram = problem.a.gram();
    let m = problem.m();
    let trace = gram.trace();
    if !trace.is_finite() || trace <= 0.0 {
        return Err(SolverError::DegenerateMatrix);
    }
    let pivot_floor = CHOL_PIVOT_REL * trace / m as f64;
    let factorize = || linalg::cholesky(&gram, pivot_floor);
    let spectral = || -> Result<YUpdateKernel, SolverError> {
        let lambda = linalg::power_iteration_largest(&gram, POWER_TOL, POWER_CAP, config.rng_seed);
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(SolverError::DegenerateMatrix);
        }
        Ok(YUpdateKernel::Spectral { lambda_max: lambda * (1.0 + LAMBDA_INFLATION) })
    };
    match config.y_mode {
        YMode::Factorize => factorize()
            .map(|chol| YUpdateKernel::Factorized { chol })
            .ok_or(SolverError::FactorizationFailed),
        YMode::Spectral => spectral(),
        YMode::Auto => match factorize() {
            Some(chol) => Ok(YUpdateKernel::Factorized { chol }),
            None => spectral(),
        },
    }
}

/// Precomputed shape of the z-subproblem. With a uniform bound vector the
/// prox applies directly; otherwise the subproblem is solved exactly in the
/// rescaled variable `l . z` (the semi-proximal weight `L^2/l_min^2 - I`
/// completes the quadratic to that metric).
#[derive(Clone, Debug)]
pub struct ZUpdateKernel {
    uniform: bool,
    l_min: f64,
    /// Prox threshold before dividing by sigma: l0 (uniform) or l_min^2.
    lambda_base: f64,
    l: Vec<f64>,
    /// Diagonal of L^2/l_min^2 - I (general case only).
    q_diag: Vec<f64>,
}

pub fn build_z_kernel(problem: &Problem) -> ZUpdateKernel {
    let l = problem.l.clone();
    let uniform = l.windows(2).all(|p| p[0] == p[1]);
    let l_min = l.iter().copied().fold(f64::INFINITY, f64::min);
    let lambda_base = if uniform { l[0] } else { l_min * l_min };
    let q_diag = if uniform {
        Vec::new()
    } else {
        l.iter().map(|&li| li * li / (l_min * l_min) - 1.0).collect()
    };
    ZUpdateKernel { uniform, l_min, lambda_base, l, q_diag }
}

/// theta(y) = b'y - (sum of the r largest entries of [l . (A'y - c)]_+),
/// reusing a precomputed A'y.
fn theta_from_aty(problem: &Problem, y: &[f64], aty: &[f64]) -> f64 {
    let arg: Vec<f64> = aty
        .iter()
        .zip(&problem.c)
        .zip(&problem.l)
        .map(|((&t, &ci), &li)| li * (t - ci))
        .collect();
    let penalty = top_r_plus_sum(&arg, problem.r).expect("r is within range by Problem invariant");
    linalg::dot(&problem.b, y) - penalty
}

/// Lagrangian dual objective of the sparse LP.
pub fn eval_dual_objective(problem: &Problem, y: &[f64]) -> f64 {
    assert_eq!(y.len(), problem.m(), "y must have length m");
    let aty = problem.a.tr_mul_vec(y);
    theta_from_aty(problem, y, &aty)
}

/// y-subproblem: minimizes the augmented Lagrangian in y, i.e. solves
/// `sigma (AA' + P) y = A(sigma z + sigma c - w) + b + sigma P y_k`.
pub fn update_y(
    kernel: &YUpdateKernel,
    problem: &Problem,
    config: &SolverConfig,
    iterate: &Iterate,
) -> Vec<f64> {
    let sigma = config.sigma;
    let mut tmp: Vec<f64> = iterate
        .z
        .iter()
        .zip(&problem.c)
        .zip(&iterate.w)
        .map(|((&zi, &ci), &wi)| sigma * (zi + ci) - wi)
        .collect();
    match kernel {
        YUpdateKernel::Factorized { chol } => {
            let mut rhs = problem.a.mul_vec(&tmp);
            for (r, &bi) in rhs.iter_mut().zip(&problem.b) {
                *r = (*r + bi) / sigma;
            }
            linalg::cholesky_solve(chol, &rhs)
        }
        YUpdateKernel::Spectral { lambda_max } => {
            // P y_k folds into the single product: sigma lambda y_k - sigma A(A'y_k).
            let aty_k = problem.a.tr_mul_vec(&iterate.y);
            for (t, &ai) in tmp.iter_mut().zip(&aty_k) {
                *t -= sigma * ai;
            }
            let mut rhs = problem.a.mul_vec(&tmp);
            let denom = sigma * lambda_max;
            for ((r, &bi), &yi) in rhs.iter_mut().zip(&problem.b).zip(&iterate.y) {
                *r = (*r + bi + sigma * lambda_max * yi) / denom;
            }
            rhs
        }
    }
}

/// z-subproblem: exact prox step at the center A'y_next - c + w/sigma.
pub fn update_z(
    zkernel: &ZUpdateKernel,
    problem: &Problem,
    config: &SolverConfig,
    y_next: &[f64],
    iterate: &Iterate,
) -> Vec<f64> {
    let aty = problem.a.tr_mul_vec(y_next);
    update_z_from_aty(zkernel, problem, config, &aty, &iterate.z, &iterate.w)
}

fn update_z_from_aty(
    zkernel: &ZUpdateKernel,
    problem: &Problem,
    config: &SolverConfig,
    aty: &[f64],
    z_prev: &[f64],
    w: &[f64],
) -> Vec<f64> {
    let sigma = config.sigma;
    let lambda = zkernel.lambda_base / sigma;
    let center = |i: usize| aty[i] - problem.c[i] + w[i] / sigma;
    if zkernel.uniform {
        let ctr: Vec<f64> = (0..aty.len()).map(center).collect();
        prox_sparse_l1(&ctr, lambda, problem.r).expect("validated prox arguments")
    } else {
        let lm2 = zkernel.l_min * zkernel.l_min;
        let t: Vec<f64> = (0..aty.len())
            .map(|i| (center(i) + zkernel.q_diag[i] * z_prev[i]) * lm2 / zkernel.l[i])
            .collect();
        let zeta = prox_sparse_l1(&t, lambda, problem.r).expect("validated prox arguments");
        zeta.iter().zip(&zkernel.l).map(|(&v, &li)| v / li).collect()
    }
}

/// Multiplier ascent along the infeasibility direction.
pub fn update_w(
    config: &SolverConfig,
    y_next: &[f64],
    z_next: &[f64],
    iterate: &Iterate,
    problem: &Problem,
) -> Vec<f64> {
    let aty = problem.a.tr_mul_vec(y_next);
    let step = config.tau * config.sigma;
    iterate
        .w
        .iter()
        .zip(&aty)
        .zip(z_next)
        .zip(&problem.c)
        .map(|(((&wi, &ai), &zi), &ci)| wi + step * (ai - zi - ci))
        .collect()
}

/// Stopping metrics of an iterate: relative infeasibility and duality gap.
pub fn residuals(problem: &Problem, iterate: &Iterate) -> (f64, f64) {
    let aty = problem.a.tr_mul_vec(&iterate.y);
    let norm_c = linalg::norm2(&problem.c);
    let res: f64 = aty
        .iter()
        .zip(&iterate.z)
        .zip(&problem.c)
        .map(|((&ai, &zi), &ci)| {
            let ri = ai - zi - ci;
            ri * ri
        })
        .sum();
    let zeta = res.sqrt() / (1.0 + norm_c);
    let theta = theta_from_aty(problem, &iterate.y, &aty);
    let cw = linalg::dot(&problem.c, &iterate.w);
    let eta = (cw - theta).abs() / 1.0_f64.max(cw.abs()).max(theta.abs());
    (zeta, eta)
}

pub fn solve_dual(problem: &Problem, config: &SolverConfig) -> Result<(Iterate, SolveStats), SolverError> {
    solve_dual_traced(problem, config, |_| {})
}

/// Full solve from (y, z, w) = (0, -c, 0), invoking `on_iter` once per
/// iteration with the stopping metrics.
pub fn solve_dual_traced(
    problem: &Problem,
    config: &SolverConfig,
    mut on_iter: impl FnMut(&TraceRow),
) -> Result<(Iterate, SolveStats), SolverError> {
    config.validate()?;
    debug_assert!(problem.validate().is_ok());
    let ykernel = build_y_kernel(problem, config)?;
    let zkernel = build_z_kernel(problem);
    let (m, n) = (problem.m(), problem.n());
    let sigma = config.sigma;
    let step = config.tau * sigma;
    let norm_c = linalg::norm2(&problem.c);

    let mut y = vec![0.0; m];
    let mut z: Vec<f64> = problem.c.iter().map(|&ci| -ci).collect();
    let mut w = vec![0.0; n];
    // A'y of the previous iterate; y^0 = 0 matches the zero start.
    let mut aty_prev = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut rhs = vec![0.0; m];
    let mut aty = vec![0.0; n];

    let mut stats = SolveStats {
        iterations: config.maxiter,
        zeta: f64::INFINITY,
        eta: f64::INFINITY,
        theta_y: f64::NAN,
        status: SolveStatus::MaxIterReached,
    };

    for k in 1..=config.maxiter {
        // y step: one A-product; the spectral proximal term reuses A'y_prev.
        for i in 0..n {
            tmp[i] = sigma * (z[i] + problem.c[i]) - w[i];
        }
        if let YUpdateKernel::Spectral { .. } = ykernel {
            for i in 0..n {
                tmp[i] -= sigma * aty_prev[i];
            }
        }
        problem.a.mul_vec_into(&tmp, &mut rhs);
        match &ykernel {
            YUpdateKernel::Factorized { chol } => {
                for (r, &bi) in rhs.iter_mut().zip(&problem.b) {
                    *r = (*r + bi) / sigma;
                }
                y = linalg::cholesky_solve(chol, &rhs);
            }
            YUpdateKernel::Spectral { lambda_max } => {
                let denom = sigma * lambda_max;
                for j in 0..m {
                    y[j] = (rhs[j] + problem.b[j] + sigma * lambda_max * y[j]) / denom;
                }
            }
        }
        problem.a.tr_mul_vec_into(&y, &mut aty);

        z = update_z_from_aty(&zkernel, problem, config, &aty, &z, &w);

        let mut res_sq = 0.0;
        for i in 0..n {
            let ri = aty[i] - z[i] - problem.c[i];
            res_sq += ri * ri;
            w[i] += step * ri;
        }
        let zeta = res_sq.sqrt() / (1.0 + norm_c);
        let theta = theta_from_aty(problem, &y, &aty);
        let cw = linalg::dot(&problem.c, &w);
        let eta = (cw - theta).abs() / 1.0_f64.max(cw.abs()).max(theta.abs());
        if !zeta.is_finite() || !eta.is_finite() {
            return Err(SolverError::NumericalBreakdown { iteration: k });
        }
        on_iter(&TraceRow { iter: k, zeta, eta, theta });
        std::mem::swap(&mut aty_prev, &mut aty);
        if zeta < config.tol && eta < config.tol {
            stats = SolveStats { iterations: k, zeta, eta, theta_y: theta, status: SolveStatus::Converged };
            break;
        }
        stats = SolveStats { iterations: k, zeta, eta, theta_y: theta, status: SolveStatus::MaxIterReached };
    }
    Ok((Iterate { y, z, w }, stats))
}
