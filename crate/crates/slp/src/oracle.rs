//! Independent ground-truth machinery: a bounded-variable primal simplex,
//! exhaustive support enumeration, a Moreau-identity prox oracle, and a
//! feasibility report against the convexified sparse box.
//!
//! Everything here deliberately avoids the solver's own code paths so that
//! agreement between the two is meaningful evidence.

use thiserror::Error;

use crate::linalg::Mat;
use crate::problem::{IndexSet, Problem};
use crate::sparse_proj::SparseProjError;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Enumeration refuses instances above this width; the subset count grows as
/// a binomial coefficient.
pub const ENUM_MAX_N: usize = 25;

/// Minimizer/index-set lists are truncated at this length (the optimum stays
/// exact); degenerate objectives can make almost every support optimal.
pub const ENUM_MAX_WITNESSES: usize = 4096;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance too large for enumeration: n = {n} > {max}")]
    TooLarge { n: usize, max: usize },
    #[error("simplex iteration cap hit (possible cycling)")]
    CycleDetected,
    #[error("LP claims unboundedness, impossible under finite box bounds")]
    Unbounded,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

const ENTER_EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-11;
const RATIO_EPS: f64 = 1e-10;

struct SimplexState<'a> {
    a: &'a Mat,
    m: usize,
    k: usize,
    art_sign: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    in_basis: Vec<bool>,
    basis: Vec<usize>,
    binv: Mat,
    xb: Vec<f64>,
    phase_two: bool,
}

impl<'a> SimplexState<'a> {
    fn new(a: &'a Mat, b: &[f64], u: &[f64]) -> Self {
        let (m, k) = (a.rows(), a.cols());
        let art_sign: Vec<f64> = b.iter().map(|&bi| if bi >= 0.0 { 1.0 } else { -1.0 }).collect();
        let mut upper = u.to_vec();
        upper.extend(std::iter::repeat_n(f64::INFINITY, m));
        let mut binv = Mat::zeros(m, m);
        for (i, &s) in art_sign.iter().enumerate() {
            binv.set(i, i, s);
        }
        let mut in_basis = vec![false; k + m];
        let basis: Vec<usize> = (0..m).map(|i| k + i).collect();
        for &j in &basis {
            in_basis[j] = true;
        }
        let xb = b.iter().map(|&bi| bi.abs()).collect();
        SimplexState { a, m, k, art_sign, upper, at_upper: vec![false; k + m], in_basis, basis, binv, xb, phase_two: false }
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        if j < self.k {
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.a.get(i, j);
            }
        } else {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[j - self.k] = self.art_sign[j - self.k];
        }
    }

    fn dual_prices(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost[bi];
            if cb != 0.0 {
                for (t, yt) in y.iter_mut().enumerate() {
                    *yt += cb * self.binv.get(i, t);
                }
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        if j < self.k {
            let mut s = cost[j];
            for (i, &yi) in y.iter().enumerate() {
                s -= yi * self.a.get(i, j);
            }
            s
        } else {
            cost[j] - y[j - self.k] * self.art_sign[j - self.k]
        }
    }

    fn lower_of(&self, _j: usize) -> f64 {
        0.0
    }

    fn upper_of(&self, j: usize) -> f64 {
        if self.phase_two && j >= self.k {
            0.0
        } else {
            self.upper[j]
        }
    }

    /// One simplex phase with Bland's smallest-index rule.
    fn run_phase(&mut self, cost: &[f64], iter_cap: usize) -> Result<(), OracleError> {
        let mut work = vec![0.0; self.m];
        for _ in 0..iter_cap {
            let y = self.dual_prices(cost);
            let mut entering = None;
            for j in 0..self.k + self.m {
                if self.in_basis[j] || (self.phase_two && j >= self.k) {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if !self.at_upper[j] && d < -ENTER_EPS {
                    entering = Some((j, 1.0));
                    break;
                }
                if self.at_upper[j] && d > ENTER_EPS {
                    entering = Some((j, -1.0));
                    break;
                }
            }
            let Some((j, dir)) = entering else {
                return Ok(());
            };
            let mut col = vec![0.0; self.m];
            self.column(j, &mut col);
            for (i, w) in work.iter_mut().enumerate() {
                let mut s = 0.0;
                for (t, &ct) in col.iter().enumerate() {
                    s += self.binv.get(i, t) * ct;
                }
                *w = s;
            }
            // Ratio test: the entering variable moves by t along dir; basic
            // variable i changes by -dir * work[i] * t.
            let self_bound = self.upper_of(j) - self.lower_of(j);
            let mut limit = self_bound;
            let mut leaving: Option<usize> = None;
            for (i, &wi) in work.iter().enumerate().take(self.m) {
                let coeff = dir * wi;
                let vi = self.basis[i];
                let bound = if coeff > PIVOT_EPS {
                    (self.xb[i] - self.lower_of(vi)) / coeff
                } else if coeff < -PIVOT_EPS {
                    (self.upper_of(vi) - self.xb[i]) / (-coeff)
                } else {
                    continue;
                };
                let better = bound < limit - RATIO_EPS;
                let tie = (bound - limit).abs() <= RATIO_EPS;
                let wins_tie = tie
                    && match leaving {
                        Some(prev) => vi < self.basis[prev],
                        None => true,
                    };
                if better || wins_tie {
                    limit = bound.min(limit);
                    leaving = Some(i);
                }
            }
            if !limit.is_finite() {
                return Err(OracleError::Unbounded);
            }
            let t = limit.max(0.0);
            for (i, w) in work.iter().enumerate() {
                self.xb[i] -= t * dir * w;
            }
            match leaving {
                None => {
                    // Bound flip, basis unchanged.
                    self.at_upper[j] = !self.at_upper[j];
                }
                Some(rr) => {
                    let leaving_var = self.basis[rr];
                    self.at_upper[leaving_var] = dir * work[rr] < 0.0;
                    self.in_basis[leaving_var] = false;
                    let entering_start =
                        if self.at_upper[j] { self.upper_of(j) } else { self.lower_of(j) };
                    let entering_value = entering_start + dir * t;
                    let pivot = work[rr];
                    let scale = 1.0 / pivot;
                    for tcol in 0..self.m {
                        let v = self.binv.get(rr, tcol) * scale;
                        self.binv.set(rr, tcol, v);
                    }
                    for (i, &f) in work.iter().enumerate().take(self.m) {
                        if i == rr || f == 0.0 {
                            continue;
                        }
                        for tcol in 0..self.m {
                            let v = self.binv.get(i, tcol) - f * self.binv.get(rr, tcol);
                            self.binv.set(i, tcol, v);
                        }
                    }
                    self.xb[rr] = entering_value;
                    self.basis[rr] = j;
                    self.in_basis[j] = true;
                    self.at_upper[j] = false;
                }
            }
        }
        Err(OracleError::CycleDetected)
    }

    fn structural_solution(&self, u: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.k];
        for (j, xj) in x.iter_mut().enumerate() {
            if !self.in_basis[j] {
                *xj = if self.at_upper[j] { u[j] } else { 0.0 };
            }
        }
        for (i, &vi) in self.basis.iter().enumerate() {
            if vi < self.k {
                x[vi] = self.xb[i];
            }
        }
        x
    }

    /// Bound from LP duality on the final basis; equals the primal value at
    /// optimality (internal consistency check).
    fn dual_bound(&self, cost: &[f64], b: &[f64], u: &[f64]) -> f64 {
        let y = self.dual_prices(cost);
        let mut v = crate::linalg::dot(&y, b);
        for (j, &uj) in u.iter().enumerate().take(self.k) {
            if !self.in_basis[j] && self.at_upper[j] {
                v += self.reduced_cost(cost, &y, j) * uj;
            }
        }
        v
    }
}

/// Exact solver for `min c'x  s.t.  Ax = b, 0 <= x <= u` by a two-phase
/// bounded-variable primal simplex (dense basis inverse, Bland's rule).
pub fn simplex_box_lp(
    a: &Mat,
    b: &[f64],
    c: &[f64],
    u: &[f64],
) -> Result<(Vec<f64>, f64, LpStatus), OracleError> {
    let (m, k) = (a.rows(), a.cols());
    if b.len() != m || c.len() != k || u.len() != k {
        return Err(OracleError::Dimension(format!(
            "A is {m}x{k}, b has {}, c has {}, u has {}",
            b.len(),
            c.len(),
            u.len()
        )));
    }
    let mut state = SimplexState::new(a, b, u);
    let iter_cap = 1000 + 200 * (k + m);

    let mut phase1_cost = vec![0.0; k + m];
    for cj in phase1_cost.iter_mut().skip(k) {
        *cj = 1.0;
    }
    state.run_phase(&phase1_cost, iter_cap)?;
    let infeasibility: f64 = state
        .basis
        .iter()
        .zip(&state.xb)
        .filter(|(&vi, _)| vi >= k)
        .map(|(_, &v)| v)
        .sum();
    let feastol = 1e-8 * (1.0 + crate::linalg::norm_inf(b));
    if infeasibility > feastol {
        return Ok((vec![0.0; k], f64::INFINITY, LpStatus::Infeasible));
    }

    state.phase_two = true;
    let mut phase2_cost = c.to_vec();
    phase2_cost.extend(std::iter::repeat_n(0.0, m));
    state.run_phase(&phase2_cost, iter_cap)?;

    let x = state.structural_solution(u);
    let value = crate::linalg::dot(c, &x);
    debug_assert!({
        let bound = state.dual_bound(&phase2_cost, b, u);
        (value - bound).abs() <= 1e-7 * (1.0 + value.abs())
    });
    Ok((x, value, LpStatus::Optimal))
}

/// Pascal's triangle up to `ENUM_MAX_N`; fits in u64 comfortably.
fn binomial_table(n: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; n + 1]; n + 1];
    for (i, row) in t.iter_mut().enumerate() {
        row[0] = 1;
        row[i] = 1;
    }
    for i in 2..=n {
        for j in 1..i {
            t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
        }
    }
    t
}

/// Lexicographic unranking of the `rank`-th r-subset of {0, .., n-1}.
fn unrank_combination(mut rank: u64, n: usize, r: usize, binom: &[Vec<u64>]) -> Vec<usize> {
    let mut out = Vec::with_capacity(r);
    let mut next = 0;
    for k in 0..r {
        for v in next..n {
            let with_v = binom[n - v - 1][r - k - 1];
            if rank < with_v {
                out.push(v);
                next = v + 1;
                break;
            }
            rank -= with_v;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct EnumResult {
    pub optimum: f64,
    pub minimizers: Vec<Vec<f64>>,
    pub optimal_index_sets: Vec<IndexSet>,
}

/// Ground truth by brute force: solves the restricted LP on every support of
/// size `r` and keeps the global best. `optimum` is `+inf` when no support
/// admits a feasible point.
pub fn enumerate_optimal(problem: &Problem) -> Result<EnumResult, OracleError> {
    let n = problem.n();
    if n > ENUM_MAX_N {
        return Err(OracleError::TooLarge { n, max: ENUM_MAX_N });
    }
    let r = problem.r;
    let binom = binomial_table(n);
    let total = binom[n][r];

    let solve_support = |rank: u64| -> Result<(f64, u64), OracleError> {
        let idx = unrank_combination(rank, n, r, &binom);
        let (value, status) = restricted_value(problem, &idx)?;
        let v = if status == LpStatus::Optimal { value } else { f64::INFINITY };
        Ok((v, rank))
    };

    #[cfg(feature = "parallel")]
    let best = (0..total)
        .into_par_iter()
        .map(solve_support)
        .try_reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| Ok(if (b.0, b.1) < (a.0, a.1) { b } else { a }),
        )?;
    #[cfg(not(feature = "parallel"))]
    let best = {
        let mut acc = (f64::INFINITY, u64::MAX);
        for rank in 0..total {
            let cand = solve_support(rank)?;
            if (cand.0, cand.1) < acc {
                acc = cand;
            }
        }
        acc
    };

    let optimum = best.0;
    if !optimum.is_finite() {
        return Ok(EnumResult { optimum, minimizers: Vec::new(), optimal_index_sets: Vec::new() });
    }
    let attain_tol = 1e-9 * (1.0 + optimum.abs());

    // A minimizer paired with the support it was found on.
    type Witness = (Vec<f64>, Vec<usize>);
    let collect_witness = |rank: u64| -> Result<Option<Witness>, OracleError> {
        let idx = unrank_combination(rank, n, r, &binom);
        let (x, value, status) = restricted_point(problem, &idx)?;
        if status == LpStatus::Optimal && value <= optimum + attain_tol {
            Ok(Some((x, idx)))
        } else {
            Ok(None)
        }
    };

    #[cfg(feature = "parallel")]
    let witnesses: Vec<Option<Witness>> =
        (0..total).into_par_iter().map(collect_witness).collect::<Result<_, _>>()?;
    #[cfg(not(feature = "parallel"))]
    let witnesses: Vec<Option<Witness>> =
        (0..total).map(collect_witness).collect::<Result<_, _>>()?;

    let mut minimizers = Vec::new();
    let mut optimal_index_sets = Vec::new();
    for w in witnesses.into_iter().flatten() {
        if optimal_index_sets.len() >= ENUM_MAX_WITNESSES {
            break;
        }
        let (x, idx) = w;
        if !minimizers.contains(&x) {
            minimizers.push(x);
        }
        optimal_index_sets.push(IndexSet::new(idx, n).expect("unranked set is valid"));
    }
    Ok(EnumResult { optimum, minimizers, optimal_index_sets })
}

fn restricted_columns(problem: &Problem, idx: &[usize]) -> (Mat, Vec<f64>, Vec<f64>) {
    let m = problem.m();
    let mut a = Mat::zeros(m, idx.len());
    for i in 0..m {
        for (jj, &j) in idx.iter().enumerate() {
            a.set(i, jj, problem.a.get(i, j));
        }
    }
    let c: Vec<f64> = idx.iter().map(|&j| problem.c[j]).collect();
    let u: Vec<f64> = idx.iter().map(|&j| problem.l[j]).collect();
    (a, c, u)
}

fn restricted_value(problem: &Problem, idx: &[usize]) -> Result<(f64, LpStatus), OracleError> {
    let (a, c, u) = restricted_columns(problem, idx);
    let (_, value, status) = simplex_box_lp(&a, &problem.b, &c, &u)?;
    Ok((value, status))
}

/// Restricted LP solution embedded back into length-n coordinates.
pub(crate) fn restricted_point(
    problem: &Problem,
    idx: &[usize],
) -> Result<(Vec<f64>, f64, LpStatus), OracleError> {
    let (a, c, u) = restricted_columns(problem, idx);
    let (sub_x, value, status) = simplex_box_lp(&a, &problem.b, &c, &u)?;
    let mut x = vec![0.0; problem.n()];
    if status == LpStatus::Optimal {
        for (&j, &v) in idx.iter().zip(&sub_x) {
            x[j] = v;
        }
    }
    Ok((x, value, status))
}

/// Moreau-identity oracle for the prox of `lambda * ||.||_(r)` (sum of the r
/// largest magnitudes): `w - proj_B(w)` with
/// `B = { mu : |mu_i| <= lambda, sum |mu_i| <= lambda r }`. The projection
/// reduces by sign symmetry to clipping `|w| - nu` into `[0, lambda]` where
/// the threshold `nu >= 0` is found by an exact breakpoint scan.
pub fn prox_oracle_kyfan(w: &[f64], lambda: f64, r: usize) -> Result<Vec<f64>, SparseProjError> {
    let n = w.len();
    if r < 1 || r > n {
        return Err(SparseProjError::SparsityOutOfRange { r, n });
    }
    if lambda <= 0.0 {
        return Err(SparseProjError::NonPositiveLambda);
    }
    let a: Vec<f64> = w.iter().map(|v| v.abs()).collect();
    let budget = lambda * r as f64;
    let clip_sum = |nu: f64| -> f64 { a.iter().map(|&ai| (ai - nu).clamp(0.0, lambda)).sum() };
    let mut nu = 0.0;
    if clip_sum(0.0) > budget {
        let mut points: Vec<f64> = a
            .iter()
            .flat_map(|&ai| [ai, ai - lambda])
            .filter(|&p| p > 0.0)
            .collect();
        points.sort_unstable_by(f64::total_cmp);
        points.dedup();
        let mut prev_nu = 0.0;
        let mut prev_f = clip_sum(0.0);
        for &p in &points {
            let f = clip_sum(p);
            if f <= budget {
                // Linear segment between prev_nu and p crosses the budget.
                let slope = (f - prev_f) / (p - prev_nu);
                nu = if slope == 0.0 { p } else { prev_nu + (budget - prev_f) / slope };
                break;
            }
            prev_nu = p;
            prev_f = f;
        }
    }
    Ok(w
        .iter()
        .zip(&a)
        .map(|(&wi, &ai)| wi - wi.signum() * (ai - nu).clamp(0.0, lambda))
        .collect())
}

/// Feasibility report for a point against the convexified sparse box
/// `{ Aw = b, 0 <= w <= l, sum w_i / l_i <= r }` plus the objective `c'w`.
#[derive(Clone, Debug)]
pub struct PhatReport {
    pub objective: f64,
    pub eq_residual: f64,
    pub box_violation: f64,
    pub budget: f64,
    pub budget_violation: f64,
    pub eq_ok: bool,
    pub box_ok: bool,
    pub budget_ok: bool,
    pub feasible: bool,
}

pub fn check_phat_point(problem: &Problem, w: &[f64], tol: f64) -> PhatReport {
    let aw = problem.a.mul_vec(w);
    let eq_residual = aw
        .iter()
        .zip(&problem.b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let box_violation = w
        .iter()
        .zip(&problem.l)
        .fold(0.0_f64, |acc, (&wi, &li)| acc.max(-wi).max(wi - li));
    let budget: f64 = w.iter().zip(&problem.l).map(|(wi, li)| wi / li).sum();
    let budget_violation = (budget - problem.r as f64).max(0.0);
    let eq_ok = eq_residual <= tol;
    let box_ok = box_violation <= tol;
    let budget_ok = budget_violation <= tol;
    PhatReport {
        objective: problem.objective(w),
        eq_residual,
        box_violation,
        budget,
        budget_violation,
        eq_ok,
        box_ok,
        budget_ok,
        feasible: eq_ok && box_ok && budget_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse_proj::{prox_sparse_l1, searching, SortedSplit};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example_fixture() -> Problem {
        Problem::new(
            Mat::from_rows(&[vec![1.0, -1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, -1.0]]),
            vec![0.0, 0.0],
            vec![-1.0, -1.0, -1.0, -1.0],
            vec![1.0, 1.0, 1.0, 1.0],
            2,
        )
        .unwrap()
    }

    #[test]
    fn simplex_solves_restricted_example() {
        let a = Mat::from_rows(&[vec![1.0, -1.0], vec![0.0, 0.0]]);
        let (x, value, status) =
            simplex_box_lp(&a, &[0.0, 0.0], &[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(status, LpStatus::Optimal);
        assert!((value + 2.0).abs() <= 1e-9);
        assert!((x[0] - 1.0).abs() <= 1e-9 && (x[1] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn simplex_detects_infeasibility() {
        let a = Mat::from_rows(&[vec![1.0]]);
        let (_, _, status) = simplex_box_lp(&a, &[2.0], &[1.0], &[1.0]).unwrap();
        assert_eq!(status, LpStatus::Infeasible);
    }

    /// Gaussian elimination with partial pivoting, for the vertex oracle.
    /// Index loops: the elimination reads row `col` while writing row `i`.
    #[allow(clippy::needless_range_loop)]
    fn gauss_solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
        let n = a.rows();
        let mut aug = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            for j in 0..n {
                aug[i][j] = a.get(i, j);
            }
            aug[i][n] = b[i];
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))?;
            if aug[piv][col].abs() < 1e-10 {
                return None;
            }
            aug.swap(col, piv);
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = aug[i][col] / aug[col][col];
                for j in col..=n {
                    aug[i][j] -= f * aug[col][j];
                }
            }
        }
        Some((0..n).map(|i| aug[i][n] / aug[i][i]).collect())
    }

    /// Brute-force box-LP optimum over all basic solutions (basis choice x
    /// nonbasic bound pattern).
    fn vertex_optimum(a: &Mat, b: &[f64], c: &[f64], u: &[f64]) -> Option<f64> {
        let (m, n) = (a.rows(), a.cols());
        let mut best: Option<f64> = None;
        let idx: Vec<usize> = (0..n).collect();
        let mut basis = vec![0usize; m];
        #[allow(clippy::too_many_arguments)]
        fn rec(
            cands: &[usize],
            k: usize,
            basis: &mut Vec<usize>,
            a: &Mat,
            b: &[f64],
            c: &[f64],
            u: &[f64],
            best: &mut Option<f64>,
        ) {
            let m = basis.len();
            if k == m {
                let nonbasic: Vec<usize> =
                    (0..a.cols()).filter(|j| !basis.contains(j)).collect();
                for mask in 0u32..(1 << nonbasic.len()) {
                    let mut rhs = b.to_vec();
                    let mut x = vec![0.0; a.cols()];
                    for (t, &j) in nonbasic.iter().enumerate() {
                        if mask >> t & 1 == 1 {
                            x[j] = u[j];
                            for (i, ri) in rhs.iter_mut().enumerate() {
                                *ri -= a.get(i, j) * u[j];
                            }
                        }
                    }
                    let mut bm = Mat::zeros(m, m);
                    for i in 0..m {
                        for (t, &j) in basis.iter().enumerate() {
                            bm.set(i, t, a.get(i, j));
                        }
                    }
                    if let Some(xb) = gauss_solve(&bm, &rhs) {
                        let ok = xb
                            .iter()
                            .zip(basis.iter())
                            .all(|(&v, &j)| v >= -1e-9 && v <= u[j] + 1e-9);
                        if ok {
                            for (t, &j) in basis.iter().enumerate() {
                                x[j] = xb[t];
                            }
                            let val = crate::linalg::dot(c, &x);
                            *best = Some(best.map_or(val, |bv: f64| bv.min(val)));
                        }
                    }
                }
                return;
            }
            let start = if k == 0 { 0 } else { basis[k - 1] + 1 };
            for pos in start..cands.len() {
                basis[k] = cands[pos];
                rec(cands, k + 1, basis, a, b, c, u, best);
            }
        }
        rec(&idx, 0, &mut basis, a, b, c, u, &mut best);
        best
    }

    #[test]
    fn simplex_matches_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut solved = 0;
        for _ in 0..40 {
            // The vertex helper enumerates m-column bases, so keep m <= n;
            // tall systems are covered separately below.
            let n = rng.gen_range(2..=6);
            let m = rng.gen_range(1..=3.min(n));
            let a = Mat::from_vec(m, n, (0..m * n).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
            // Plant feasibility: b = A * (random interior point).
            let x0: Vec<f64> =
                u.iter().map(|&uj| rng.gen_range(0.0..1.0) * uj).collect();
            let b = a.mul_vec(&x0);
            let (x, value, status) = simplex_box_lp(&a, &b, &c, &u).unwrap();
            assert_eq!(status, LpStatus::Optimal);
            let truth = vertex_optimum(&a, &b, &c, &u).expect("feasible by construction");
            assert!(
                (value - truth).abs() <= 1e-9 * (1.0 + truth.abs()),
                "value {value} vs vertex enumeration {truth}"
            );
            let ax = a.mul_vec(&x);
            for (axi, bi) in ax.iter().zip(&b) {
                assert!((axi - bi).abs() <= 1e-8);
            }
            solved += 1;
        }
        assert_eq!(solved, 40);
    }

    #[test]
    fn simplex_handles_more_rows_than_columns() {
        // Consistent duplicated row: unique feasible point x = 0.5.
        let a = Mat::from_rows(&[vec![1.0], vec![1.0]]);
        let (x, value, status) = simplex_box_lp(&a, &[0.5, 0.5], &[1.0], &[1.0]).unwrap();
        assert_eq!(status, LpStatus::Optimal);
        assert!((x[0] - 0.5).abs() <= 1e-9 && (value - 0.5).abs() <= 1e-9);
        // Inconsistent rows: infeasible.
        let (_, _, status) = simplex_box_lp(&a, &[0.5, 0.6], &[1.0], &[1.0]).unwrap();
        assert_eq!(status, LpStatus::Infeasible);
    }

    #[test]
    fn unranking_is_lexicographic_and_complete() {
        let binom = binomial_table(5);
        let mut seen = Vec::new();
        for rank in 0..binom[5][2] {
            seen.push(unrank_combination(rank, 5, 2, &binom));
        }
        assert_eq!(seen.len(), 10);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted, "ranks must enumerate in lexicographic order");
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[9], vec![3, 4]);
    }

    #[test]
    fn enumeration_finds_both_supports_of_the_example() {
        let res = enumerate_optimal(&example_fixture()).unwrap();
        assert!((res.optimum + 2.0).abs() <= 1e-9);
        let sets: Vec<&[usize]> =
            res.optimal_index_sets.iter().map(|s| s.indices()).collect();
        assert!(sets.contains(&[0usize, 1].as_slice()));
        assert!(sets.contains(&[2usize, 3].as_slice()));
        assert!(res
            .minimizers
            .iter()
            .any(|x| x.iter().zip(&[1.0, 1.0, 0.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-9)));
    }

    #[test]
    fn enumeration_zero_instance() {
        let p = Problem::new(
            Mat::from_rows(&[vec![1.0, 2.0, -1.0]]),
            vec![0.0],
            vec![1.0, 0.5, 2.0],
            vec![1.0; 3],
            2,
        )
        .unwrap();
        let res = enumerate_optimal(&p).unwrap();
        assert_eq!(res.optimum, 0.0);
        assert!(res.minimizers.iter().any(|x| x.iter().all(|&v| v.abs() < 1e-9)));
    }

    #[test]
    fn enumeration_refuses_large_instances() {
        let n = 26;
        let p = Problem::new(
            Mat::from_vec(1, n, vec![1.0; n]),
            vec![1.0],
            vec![0.0; n],
            vec![1.0; n],
            2,
        )
        .unwrap();
        assert!(matches!(enumerate_optimal(&p), Err(OracleError::TooLarge { n: 26, .. })));
    }

    #[test]
    fn prox_oracle_matches_frozen_values() {
        assert_eq!(prox_oracle_kyfan(&[3.0, 1.0], 1.0, 1).unwrap(), vec![2.0, 1.0]);
        assert_eq!(prox_oracle_kyfan(&[0.5, 0.2], 1.0, 1).unwrap(), vec![0.0, 0.0]);
        assert_eq!(prox_oracle_kyfan(&[3.0, 2.0, 1.0], 1.0, 2).unwrap(), vec![2.0, 1.0, 1.0]);
    }

    #[test]
    fn prox_oracle_agrees_with_searching_on_sorted_nonneg_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=12);
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
            w.sort_unstable_by(|a, b| b.total_cmp(a));
            let r = rng.gen_range(1..=n);
            let lambda = rng.gen_range(0.05..3.0);
            let by_oracle = prox_oracle_kyfan(&w, lambda, r).unwrap();
            let by_search = searching(lambda, &w, r).unwrap();
            for (a, b) in by_oracle.iter().zip(&by_search) {
                assert!(
                    (a - b).abs() <= 1e-9,
                    "w={w:?} lambda={lambda} r={r}: {by_oracle:?} vs {by_search:?}"
                );
            }
        }
    }

    #[test]
    fn prox_oracle_agrees_with_full_prox_blockwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=12);
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let r = rng.gen_range(1..=n);
            let lambda = rng.gen_range(0.05..3.0);
            let fast = prox_sparse_l1(&w, lambda, r).unwrap();
            // The penalty ignores negative entries, so the oracle applies to
            // the non-negative block only; the negative block is identity.
            let split = SortedSplit::new(&w);
            let n1 = split.w_plus().len();
            let expected = if n1 == 0 {
                w.clone()
            } else {
                let eff_r = r.min(n1);
                let plus = prox_oracle_kyfan(split.w_plus(), lambda, eff_r).unwrap();
                split.unsort(&plus, split.w_minus())
            };
            for (a, b) in fast.iter().zip(&expected) {
                assert!((a - b).abs() <= 1e-9, "w={w:?} lambda={lambda} r={r}");
            }
        }
    }

    #[test]
    fn phat_report_flags_violations() {
        let p = example_fixture();
        let rep = check_phat_point(&p, &[0.5, 0.5, 0.5, 0.5], 1e-9);
        assert!(rep.feasible);
        assert!((rep.objective + 2.0).abs() <= 1e-12);
        assert!((rep.budget - 2.0).abs() <= 1e-12);

        let q = Problem::new(
            Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]),
            vec![1.0, 0.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            1,
        )
        .unwrap();
        let rep = check_phat_point(&q, &[0.0, 0.0], 1e-9);
        assert!(!rep.eq_ok && rep.box_ok);

        let rep = check_phat_point(&p, &[1.5, 0.0, 0.0, 0.0], 1e-9);
        assert!(!rep.box_ok);
    }
}
