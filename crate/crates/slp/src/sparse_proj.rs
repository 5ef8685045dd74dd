//! Sparse projections and the proximal mapping of the sparse one-sided
//! penalty `z -> lambda * || P(z) ||_1`, where `P` projects onto the set of
//! non-negative vectors with at most `r` nonzeros.
//!
//! The prox is assembled from a sort/split of the input, a plateau search on
//! the non-negative block (KKT case analysis of the top-r-sum penalty), and
//! an untouched strictly-negative block. An independent Moreau-identity
//! oracle for the same map lives in `crate::oracle`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SparseProjError {
    #[error("sparsity level r = {r} outside 1..={n}")]
    SparsityOutOfRange { r: usize, n: usize },
    #[error("input vector must be sorted non-increasingly and non-negative")]
    NonMonotoneInput,
    #[error("input vector must be sorted non-increasingly and non-negative")]
    NotSorted,
    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("lambda must be strictly positive")]
    NonPositiveLambda,
}

fn check_r(r: usize, n: usize) -> Result<(), SparseProjError> {
    if r < 1 || r > n {
        return Err(SparseProjError::SparsityOutOfRange { r, n });
    }
    Ok(())
}

/// Euclidean projection onto `{x >= 0, nnz(x) <= r}` together with the l1
/// norm of the result. Keeps the positive parts of the `r` largest entries
/// (ties broken by smallest index) and zeros the rest.
pub fn project_sparse_nonneg(z: &[f64], r: usize) -> Result<(Vec<f64>, f64), SparseProjError> {
    check_r(r, z.len())?;
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_unstable_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut pi = vec![0.0; z.len()];
    let mut l1 = 0.0;
    for &idx in &order[..r] {
        let v = z[idx].max(0.0);
        pi[idx] = v;
        l1 += v;
    }
    Ok((pi, l1))
}

/// Sum of the `r` largest entries of `[z]_+`, without materializing the
/// projection.
pub fn top_r_plus_sum(z: &[f64], r: usize) -> Result<f64, SparseProjError> {
    check_r(r, z.len())?;
    let mut clamped: Vec<f64> = z.iter().map(|&v| v.max(0.0)).collect();
    if r < clamped.len() {
        clamped.select_nth_unstable_by(r - 1, |a, b| b.total_cmp(a));
        clamped.truncate(r);
    }
    Ok(clamped.iter().sum())
}

/// `min { p'x : 0 <= x <= l, x_i = 0 off I }`, in closed form
/// `-sum_{i in I} [-l_i p_i]_+`.
pub fn closed_form_box_min(p: &[f64], l: &[f64], i_set: &[usize]) -> Result<f64, SparseProjError> {
    if p.len() != l.len() {
        return Err(SparseProjError::LengthMismatch { left: p.len(), right: l.len() });
    }
    let mut total = 0.0;
    for &i in i_set {
        if i >= p.len() {
            return Err(SparseProjError::IndexOutOfRange { index: i, n: p.len() });
        }
        total -= (-l[i] * p[i]).max(0.0);
    }
    Ok(total)
}

/// `min { p'x : 0 <= x <= l, nnz(x) <= r }`, in closed form
/// `-top_r_plus_sum(-l o p, r)`.
pub fn sparse_box_min(p: &[f64], l: &[f64], r: usize) -> Result<f64, SparseProjError> {
    if p.len() != l.len() {
        return Err(SparseProjError::LengthMismatch { left: p.len(), right: l.len() });
    }
    let neg: Vec<f64> = p.iter().zip(l).map(|(pi, li)| -li * pi).collect();
    Ok(-top_r_plus_sum(&neg, r)?)
}

/// Membership test for the subdifferential of the top-r-sum norm at a sorted
/// non-negative point `z`. With `r0` entries strictly above `z_r` and the
/// tie plateau ending at `r1`:
/// `mu_i = 1` below `r0`, `mu_i = 0` beyond `r1`, `0 <= mu_i <= 1` on the
/// plateau with budget `sum = r - r0`; when `z_r = 0` the plateau extends to
/// the end and the budget becomes an inequality.
pub fn kyfan_subdiff_contains(
    z: &[f64],
    mu: &[f64],
    r: usize,
    tol: f64,
) -> Result<bool, SparseProjError> {
    let n = z.len();
    if mu.len() != n {
        return Err(SparseProjError::LengthMismatch { left: n, right: mu.len() });
    }
    check_r(r, n)?;
    if z.windows(2).any(|p| p[0] < p[1]) || z.last().is_some_and(|&v| v < 0.0) {
        return Err(SparseProjError::NotSorted);
    }
    let zr = z[r - 1];
    // Plateau boundaries use exact comparisons: equal values never split.
    let r0 = z.iter().take_while(|&&v| v > zr).count();
    let ok_ones = mu[..r0].iter().all(|&m| (m - 1.0).abs() <= tol);
    if !ok_ones {
        return Ok(false);
    }
    if zr > 0.0 {
        let r1 = r0 + z[r0..].iter().take_while(|&&v| v == zr).count();
        let plateau = &mu[r0..r1];
        let ok_box = plateau.iter().all(|&m| (-tol..=1.0 + tol).contains(&m));
        let budget: f64 = plateau.iter().sum();
        let ok_budget = (budget - (r - r0) as f64).abs() <= tol;
        let ok_zeros = mu[r1..].iter().all(|&m| m.abs() <= tol);
        Ok(ok_box && ok_budget && ok_zeros)
    } else {
        let tail = &mu[r0..];
        let ok_box = tail.iter().all(|&m| (-tol..=1.0 + tol).contains(&m));
        let budget: f64 = tail.iter().sum();
        Ok(ok_box && budget <= (r - r0) as f64 + tol)
    }
}

/// Prefix sums over the sorted non-negative block, with the two guard
/// entries `w_plus[0] = +inf` and `w_plus[n1+1] = 0` (1-based indexing).
struct SearchState<'a> {
    w: &'a [f64],
    prefix: Vec<f64>,
}

impl<'a> SearchState<'a> {
    fn new(w: &'a [f64]) -> Self {
        let mut prefix = Vec::with_capacity(w.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &v in w {
            acc += v;
            prefix.push(acc);
        }
        SearchState { w, prefix }
    }

    /// 1-based entry with sentinels at 0 and n1+1.
    fn entry(&self, i: usize) -> f64 {
        if i == 0 {
            f64::INFINITY
        } else if i > self.w.len() {
            0.0
        } else {
            self.w[i - 1]
        }
    }

    /// Sum of entries `a+1 ..= b` (1-based).
    fn range_sum(&self, a: usize, b: usize) -> f64 {
        self.prefix[b] - self.prefix[a]
    }

    /// Common plateau value for the cell `(r0, r1)`.
    fn theta(&self, lambda: f64, r: usize, r0: usize, r1: usize) -> f64 {
        (self.range_sum(r0, r1) - lambda * (r - r0) as f64) / (r1 - r0) as f64
    }
}

/// Minimizer of `g(z) = 1/2 ||z - w_plus||^2 + lambda * (sum of r largest
/// entries of z)` over sorted non-negative input. Scans the threshold case
/// first (`z_r = 0`), then the plateau cells in `r0`-descending order; per
/// `r0` the plateau end is located by binary search on the monotone
/// crossing predicate `theta(r0, r1) > w_plus[r1 + 1]`.
pub fn searching(lambda: f64, w_plus: &[f64], r: usize) -> Result<Vec<f64>, SparseProjError> {
    let n1 = w_plus.len();
    check_r(r, n1)?;
    if lambda <= 0.0 {
        return Err(SparseProjError::NonPositiveLambda);
    }
    if w_plus.windows(2).any(|p| p[0] < p[1]) || w_plus.last().is_some_and(|&v| v < 0.0) {
        return Err(SparseProjError::NonMonotoneInput);
    }
    let s = SearchState::new(w_plus);
    // Boundary ties between adjacent cells describe the same minimizer (a
    // plateau endpoint may sit in either block), so the acceptance tests
    // tolerate float noise from the prefix-sum differences; without this the
    // common cell (r-1, r), whose window holds with equality, is missed.
    let eps = 1e-11 * (1.0 + lambda + w_plus[0]);

    // Threshold case: top r0 entries shrink by lambda, the rest vanish.
    for r0 in (0..r).rev() {
        if s.entry(r0) > lambda - eps
            && lambda >= s.entry(r0 + 1) - eps
            && lambda * (r - r0) as f64 >= s.range_sum(r0, n1) - eps
        {
            let mut z = vec![0.0; n1];
            for i in 0..r0 {
                z[i] = w_plus[i] - lambda;
            }
            return Ok(z);
        }
    }

    // Plateau case: cell (r0, r1) assigns the common value theta on the
    // plateau. For fixed r0 the crossing predicate below is monotone in r1,
    // and every cell past the first crossing fails the window test, so only
    // the crossing cell needs testing.
    for r0 in (0..r).rev() {
        let crossed = |r1: usize| s.theta(lambda, r, r0, r1) > s.entry(r1 + 1);
        let cell = if !crossed(n1) {
            None
        } else {
            let (mut lo, mut hi) = (r, n1);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if crossed(mid) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            Some(lo)
        };
        let window_ok = |r1: usize| {
            let theta = s.theta(lambda, r, r0, r1);
            s.entry(r0) > lambda + theta - eps
                && lambda + theta >= s.entry(r0 + 1) - eps
                && s.entry(r1) >= theta - eps
                && theta > s.entry(r1 + 1) - eps
        };
        if let Some(r1) = cell {
            if (r0 > 0 || r1 < n1) && window_ok(r1) {
                return Ok(plateau_output(w_plus, lambda, r0, r1, s.theta(lambda, r, r0, r1)));
            }
        }
        if r0 == 0 {
            // Terminal cell (0, n1) is accepted unconditionally.
            let theta = s.theta(lambda, r, 0, n1);
            return Ok(plateau_output(w_plus, lambda, 0, n1, theta));
        }
    }
    unreachable!("the terminal cell is always reached");
}

fn plateau_output(w_plus: &[f64], lambda: f64, r0: usize, r1: usize, theta: f64) -> Vec<f64> {
    let mut z = w_plus.to_vec();
    for v in &mut z[..r0] {
        *v -= lambda;
    }
    for v in &mut z[r0..r1] {
        *v = theta;
    }
    z
}

/// Stable non-increasing sort of `w` split at zero: `w_plus` holds the
/// entries `>= 0`, `w_minus` the strictly negative ones, and `perm[k]` is
/// the original index of the k-th sorted entry.
pub struct SortedSplit {
    perm: Vec<usize>,
    w_plus: Vec<f64>,
    w_minus: Vec<f64>,
}

impl SortedSplit {
    pub fn new(w: &[f64]) -> Self {
        let mut perm: Vec<usize> = (0..w.len()).collect();
        perm.sort_unstable_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
        let n1 = perm.iter().take_while(|&&i| w[i] >= 0.0).count();
        let w_plus = perm[..n1].iter().map(|&i| w[i]).collect();
        let w_minus = perm[n1..].iter().map(|&i| w[i]).collect();
        SortedSplit { perm, w_plus, w_minus }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn w_plus(&self) -> &[f64] {
        &self.w_plus
    }

    pub fn w_minus(&self) -> &[f64] {
        &self.w_minus
    }

    /// Rebuilds a vector in original index order from sorted-block values.
    pub fn unsort(&self, plus_vals: &[f64], minus_vals: &[f64]) -> Vec<f64> {
        debug_assert_eq!(plus_vals.len(), self.w_plus.len());
        debug_assert_eq!(minus_vals.len(), self.w_minus.len());
        let mut out = vec![0.0; self.perm.len()];
        for (k, &idx) in self.perm.iter().enumerate() {
            out[idx] = if k < plus_vals.len() {
                plus_vals[k]
            } else {
                minus_vals[k - plus_vals.len()]
            };
        }
        out
    }
}

/// Proximal mapping of `lambda * || P_{>=0, r-sparse}(.) ||_1`: sorts and
/// splits `w`, transforms the non-negative block (plateau search when
/// `r < n1`, one-sided soft threshold `[w_i - lambda]_+` when `r >= n1`),
/// leaves the strictly negative block untouched, and un-permutes.
pub fn prox_sparse_l1(w: &[f64], lambda: f64, r: usize) -> Result<Vec<f64>, SparseProjError> {
    check_r(r, w.len())?;
    if lambda <= 0.0 {
        return Err(SparseProjError::NonPositiveLambda);
    }
    let split = SortedSplit::new(w);
    let n1 = split.w_plus().len();
    let z_plus = if n1 == 0 {
        Vec::new()
    } else if r >= n1 {
        split.w_plus().iter().map(|&v| (v - lambda).max(0.0)).collect()
    } else {
        searching(lambda, split.w_plus(), r)?
    };
    Ok(split.unsort(&z_plus, split.w_minus()))
}
