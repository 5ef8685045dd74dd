//! Instance generators for the two benchmark families.
//!
//! `RandomPlanted` hides a sparse nonnegative point inside a random
//! underdetermined system, so recovery can be scored against known ground
//! truth: the cost vanishes on the planted support and is positive off it,
//! which makes the planted point an optimum with objective zero.
//! `SimplexConstrained` is a capped unit simplex (one equality `e^T x = 1`,
//! box `[0, u]`) with Gaussian costs and a support budget.
//!
//! All randomness flows through a seedable ChaCha stream with
//! ziggurat-sampled normal variates; a fixed seed reproduces an instance bit
//! for bit on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Mat;
use crate::problem::{Problem, ProblemError};

/// Generation failures: inconsistent spec fields or (never in practice)
/// generated data rejected by [`Problem::new`].
#[derive(Debug, Error)]
pub enum GenError {
    /// The spec fields are mutually inconsistent.
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    /// Generated data failed problem validation.
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Instance family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenFamily {
    /// Random `A`, planted sparse `xopt`, `b = A xopt`, cost vanishing on
    /// the planted support.
    #[serde(rename = "random")]
    RandomPlanted,
    /// Capped unit simplex: `e^T x = 1`, `0 <= x <= u e`, Gaussian cost.
    #[serde(rename = "simplex")]
    SimplexConstrained,
}

impl GenFamily {
    /// Stable name used in CSV output and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            GenFamily::RandomPlanted => "random",
            GenFamily::SimplexConstrained => "simplex",
        }
    }
}

fn default_u() -> f64 {
    1.0
}

/// Parameters describing one generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub family: GenFamily,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    /// Upper bound for the simplex family; ignored by `RandomPlanted`.
    #[serde(default = "default_u")]
    pub u: f64,
    #[serde(default)]
    pub seed: u64,
}

impl GenSpec {
    /// Checks family-consistent fields: `1 <= r <= n`, `1 <= m < n` for the
    /// planted family, and `m = 1` with a positive bound for the simplex
    /// family.
    pub fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(GenError::InvalidSpec("n must be positive".into()));
        }
        if self.r < 1 || self.r > self.n {
            return Err(GenError::InvalidSpec(format!(
                "support budget r = {} must satisfy 1 <= r <= n = {}",
                self.r, self.n
            )));
        }
        match self.family {
            GenFamily::RandomPlanted => {
                if self.m < 1 || self.m >= self.n {
                    return Err(GenError::InvalidSpec(format!(
                        "random family needs 1 <= m < n, got m = {}, n = {}",
                        self.m, self.n
                    )));
                }
            }
            GenFamily::SimplexConstrained => {
                if self.m != 1 {
                    return Err(GenError::InvalidSpec(format!(
                        "simplex family has a single equality row, got m = {}",
                        self.m
                    )));
                }
                if !(self.u > 0.0 && self.u.is_finite()) {
                    return Err(GenError::InvalidSpec(format!(
                        "simplex bound u = {} must be positive and finite",
                        self.u
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Draws a planted instance: support size uniform in `[1, r]`, support chosen
/// by a random permutation, values `|N(0, 1)|`, `A` standard normal,
/// `b = A xopt`, `l = max(xopt) e`, and `c` all ones except zero on the
/// support. Returns the instance together with the planted point.
pub fn gen_random_planted(spec: &GenSpec) -> Result<(Problem, Vec<f64>), GenError> {
    spec.validate()?;
    if spec.family != GenFamily::RandomPlanted {
        return Err(GenError::InvalidSpec(format!(
            "gen_random_planted called with family {:?}",
            spec.family
        )));
    }
    let (n, m) = (spec.n, spec.m);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let support_size = rng.gen_range(1..=spec.r);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut xopt = vec![0.0; n];
    for &i in perm.iter().take(support_size) {
        let v: f64 = rng.sample(StandardNormal);
        xopt[i] = v.abs();
    }
    let a = Mat::from_vec(m, n, (0..m * n).map(|_| rng.sample(StandardNormal)).collect());
    let b = a.mul_vec(&xopt);
    let lmax = xopt.iter().copied().fold(0.0_f64, f64::max);
    let l = vec![lmax; n];
    let c: Vec<f64> = xopt.iter().map(|&v| if v > 0.0 { 0.0 } else { 1.0 }).collect();
    let problem = Problem::new(a, b, c, l, spec.r)?;
    Ok((problem, xopt))
}

/// Draws a capped-simplex instance: `A = e^T` (one row of ones), `b = (1)`,
/// `l = u e`, `c` standard normal, support budget `r` as specified.
pub fn gen_simplex(spec: &GenSpec) -> Result<Problem, GenError> {
    spec.validate()?;
    if spec.family != GenFamily::SimplexConstrained {
        return Err(GenError::InvalidSpec(format!(
            "gen_simplex called with family {:?}",
            spec.family
        )));
    }
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let a = Mat::from_vec(1, n, vec![1.0; n]);
    let b = vec![1.0];
    let l = vec![spec.u; n];
    let c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    Ok(Problem::new(a, b, c, l, spec.r)?)
}

/// Dispatches on the family. The planted point is `Some` only for
/// `RandomPlanted`.
pub fn generate(spec: &GenSpec) -> Result<(Problem, Option<Vec<f64>>), GenError> {
    match spec.family {
        GenFamily::RandomPlanted => {
            let (p, xopt) = gen_random_planted(spec)?;
            Ok((p, Some(xopt)))
        }
        GenFamily::SimplexConstrained => Ok((gen_simplex(spec)?, None)),
    }
}
