//! Dense row-major matrices and the few factorizations the solver needs.
//!
//! Matrix-vector products have a fixed per-element reduction order (row index
//! ascending), so results are bit-identical whether or not the `parallel`
//! feature is enabled and regardless of thread count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Columns per task when splitting transpose products across threads.
#[cfg(feature = "parallel")]
const COL_CHUNK: usize = 2048;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Wraps a row-major buffer; `data.len()` must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length must be rows * cols");
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "all rows must have equal length");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copies column `j` into a new vector.
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `A x`; each output element is a left-to-right dot over one row.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length must match cols");
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        #[cfg(feature = "parallel")]
        {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(i, o)| *o = dot(self.row(i), x));
        }
        #[cfg(not(feature = "parallel"))]
        {
            for (i, o) in out.iter_mut().enumerate() {
                *o = dot(self.row(i), x);
            }
        }
    }

    /// `A^T y`; element `j` accumulates `y[i] * a[i][j]` with `i` ascending,
    /// in both the threaded and the sequential path.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "vector length must match rows");
        let mut out = vec![0.0; self.cols];
        self.tr_mul_vec_into(y, &mut out);
        out
    }

    pub fn tr_mul_vec_into(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.rows);
        assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        #[cfg(feature = "parallel")]
        {
            let cols = self.cols;
            out.par_chunks_mut(COL_CHUNK).enumerate().for_each(|(chunk, seg)| {
                let lo = chunk * COL_CHUNK;
                for (i, &yi) in y.iter().enumerate() {
                    let row = &self.data[i * cols + lo..i * cols + lo + seg.len()];
                    for (o, &a) in seg.iter_mut().zip(row) {
                        *o += yi * a;
                    }
                }
            });
        }
        #[cfg(not(feature = "parallel"))]
        {
            for (i, &yi) in y.iter().enumerate() {
                for (o, &a) in out.iter_mut().zip(self.row(i)) {
                    *o += yi * a;
                }
            }
        }
    }

    /// Gram matrix `A A^T` (square, symmetric, order `rows`).
    pub fn gram(&self) -> Mat {
        let m = self.rows;
        let mut g = Mat::zeros(m, m);
        #[cfg(feature = "parallel")]
        {
            let cols = self.cols;
            let data = &self.data;
            g.data.par_chunks_mut(m).enumerate().for_each(|(i, grow)| {
                let ri = &data[i * cols..(i + 1) * cols];
                for (k, gv) in grow.iter_mut().enumerate().skip(i) {
                    *gv = dot(ri, &data[k * cols..(k + 1) * cols]);
                }
            });
        }
        #[cfg(not(feature = "parallel"))]
        {
            for i in 0..m {
                for k in i..m {
                    let v = dot(self.row(i), self.row(k));
                    g.set(i, k, v);
                }
            }
        }
        for i in 0..m {
            for k in 0..i {
                let v = g.get(k, i);
                g.set(i, k, v);
            }
        }
        g
    }

    pub fn trace(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "trace needs a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
}

/// Cholesky factor `L` (lower triangular, `A = L L^T`) of a symmetric
/// positive definite matrix. Returns `None` as soon as a pivot fails to
/// exceed `pivot_floor`.
pub fn cholesky(a: &Mat, pivot_floor: f64) -> Option<Mat> {
    assert_eq!(a.rows(), a.cols(), "cholesky needs a square matrix");
    let n = a.rows();
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= pivot_floor {
                    return None;
                }
                l.set(i, i, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` given the lower Cholesky factor.
pub fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    assert_eq!(b.len(), n);
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for (k, &xk) in x.iter().enumerate().take(i) {
            s -= l.get(i, k) * xk;
        }
        x[i] = s / l.get(i, i);
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for (k, &xk) in x.iter().enumerate().take(n).skip(i + 1) {
            s -= l.get(k, i) * xk;
        }
        x[i] = s / l.get(i, i);
    }
    x
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration with a seeded start vector. Stops when successive Rayleigh
/// quotients agree to `tol` relative or after `max_iters` rounds.
pub fn power_iteration_largest(a: &Mat, tol: f64, max_iters: usize, seed: u64) -> f64 {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let nv = norm2(&v);
    if nv == 0.0 {
        return 0.0;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0;
    for _ in 0..max_iters {
        let av = a.mul_vec(&v);
        let next = dot(&v, &av);
        let na = norm2(&av);
        if na == 0.0 {
            return 0.0;
        }
        v = av;
        v.iter_mut().for_each(|x| *x /= na);
        if (next - lambda).abs() <= tol * lambda.abs().max(1.0) {
            return next;
        }
        lambda = next;
    }
    lambda
}
