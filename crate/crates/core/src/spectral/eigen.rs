//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for
//! eigenvalues and inverse iteration for eigenvectors.

use rayon::prelude::*;

use crate::error::{argument, Error, Result};

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(argument(format!(
                "a tridiagonal matrix of size {} needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len().saturating_sub(1),
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(argument("tridiagonal entries must be finite"));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * self.norm_bound().max(1.0);
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `index`-th smallest eigenvalue, zero based.
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        if index >= self.len() {
            return Err(argument(format!("eigenvalue index {index} out of range for size {}", self.len())));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let abs_tol = f64::EPSILON * self.norm_bound();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 2.0 * f64::EPSILON * mid.abs() + abs_tol || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Numeric {
            index,
            message: "bisection did not converge".into(),
        })
    }

    /// The `count` smallest eigenvalues in ascending order.
    pub fn lowest_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        if count > self.len() {
            return Err(argument(format!("asked for {count} eigenvalues of a {}x{} matrix", self.len(), self.len())));
        }
        let mut out: Vec<f64> = (0..count).into_par_iter().map(|i| self.eigenvalue(i)).collect::<Result<_>>()?;
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Solves `(T - shift) x = b` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let pivot_floor = f64::EPSILON * self.norm_bound().max(f64::MIN_POSITIVE);
        // Rows of the upper factor: (u0, u1, u2) on columns (i, i+1, i+2).
        let mut u = vec![[0.0f64; 3]; n];
        let mut rhs = b.to_vec();
        let mut cur = [self.diag[0] - shift, if n > 1 { self.off[0] } else { 0.0 }, 0.0];
        for i in 0..n {
            if i + 1 < n {
                let below = [self.off[i], self.diag[i + 1] - shift, if i + 2 < n { self.off[i + 1] } else { 0.0 }];
                let (mut top, mut bot) = (cur, below);
                let (mut rt, mut rb) = (rhs[i], rhs[i + 1]);
                if below[0].abs() > cur[0].abs() {
                    std::mem::swap(&mut top, &mut bot);
                    std::mem::swap(&mut rt, &mut rb);
                }
                if top[0].abs() < pivot_floor {
                    top[0] = pivot_floor;
                }
                let l = bot[0] / top[0];
                u[i] = top;
                rhs[i] = rt;
                rhs[i + 1] = rb - l * rt;
                cur = [bot[1] - l * top[1], bot[2] - l * top[2], 0.0];
            } else {
                if cur[0].abs() < pivot_floor {
                    cur[0] = pivot_floor;
                }
                u[i] = cur;
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u[i][1] * x[i + 1];
            }
            if i + 2 < n {
                s -= u[i][2] * x[i + 2];
            }
            x[i] = s / u[i][0];
        }
        x
    }

    /// Unit eigenvector for an eigenvalue approximation `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract()).collect();
        for _ in 0..3 {
            x = self.shifted_solve(lambda, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// `y = T x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}
