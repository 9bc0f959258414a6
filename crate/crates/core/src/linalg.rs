//! Minimal dense linear algebra: row-major matrices, pivoted LU, and a 1-norm
//! condition estimate. Sized for the N ≲ 100 systems this crate assembles.

use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Dense square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Zero matrix of order n.
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    /// Build from an entry function (i, j) ↦ value.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// y = M·x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (yi, row) in y.iter_mut().zip(self.data.chunks_exact(self.n)) {
            *yi = row.iter().zip(x).map(|(m, v)| m * v).sum();
        }
        y
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum())
            .fold(0.0, f64::max)
    }

    /// LU factorization with partial pivoting; fails on an exactly singular pivot.
    pub fn lu(&self) -> Result<LuFactors> {
        let n = self.n;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_val) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_val == 0.0 || !pivot_val.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "matrix is singular or nonfinite at elimination step {k}"
                )));
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Ok(LuFactors { n, lu, perm })
    }

    /// Solve M·x = rhs, then apply one step of iterative refinement against the
    /// original matrix to recover accuracy lost in ill-conditioned eliminations.
    pub fn refined_solve(&self, factors: &LuFactors, rhs: &[f64]) -> Vec<f64> {
        let mut x = factors.solve(rhs);
        let ax = self.mul_vec(&x);
        let residual: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let correction = factors.solve(&residual);
        for (xi, ci) in x.iter_mut().zip(&correction) {
            *xi += ci;
        }
        x
    }

    /// Exact 1-norm condition number ‖M‖₁·‖M⁻¹‖₁, computed by solving against
    /// every unit vector. O(n³) after factorization but exact, not an estimate.
    pub fn cond_one(&self, factors: &LuFactors) -> f64 {
        let n = self.n;
        let mut inv_norm = 0.0f64;
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = factors.solve(&e);
            e[j] = 0.0;
            inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
        }
        self.one_norm() * inv_norm
    }
}

/// Pivoted LU factors of a [`Matrix`], reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Solve L·U·x = P·rhs by forward and back substitution.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            let s: f64 = self.lu[i * n..i * n + i]
                .iter()
                .zip(&x[..i])
                .map(|(l, v)| l * v)
                .sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = self.lu[i * n + i + 1..(i + 1) * n]
                .iter()
                .zip(&x[i + 1..])
                .map(|(l, v)| l * v)
                .sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_small_system() {
        let m = Matrix::from_fn(3, |i, j| [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]][i][j]);
        let f = m.lu().unwrap();
        let x = m.refined_solve(&f, &[3.0, 5.0, 5.0]);
        let y = m.mul_vec(&x);
        for (yi, bi) in y.iter().zip([3.0, 5.0, 5.0]) {
            assert_relative_eq!(*yi, bi, epsilon = 1e-14);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = Matrix::from_fn(2, |i, j| [[0.0, 1.0], [1.0, 0.0]][i][j]);
        let f = m.lu().unwrap();
        let x = f.solve(&[2.0, 7.0]);
        assert_relative_eq!(x[0], 7.0);
        assert_relative_eq!(x[1], 2.0);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = Matrix::from_fn(2, |i, j| [[1.0, 2.0], [2.0, 4.0]][i][j]);
        assert!(m.lu().is_err());
    }

    #[test]
    fn identity_condition_is_one() {
        let m = Matrix::from_fn(4, |i, j| if i == j { 1.0 } else { 0.0 });
        let f = m.lu().unwrap();
        assert_relative_eq!(m.cond_one(&f), 1.0);
    }

    #[test]
    fn condition_tracks_diagonal_scaling() {
        let m = Matrix::from_fn(3, |i, j| if i == j { [1.0, 1.0, 1e-6][i] } else { 0.0 });
        let f = m.lu().unwrap();
        assert_relative_eq!(m.cond_one(&f), 1e6, max_relative = 1e-12);
    }

    #[test]
    fn one_norm_is_max_column_sum() {
        let m = Matrix::from_fn(2, |i, j| [[1.0, -3.0], [2.0, 1.0]][i][j]);
        assert_relative_eq!(m.one_norm(), 4.0);
    }
}
