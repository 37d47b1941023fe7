use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::sym::{PdMatrix, SymMatrix};
use crate::error::{Error, Result};

/// Lower-triangular factor `L` with `L·Lᵀ = P`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

/// Cholesky factorization of a positive definite matrix.
pub fn cholesky(p: &PdMatrix) -> Result<Cholesky> {
    Cholesky::factor(p.as_sym())
}

impl Cholesky {
    /// Factors any symmetric matrix, failing if a pivot is not positive.
    pub fn factor(s: &SymMatrix) -> Result<Self> {
        let n = s.order();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = s.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { min_eigenvalue: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut acc = s.get(i, j);
                for k in 0..j {
                    acc -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = acc / djj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// Row-major lower-triangular entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.l
    }

    /// `log det P = 2 Σ log Lᵢᵢ`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.get(i, i).ln()).sum::<f64>()
    }

    /// `L·z`.
    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..=i).map(|k| self.l[i * n + k] * z[k]).sum())
            .collect()
    }

    /// Solves `L·y = b` by forward substitution.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = b[i];
            for k in 0..i {
                acc -= self.l[i * n + k] * y[k];
            }
            y[i] = acc / self.l[i * n + i];
        }
        y
    }

    /// Solves `P·x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = self.solve_lower(b);
        for i in (0..n).rev() {
            let mut acc = x[i];
            for k in (i + 1)..n {
                acc -= self.l[k * n + i] * x[k];
            }
            x[i] = acc / self.l[i * n + i];
        }
        x
    }

    /// Squared Mahalanobis norm `bᵀ P⁻¹ b`.
    pub fn mahalanobis_sq(&self, b: &[f64]) -> f64 {
        self.solve_lower(b).iter().map(|v| v * v).sum()
    }

    /// `(x − μ)ᵀ P⁻¹ (x − μ)`; allocation-free for orders up to 8.
    pub fn mahalanobis_sq_centered(&self, x: &[f64], mu: &[f64]) -> f64 {
        let n = self.n;
        let mut stack = [0.0; 8];
        let mut heap = Vec::new();
        let y: &mut [f64] = if n <= stack.len() {
            &mut stack[..n]
        } else {
            heap.resize(n, 0.0);
            &mut heap
        };
        let mut total = 0.0;
        for i in 0..n {
            let mut acc = x[i] - mu[i];
            for k in 0..i {
                acc -= self.l[i * n + k] * y[k];
            }
            y[i] = acc / self.l[i * n + i];
            total += y[i] * y[i];
        }
        total
    }

    pub fn inverse(&self) -> PdMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        let s = SymMatrix::from_row_major(n, data).expect("finite inverse");
        PdMatrix::new_unchecked(s)
    }

    /// `L·Lᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum();
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymMatrix::from_symmetric_unchecked(n, data)
    }
}
