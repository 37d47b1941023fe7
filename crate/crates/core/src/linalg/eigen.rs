use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;


use super::sym::{pd_tolerance, PdMatrix, SymMatrix};
use crate::error::{Error, Result};

/// Sweep budget for the cyclic Jacobi solver.
pub const MAX_SWEEPS: usize = 100;

/// Largest eigenvalue accepted by [`mat_exp`].
pub const EXP_LIMIT: f64 = 700.0;

/// Spectral decomposition `S = V·diag(λ)·Vᵀ` with eigenvalues sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Row-major `n × n`; column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    #[inline]
    pub fn vector_entry(&self, row: usize, col: usize) -> f64 {
        self.eigenvectors[row * self.order() + col]
    }

    /// Applies `f` to the spectrum: `V·diag(f(λ))·Vᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.order();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.vector_entry(i, k) * fl[k] * self.vector_entry(j, k);
                }
                data[i * n + j] = acc;
                data[j * n + i] = acc;
            }
        }
        SymMatrix::from_symmetric_unchecked(n, data)
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|l| l)
    }
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eig(s: &SymMatrix) -> Result<EigenDecomposition> {
    let n = s.order();
    let mut a = s.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut converged = n == 1;
    for sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .sum();
        if off == 0.0 {
            converged = true;
            break;
        }
        // Early sweeps only rotate the large off-diagonal entries.
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = akp - s * (akq + akp * tau);
                    let new_kq = akq + s * (akp - akq * tau);
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp - s * (vkq + vkp * tau);
                    v[k * n + q] = vkq + s * (vkp - vkq * tau);
                }
            }
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .sum();
        if off != 0.0 {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&k| a[k * n + k]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[row * n + col] = v[row * n + k];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Matrix exponential of a symmetric matrix; always positive definite.
pub fn mat_exp(x: &SymMatrix) -> Result<PdMatrix> {
    let eig = sym_eig(x)?;
    let top = eig.eigenvalues[0];
    if top > EXP_LIMIT {
        return Err(Error::TangentTooLarge(top));
    }
    Ok(PdMatrix::new_unchecked(eig.map(|l| l.exp())))
}

/// Principal matrix logarithm of a positive definite matrix.
pub fn mat_log(p: &PdMatrix) -> Result<SymMatrix> {
    let eig = sym_eig(p.as_sym())?;
    check_positive(&eig)?;
    Ok(eig.map(|l| l.ln()))
}

/// Eigenvalues of `log P`, descending.
pub fn log_eigenvalues(p: &PdMatrix) -> Result<Vec<f64>> {
    let eig = sym_eig(p.as_sym())?;
    check_positive(&eig)?;
    Ok(eig.eigenvalues.iter().map(|l| l.ln()).collect())
}

/// `P^t` for a positive definite `P` and real `t`.
pub fn mat_pow(p: &PdMatrix, t: f64) -> Result<PdMatrix> {
    let eig = sym_eig(p.as_sym())?;
    check_positive(&eig)?;
    Ok(PdMatrix::new_unchecked(eig.map(|l| l.powf(t))))
}

/// Fails unless every eigenvalue is finite and above [`pd_tolerance`].
pub(crate) fn check_positive(eig: &EigenDecomposition) -> Result<()> {
    let largest = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let smallest = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if !(smallest > pd_tolerance(largest)) || !eig.eigenvalues.iter().all(|v| v.is_finite()) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: smallest,
        });
    }
    Ok(())
}
