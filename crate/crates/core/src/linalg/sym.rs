use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;
#[allow(unused_imports)]
use num_traits::Float;

use super::eigen::{check_positive, sym_eig};
use crate::error::{invalid, Error, Result};

/// Dense real symmetric matrix in full row-major storage.
///
/// Construction symmetrizes the input as `(A + Aᵀ)/2`, so `get(i, j) == get(j, i)`
/// holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from `n * n` row-major entries.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix order must be at least 1"));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut m = Self { n, data };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    /// Trusted constructor for internally produced data that is already symmetric.
    pub(crate) fn from_symmetric_unchecked(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_symmetric_unchecked(self.n, self.data.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix orders differ");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::from_symmetric_unchecked(self.n, data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix orders differ");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self::from_symmetric_unchecked(self.n, data)
    }

    /// Frobenius inner product `tr(self · other)`.
    pub fn frobenius_dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Computes `A · self · A` for a symmetric `A`; the result is symmetric.
    pub fn sandwich(&self, a: &SymMatrix) -> SymMatrix {
        let n = self.n;
        let tmp = matmul(n, a.as_slice(), self.as_slice());
        let full = matmul(n, &tmp, a.as_slice());
        let mut out = Self::from_symmetric_unchecked(n, full);
        out.symmetrize();
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Relative threshold below which an eigenvalue is not considered positive.
///
/// A few ulps of the largest eigenvalue: anything smaller is rounding noise.
/// Badly conditioned but genuine PD matrices (e.g. `exp` of a tangent vector
/// with a log-spectrum spread of 30) stay admissible, at any overall scale.
pub fn pd_tolerance(largest_abs_eigenvalue: f64) -> f64 {
    4.0 * f64::EPSILON * largest_abs_eigenvalue
}

/// Symmetric positive definite matrix; the eigenvalue check runs at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PdMatrix(SymMatrix);

impl PdMatrix {
    pub fn new(s: SymMatrix) -> Result<Self> {
        check_positive(&sym_eig(&s)?)?;
        Ok(Self(s))
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(SymMatrix::from_row_major(n, data)?)
    }

    pub fn identity(n: usize) -> Self {
        Self(SymMatrix::identity(n))
    }

    pub(crate) fn new_unchecked(s: SymMatrix) -> Self {
        Self(s)
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.0
    }

    pub fn into_sym(self) -> SymMatrix {
        self.0
    }
}

impl Deref for PdMatrix {
    type Target = SymMatrix;

    fn deref(&self) -> &SymMatrix {
        &self.0
    }
}

/// Real coordinate vector (vectorized matrices, tangent coordinates).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoordVector(Vec<f64>);

impl CoordVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }
}

impl Deref for CoordVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<CoordVector> for Vec<f64> {
    fn from(v: CoordVector) -> Self {
        v.0
    }
}

/// Number of free coordinates of an order-`m` symmetric matrix.
pub const fn sym_dim(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Recovers the matrix order from `d = m(m+1)/2`, if `d` is triangular.
pub fn sym_order(d: usize) -> Option<usize> {
    let mut m = 0;
    while sym_dim(m) < d {
        m += 1;
    }
    (sym_dim(m) == d && m > 0).then_some(m)
}

/// Orthonormal coordinates of a symmetric matrix: the `m` diagonal entries,
/// then the upper off-diagonal entries (row-major) scaled by √2, so that
/// `‖sym_vec(X)‖₂ = ‖X‖_F`.
pub fn sym_vec(x: &SymMatrix) -> CoordVector {
    let n = x.order();
    let mut out = Vec::with_capacity(sym_dim(n));
    out.extend((0..n).map(|i| x.get(i, i)));
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(core::f64::consts::SQRT_2 * x.get(i, j));
        }
    }
    CoordVector(out)
}

/// Inverse of [`sym_vec`].
pub fn sym_unvec(v: &[f64], m: usize) -> Result<SymMatrix> {
    let d = sym_dim(m);
    if v.len() != d || m == 0 {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut data = vec![0.0; m * m];
    for i in 0..m {
        data[i * m + i] = v[i];
    }
    let mut k = m;
    for i in 0..m {
        for j in (i + 1)..m {
            let val = v[k] * core::f64::consts::FRAC_1_SQRT_2;
            data[i * m + j] = val;
            data[j * m + i] = val;
            k += 1;
        }
    }
    Ok(SymMatrix::from_symmetric_unchecked(m, data))
}

/// Square row-major matrix product.
pub(crate) fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dist2_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
