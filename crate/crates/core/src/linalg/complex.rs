use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use num_traits::Zero;

use super::eigen::{sym_eig, EigenDecomposition};
use super::sym::SymMatrix;
use crate::error::{invalid, Error, Result};

/// Small dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix order must be at least 1"));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { n: self.n, data }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|Zᵢⱼ − Zⱼᵢ|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a.get(i, col).norm().total_cmp(&a.get(j, col).norm()))
                .expect("nonempty range");
            let pv = a.get(pivot, col);
            if pv.norm() == 0.0 {
                return Err(invalid("singular complex matrix"));
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let scale = Complex64::new(1.0, 0.0) / a.get(col, col);
            for j in 0..n {
                a.data[col * n + j] *= scale;
                inv.data[col * n + j] *= scale;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a.get(i, col);
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let ac = a.get(col, j);
                    let ic = inv.get(col, j);
                    a.data[i * n + j] -= f * ac;
                    inv.data[i * n + j] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    /// Real symmetric `2n × 2n` image `[[Re H, −Im H], [Im H, Re H]]` of a Hermitian `H`.
    pub fn realify_hermitian(&self) -> SymMatrix {
        let n = self.n;
        let m = 2 * n;
        SymMatrix::from_fn(m, |i, j| {
            let (bi, ri) = (i / n, i % n);
            let (bj, rj) = (j / n, j % n);
            let z = self.get(ri, rj);
            match (bi, bj) {
                (0, 0) | (1, 1) => z.re,
                (0, 1) => -z.im,
                _ => z.im,
            }
        })
        .expect("finite entries")
    }

    /// Hermitian functional calculus `f(H)` evaluated through the real image.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = self.n;
        let eig: EigenDecomposition = sym_eig(&self.realify_hermitian())?;
        let big = eig.map(f);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = Complex64::new(big.get(i, j), big.get(n + i, j));
            }
        }
        Ok(out)
    }
}

/// Eigenvalues of a complex 2×2 matrix from the characteristic quadratic,
/// sorted by real part then imaginary part.
pub fn complex_eig_2x2(z: [[Complex64; 2]; 2]) -> [Complex64; 2] {
    let [[a, b], [c, d]] = z;
    let half_trace = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let root = (half_diff * half_diff + b * c).sqrt();
    let mut out = [half_trace + root, half_trace - root];
    if cmp_complex(&out[1], &out[0]).is_lt() {
        out.swap(0, 1);
    }
    out
}

/// Eigenvalues of an order-1 or order-2 complex matrix.
pub fn complex_eigenvalues(z: &CMatrix) -> Result<Vec<Complex64>> {
    match z.order() {
        1 => Ok(vec![z.get(0, 0)]),
        2 => Ok(complex_eig_2x2([[z.get(0, 0), z.get(0, 1)], [z.get(1, 0), z.get(1, 1)]]).to_vec()),
        _ => Err(Error::Unsupported("complex eigenvalues are limited to order <= 2")),
    }
}

fn cmp_complex(x: &Complex64, y: &Complex64) -> core::cmp::Ordering {
    x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
}
