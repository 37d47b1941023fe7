use alloc::vec;
use core::f64::consts::{LN_2, PI};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{Cholesky, PdMatrix, SymMatrix};
use crate::rng::SymRng;

/// `log Γ_m(a) = m(m−1)/4 · log π + Σ_{j=1}^{m} log Γ(a + (1 − j)/2)`.
pub fn log_multivariate_gamma(m: usize, a: f64) -> f64 {
    let mf = m as f64;
    let mut acc = 0.25 * mf * (mf - 1.0) * PI.ln();
    for j in 1..=m {
        acc += libm::lgamma(a + 0.5 * (1.0 - j as f64));
    }
    acc
}

fn check_dof(m: usize, nu: f64) -> Result<()> {
    if !nu.is_finite() || nu <= m as f64 - 1.0 {
        return Err(invalid(alloc::format!("degrees of freedom {nu} must exceed m - 1 = {}", m as f64 - 1.0)));
    }
    Ok(())
}

fn check_order(expected: usize, x: &PdMatrix) -> Result<()> {
    if x.order() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.order(),
        });
    }
    Ok(())
}

/// `tr(A·B)` for symmetric `A`, `B`.
fn trace_product(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.frobenius_dot(b)
}

/// Wishart `W(V, ν)` on PD(m), mean `νV`.
#[derive(Debug, Clone, PartialEq)]
pub struct WishartParams {
    scale: PdMatrix,
    dof: f64,
    chol: Cholesky,
    scale_inv: PdMatrix,
}

impl WishartParams {
    pub fn new(scale: PdMatrix, dof: f64) -> Result<Self> {
        check_dof(scale.order(), dof)?;
        let chol = Cholesky::factor(scale.as_sym())?;
        let scale_inv = chol.inverse();
        Ok(Self {
            scale,
            dof,
            chol,
            scale_inv,
        })
    }

    /// Kernel centred at `x`: `W(x/ν, ν)`.
    pub fn kernel(x: &PdMatrix, dof: f64) -> Result<Self> {
        Self::new(PdMatrix::new(x.scale(1.0 / dof))?, dof)
    }

    pub fn order(&self) -> usize {
        self.scale.order()
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn scale_matrix(&self) -> &PdMatrix {
        &self.scale
    }

    pub fn mean(&self) -> SymMatrix {
        self.scale.scale(self.dof)
    }

    /// Log density with respect to Lebesgue measure on the entries.
    pub fn log_density(&self, x: &PdMatrix) -> Result<f64> {
        let m = self.order();
        check_order(m, x)?;
        let log_det_x = Cholesky::factor(x.as_sym())?.log_det();
        let mf = m as f64;
        let nu = self.dof;
        Ok(0.5 * (nu - mf - 1.0) * log_det_x
            - 0.5 * trace_product(&self.scale_inv, x)
            - 0.5 * nu * mf * LN_2
            - 0.5 * nu * self.chol.log_det()
            - log_multivariate_gamma(m, 0.5 * nu))
    }

    /// Bartlett decomposition: `X = L A Aᵀ Lᵀ` with `A` lower triangular,
    /// `Aᵢᵢ² ~ χ²(ν − i)` and standard normal entries below the diagonal.
    pub fn draw(&self, rng: &mut SymRng) -> PdMatrix {
        let m = self.order();
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            a[i * m + i] = rng.chi_squared(self.dof - i as f64).sqrt();
            for j in 0..i {
                a[i * m + j] = rng.normal();
            }
        }
        // B = L·A stays lower triangular.
        let mut b = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..=i {
                b[i * m + j] = (j..=i).map(|k| self.chol.get(i, k) * a[k * m + j]).sum();
            }
        }
        let x = SymMatrix::from_fn(m, |i, j| (0..=i.min(j)).map(|k| b[i * m + k] * b[j * m + k]).sum())
            .expect("finite Bartlett factor");
        PdMatrix::new_unchecked(x)
    }
}

/// Inverse Wishart `W⁻¹(V, ν)` on PD(m), mean `V/(ν − m − 1)` when `ν > m + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvWishartParams {
    scale: PdMatrix,
    dof: f64,
    log_det_scale: f64,
    inner: WishartParams,
}

impl InvWishartParams {
    pub fn new(scale: PdMatrix, dof: f64) -> Result<Self> {
        let chol = Cholesky::factor(scale.as_sym())?;
        let inner = WishartParams::new(chol.inverse(), dof)?;
        Ok(Self {
            log_det_scale: chol.log_det(),
            scale,
            dof,
            inner,
        })
    }

    /// Kernel centred at `x`: `W⁻¹(ν·x, ν + m + 1)`.
    pub fn kernel(x: &PdMatrix, dof: f64) -> Result<Self> {
        let m = x.order() as f64;
        Self::new(PdMatrix::new(x.scale(dof))?, dof + m + 1.0)
    }

    pub fn order(&self) -> usize {
        self.scale.order()
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn scale_matrix(&self) -> &PdMatrix {
        &self.scale
    }

    pub fn mean(&self) -> Result<SymMatrix> {
        let denom = self.dof - self.order() as f64 - 1.0;
        if denom <= 0.0 {
            return Err(invalid("inverse Wishart mean needs dof > m + 1"));
        }
        Ok(self.scale.scale(1.0 / denom))
    }

    /// Log density with respect to Lebesgue measure on the entries.
    pub fn log_density(&self, x: &PdMatrix) -> Result<f64> {
        let m = self.order();
        check_order(m, x)?;
        let cx = Cholesky::factor(x.as_sym())?;
        let x_inv = cx.inverse();
        let mf = m as f64;
        let nu = self.dof;
        Ok(0.5 * nu * self.log_det_scale
            - 0.5 * nu * mf * LN_2
            - log_multivariate_gamma(m, 0.5 * nu)
            - 0.5 * (nu + mf + 1.0) * cx.log_det()
            - 0.5 * trace_product(&self.scale, &x_inv))
    }

    /// Inverse of a `W(V⁻¹, ν)` draw; numerically singular draws are redrawn.
    pub fn draw(&self, rng: &mut SymRng) -> PdMatrix {
        loop {
            if let Ok(c) = Cholesky::factor(self.inner.draw(rng).as_sym()) {
                return c.inverse();
            }
        }
    }
}
