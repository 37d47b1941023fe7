//! Parametric densities: Gaussian in tangent coordinates, its log-Gaussian
//! push-forward onto a manifold, and Wishart / inverse Wishart on PD(m).
//!
//! Log-Gaussian densities are with respect to the Riemannian volume;
//! Wishart densities are with respect to Lebesgue measure on the independent
//! entries `X_{ij}, i ≤ j`.

mod wishart;

#[cfg(test)]
mod tests;

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{Cholesky, PdMatrix, SymMatrix};
use crate::manifolds::{Manifold, ManifoldPoint};
use crate::rng::{Seed, SymRng};

pub use wishart::{log_multivariate_gamma, InvWishartParams, WishartParams};

/// Consecutive overflowing draws tolerated before sampling gives up.
pub const MAX_RESAMPLE: usize = 100;

/// `N(μ, Σ)` on ℝᵈ.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    mu: Vec<f64>,
    sigma: SymMatrix,
    chol: Cholesky,
    /// `−(d·log 2π + log det Σ)/2`.
    log_norm: f64,
}

impl GaussianParams {
    /// Fails if `Σ` does not admit a Cholesky factor or shapes disagree.
    pub fn new(mu: Vec<f64>, sigma: SymMatrix) -> Result<Self> {
        if mu.len() != sigma.order() {
            return Err(Error::DimensionMismatch {
                expected: sigma.order(),
                found: mu.len(),
            });
        }
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite);
        }
        let chol = Cholesky::factor(&sigma)?;
        let log_norm = -0.5 * (mu.len() as f64 * (2.0 * PI).ln() + chol.log_det());
        Ok(Self {
            mu,
            sigma,
            chol,
            log_norm,
        })
    }

    pub fn standard(d: usize) -> Self {
        Self::new(alloc::vec![0.0; d], SymMatrix::identity(d)).expect("identity covariance")
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &SymMatrix {
        &self.sigma
    }

    pub fn cholesky(&self) -> &Cholesky {
        &self.chol
    }

    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.log_norm - 0.5 * self.chol.mahalanobis_sq_centered(x, &self.mu))
    }

    /// `μ + L z` with `z` standard normal.
    pub fn draw(&self, rng: &mut SymRng) -> Vec<f64> {
        let z = rng.normal_vec(self.dim());
        self.chol
            .mul_lower(&z)
            .into_iter()
            .zip(&self.mu)
            .map(|(a, m)| a + m)
            .collect()
    }

    pub fn sample(&self, n: usize, seed: Seed) -> Vec<Vec<f64>> {
        let mut rng = SymRng::new(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}

/// `lG(μ, Σ)`: the law of `exp(V)` with `V ~ N(μ, Σ)` in tangent coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGaussianParams {
    manifold: Manifold,
    tangent: GaussianParams,
}

/// Points drawn by [`LogGaussianParams::sample_with`], with the number of
/// draws that were rejected because `exp` left the representable range.
#[derive(Debug, Clone, PartialEq)]
pub struct LgSamples {
    pub points: Vec<ManifoldPoint>,
    pub resampled: usize,
}

impl LogGaussianParams {
    pub fn new(manifold: Manifold, mu: Vec<f64>, sigma: SymMatrix) -> Result<Self> {
        let manifold = manifold.new_checked()?;
        if mu.len() != manifold.dim() {
            return Err(Error::DimensionMismatch {
                expected: manifold.dim(),
                found: mu.len(),
            });
        }
        Ok(Self {
            manifold,
            tangent: GaussianParams::new(mu, sigma)?,
        })
    }

    pub fn from_pd(manifold: Manifold, mu: Vec<f64>, sigma: &PdMatrix) -> Result<Self> {
        Self::new(manifold, mu, sigma.as_sym().clone())
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn tangent(&self) -> &GaussianParams {
        &self.tangent
    }

    /// `log N(log x; μ, Σ) + log J(x)`.
    pub fn log_density(&self, x: &ManifoldPoint) -> Result<f64> {
        let (v, log_j) = self.manifold.log_map_with_volume(x)?;
        Ok(self.tangent.log_density(&v)? + log_j)
    }

    /// Same density evaluated at `exp(v)`.
    pub fn log_density_tangent(&self, v: &[f64]) -> Result<f64> {
        Ok(self.tangent.log_density(v)? + self.manifold.log_volume_factor_tangent(v)?)
    }

    pub fn sample(&self, n: usize, seed: Seed) -> Result<Vec<ManifoldPoint>> {
        self.sample_with(n, &mut SymRng::new(seed)).map(|s| s.points)
    }

    pub fn sample_with(&self, n: usize, rng: &mut SymRng) -> Result<LgSamples> {
        if n == 0 {
            return Err(invalid("sample size must be at least 1"));
        }
        let mut points = Vec::with_capacity(n);
        let mut resampled = 0;
        while points.len() < n {
            let mut failures = 0;
            loop {
                match self.manifold.exp_map(&self.tangent.draw(rng)) {
                    Ok(p) => {
                        points.push(p);
                        break;
                    }
                    Err(Error::TangentTooLarge(r)) => {
                        resampled += 1;
                        failures += 1;
                        if failures >= MAX_RESAMPLE {
                            return Err(Error::TangentTooLarge(r));
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(LgSamples { points, resampled })
    }
}
