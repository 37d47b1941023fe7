//! Distances and divergences between densities on a manifold.
//!
//! Hellinger and KL are push-forward invariant, so for log-Gaussians they must
//! agree with the Gaussian closed forms in tangent coordinates
//! ([`gaussian_hellinger_sq`], [`gaussian_kl`]). The Lᵖ distance can only
//! shrink under the push-forward and the empirical Wasserstein distance can
//! only grow.

mod quadrature;
mod transport;


use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::distributions::{GaussianParams, LogGaussianParams, MAX_RESAMPLE};
use crate::error::{invalid, Error, Result};
use crate::estimators::{KdeModel, KernelKind, MixtureModel};
use crate::linalg::Cholesky;
use crate::manifolds::{Manifold, ManifoldPoint};
use crate::rng::{Seed, SymRng};

pub use quadrature::{disk_mass, lp_distance_quadrature, lp_distance_tangent, PolarGrid, QUADRATURE_TOLERANCE};
pub use transport::{assignment, wasserstein_empirical, TransportCost, MAX_TRANSPORT_POINTS};

/// Log-ratios are clamped to this magnitude before exponentiation.
pub const LOG_RATIO_CLAMP: f64 = 700.0;

/// A density on a manifold with respect to its Riemannian volume.
pub trait ManifoldDensity {
    fn manifold(&self) -> Manifold;

    fn log_density(&self, x: &ManifoldPoint) -> Result<f64>;

    /// Exact draws, when the density knows how to produce them.
    fn sample(&self, _n: usize, _seed: Seed) -> Option<Result<Vec<ManifoldPoint>>> {
        None
    }
}

impl ManifoldDensity for LogGaussianParams {
    fn manifold(&self) -> Manifold {
        LogGaussianParams::manifold(self)
    }

    fn log_density(&self, x: &ManifoldPoint) -> Result<f64> {
        LogGaussianParams::log_density(self, x)
    }

    fn sample(&self, n: usize, seed: Seed) -> Option<Result<Vec<ManifoldPoint>>> {
        Some(LogGaussianParams::sample(self, n, seed))
    }
}

impl ManifoldDensity for KdeModel {
    fn manifold(&self) -> Manifold {
        KdeModel::manifold(self)
    }

    fn log_density(&self, x: &ManifoldPoint) -> Result<f64> {
        KdeModel::log_density(self, x)
    }

    /// Only the log-Gaussian kernel has a sampler: pick a centre, add `h·z`.
    fn sample(&self, n: usize, seed: Seed) -> Option<Result<Vec<ManifoldPoint>>> {
        let KernelKind::LogGaussian { bandwidth } = self.kind() else {
            return None;
        };
        let centres = self.coords();
        Some(push_forward(self.manifold(), n, seed, |rng| {
            let c = &centres[rng.below(centres.len())];
            c.iter().map(|m| m + bandwidth * rng.normal()).collect()
        }))
    }
}

impl ManifoldDensity for MixtureModel {
    fn manifold(&self) -> Manifold {
        MixtureModel::manifold(self)
    }

    fn log_density(&self, x: &ManifoldPoint) -> Result<f64> {
        MixtureModel::log_density(self, x)
    }

    fn sample(&self, n: usize, seed: Seed) -> Option<Result<Vec<ManifoldPoint>>> {
        let weights = self.weights();
        let comps = self.components();
        Some(push_forward(self.manifold(), n, seed, |rng| {
            let u = rng.uniform();
            let mut acc = 0.0;
            let mut j = comps.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    j = i;
                    break;
                }
            }
            comps[j].draw(rng)
        }))
    }
}

/// `exp` of tangent draws, redrawing when `exp` leaves the chart.
fn push_forward(
    manifold: Manifold,
    n: usize,
    seed: Seed,
    mut draw: impl FnMut(&mut SymRng) -> Vec<f64>,
) -> Result<Vec<ManifoldPoint>> {
    let mut rng = SymRng::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut failures = 0;
        loop {
            match manifold.exp_map(&draw(&mut rng)) {
                Ok(p) => {
                    out.push(p);
                    break;
                }
                Err(Error::TangentTooLarge(r)) => {
                    failures += 1;
                    if failures >= MAX_RESAMPLE {
                        return Err(Error::TangentTooLarge(r));
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// A Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: Seed,
    /// Draws whose log density ratio hit [`LOG_RATIO_CLAMP`].
    pub clamped: usize,
}

fn mc_setup<P, Q>(p: &P, q: &Q, n: usize, seed: Seed) -> Result<Vec<ManifoldPoint>>
where
    P: ManifoldDensity + ?Sized,
    Q: ManifoldDensity + ?Sized,
{
    if p.manifold() != q.manifold() {
        return Err(invalid("densities live on different manifolds"));
    }
    if n < 2 {
        return Err(invalid("Monte Carlo needs at least 2 draws"));
    }
    p.sample(n, seed)
        .unwrap_or(Err(Error::Unsupported("the first density has no sampler")))
}

/// `(mean, standard error)` of the values.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Log density ratios `log q(x) − log p(x)` at draws from `p`, clamped.
fn log_ratios<P, Q>(p: &P, q: &Q, xs: &[ManifoldPoint]) -> Result<(Vec<f64>, usize)>
where
    P: ManifoldDensity + ?Sized,
    Q: ManifoldDensity + ?Sized,
{
    let mut clamped = 0;
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        let r = q.log_density(x)? - p.log_density(x)?;
        if r.is_nan() {
            return Err(Error::NonFinite);
        }
        if r.abs() > LOG_RATIO_CLAMP {
            clamped += 1;
        }
        out.push(r.clamp(-LOG_RATIO_CLAMP, LOG_RATIO_CLAMP));
    }
    Ok((out, clamped))
}

/// Squared Hellinger distance `∫(√p − √q)² dμ = 2 − 2·E_p[√(q/p)]`.
pub fn hellinger_sq<P, Q>(p: &P, q: &Q, n: usize, seed: Seed) -> Result<McEstimate>
where
    P: ManifoldDensity + ?Sized,
    Q: ManifoldDensity + ?Sized,
{
    let xs = mc_setup(p, q, n, seed)?;
    let (lr, clamped) = log_ratios(p, q, &xs)?;
    let terms: Vec<f64> = lr.iter().map(|r| 2.0 - 2.0 * (0.5 * r).exp()).collect();
    let (value, std_error) = mean_se(&terms);
    Ok(McEstimate {
        value,
        std_error,
        n,
        seed,
        clamped,
    })
}

/// `KL(p ‖ q) = E_p[log p − log q]`.
pub fn kl_divergence<P, Q>(p: &P, q: &Q, n: usize, seed: Seed) -> Result<McEstimate>
where
    P: ManifoldDensity + ?Sized,
    Q: ManifoldDensity + ?Sized,
{
    let xs = mc_setup(p, q, n, seed)?;
    let (lr, clamped) = log_ratios(p, q, &xs)?;
    let terms: Vec<f64> = lr.iter().map(|r| -r).collect();
    let (value, std_error) = mean_se(&terms);
    Ok(McEstimate {
        value,
        std_error,
        n,
        seed,
        clamped,
    })
}

fn check_same_dim(p: &GaussianParams, q: &GaussianParams) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(())
}

/// Closed-form squared Hellinger distance between two Gaussians.
pub fn gaussian_hellinger_sq(p: &GaussianParams, q: &GaussianParams) -> Result<f64> {
    check_same_dim(p, q)?;
    let avg = p.sigma().add(q.sigma()).scale(0.5);
    let c = Cholesky::factor(&avg)?;
    let dmu: Vec<f64> = p.mu().iter().zip(q.mu()).map(|(a, b)| a - b).collect();
    let log_bc = 0.25 * (p.cholesky().log_det() + q.cholesky().log_det())
        - 0.5 * c.log_det()
        - 0.125 * c.mahalanobis_sq(&dmu);
    Ok(2.0 - 2.0 * log_bc.exp())
}

/// Closed-form `KL(p ‖ q)` between two Gaussians.
pub fn gaussian_kl(p: &GaussianParams, q: &GaussianParams) -> Result<f64> {
    check_same_dim(p, q)?;
    let qi = q.cholesky().inverse();
    let dmu: Vec<f64> = p.mu().iter().zip(q.mu()).map(|(a, b)| a - b).collect();
    let tr = qi.frobenius_dot(p.sigma());
    Ok(0.5
        * (tr + q.cholesky().mahalanobis_sq(&dmu) - p.dim() as f64 + q.cholesky().log_det()
            - p.cholesky().log_det()))
}
