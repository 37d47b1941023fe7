use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};
#[allow(unused_imports)]
use num_traits::Float;

use super::log_sum_exp;
use crate::distributions::log_multivariate_gamma;
use crate::error::{invalid, Error, Result};
use crate::linalg::{dist2_sq, sym_unvec, Cholesky, SymMatrix};
use crate::manifolds::{pd_log_riemannian_density_wrt_entries, Manifold, ManifoldPoint};

/// Kernel family and its smoothing parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// `N(log x; log Xᵢ, h²I)` pushed forward: the log-Gaussian KDE.
    LogGaussian { bandwidth: f64 },
    /// Gaussian KDE on chart coordinates (`sym_vec(X)` on PD), `N(·; ·, h²I)`.
    EuclideanGaussian { bandwidth: f64 },
    /// `W(X | Xᵢ/ν, ν)` on PD(m).
    Wishart { dof: f64 },
    /// `W⁻¹(X | νXᵢ, ν + m + 1)` on PD(m).
    InvWishart { dof: f64 },
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::LogGaussian { .. } => "log-gaussian",
            KernelKind::EuclideanGaussian { .. } => "euclidean-gaussian",
            KernelKind::Wishart { .. } => "wishart",
            KernelKind::InvWishart { .. } => "inv-wishart",
        }
    }

    /// The bandwidth or degrees of freedom.
    pub fn parameter(&self) -> f64 {
        match *self {
            KernelKind::LogGaussian { bandwidth } | KernelKind::EuclideanGaussian { bandwidth } => bandwidth,
            KernelKind::Wishart { dof } | KernelKind::InvWishart { dof } => dof,
        }
    }

    /// Same family with a different parameter.
    pub fn with_parameter(&self, p: f64) -> Self {
        match self {
            KernelKind::LogGaussian { .. } => KernelKind::LogGaussian { bandwidth: p },
            KernelKind::EuclideanGaussian { .. } => KernelKind::EuclideanGaussian { bandwidth: p },
            KernelKind::Wishart { .. } => KernelKind::Wishart { dof: p },
            KernelKind::InvWishart { .. } => KernelKind::InvWishart { dof: p },
        }
    }

    fn is_wishart(&self) -> bool {
        matches!(self, KernelKind::Wishart { .. } | KernelKind::InvWishart { .. })
    }

    fn validate(&self, manifold: Manifold) -> Result<()> {
        let p = self.parameter();
        if !(p.is_finite() && p > 0.0) {
            return Err(invalid(alloc::format!("{} parameter must be positive, got {p}", self.name())));
        }
        match (*self, manifold) {
            (KernelKind::Wishart { dof }, Manifold::Pd(m)) if dof <= m as f64 - 1.0 => {
                Err(invalid(alloc::format!("Wishart kernel needs dof > {}", m as f64 - 1.0)))
            }
            (KernelKind::Wishart { .. } | KernelKind::InvWishart { .. }, Manifold::Pd(_)) => Ok(()),
            (KernelKind::Wishart { .. } | KernelKind::InvWishart { .. }, _) => {
                Err(Error::Unsupported("Wishart-type kernels live on PD(m)"))
            }
            (KernelKind::EuclideanGaussian { .. }, Manifold::SiegelDisk(_)) => {
                Err(Error::Unsupported("chart-coordinate KDE is not available on the Siegel disk"))
            }
            _ => Ok(()),
        }
    }
}

/// Coefficients of a Wishart-type kernel's log density written as
/// `cx·log|X| + ct·t + ci·log|Xᵢ| + c0`, where `t = tr(Xᵢ⁻¹X)` for Wishart and
/// `t = tr(Xᵢ X⁻¹)` for inverse Wishart.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WishartTerms {
    pub cx: f64,
    pub ct: f64,
    pub ci: f64,
    pub c0: f64,
}

impl WishartTerms {
    pub fn new(kind: KernelKind, m: usize) -> Self {
        let mf = m as f64;
        match kind {
            KernelKind::Wishart { dof: nu } => WishartTerms {
                cx: 0.5 * (nu - mf - 1.0),
                ct: -0.5 * nu,
                ci: -0.5 * nu,
                c0: 0.5 * nu * mf * (nu.ln() - LN_2) - log_multivariate_gamma(m, 0.5 * nu),
            },
            KernelKind::InvWishart { dof: nu } => {
                let shifted = nu + mf + 1.0;
                WishartTerms {
                    cx: -0.5 * (shifted + mf + 1.0),
                    ct: -0.5 * nu,
                    ci: 0.5 * shifted,
                    c0: 0.5 * shifted * mf * (nu.ln() - LN_2) - log_multivariate_gamma(m, 0.5 * shifted),
                }
            }
            _ => unreachable!("only Wishart-type kinds"),
        }
    }

    #[inline]
    pub fn eval(&self, log_det_x: f64, t: f64, log_det_xi: f64) -> f64 {
        self.cx * log_det_x + self.ct * t + self.ci * log_det_xi + self.c0
    }
}

/// A PD matrix with its inverse and log-determinant.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PdCache {
    pub x: SymMatrix,
    pub inv: SymMatrix,
    pub log_det: f64,
}

impl PdCache {
    pub fn new(x: &SymMatrix) -> Result<Self> {
        let c = Cholesky::factor(x)?;
        Ok(Self {
            x: x.clone(),
            inv: c.inverse().into_sym(),
            log_det: c.log_det(),
        })
    }

    /// `t` for the kernel centred at `self` evaluated at `query`.
    #[inline]
    pub fn trace_term(&self, kind: KernelKind, query: &PdCache) -> f64 {
        match kind {
            KernelKind::Wishart { .. } => self.inv.frobenius_dot(&query.x),
            _ => self.x.frobenius_dot(&query.inv),
        }
    }
}

/// Kernel density estimate built from a training sample.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeModel {
    manifold: Manifold,
    kind: KernelKind,
    coords: Vec<Vec<f64>>,
    pd: Vec<PdCache>,
}

impl KdeModel {
    /// Stores `log x` for the log-Gaussian kind, chart coordinates for the
    /// chart kind, and `sym_vec(X)` of the raw matrices for Wishart kinds.
    pub fn fit(manifold: Manifold, points: &[ManifoldPoint], kind: KernelKind) -> Result<Self> {
        kind.validate(manifold)?;
        let coords = points
            .iter()
            .map(|x| match kind {
                KernelKind::LogGaussian { .. } => manifold.log_map(x).map(|v| v.into_vec()),
                _ => manifold.chart_coords(x),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coords(manifold, kind, coords)
    }

    /// Rebuilds a model from stored coordinates (see [`KdeModel::coords`]).
    pub fn from_coords(manifold: Manifold, kind: KernelKind, coords: Vec<Vec<f64>>) -> Result<Self> {
        kind.validate(manifold)?;
        if coords.is_empty() {
            return Err(invalid("KDE needs at least one training point"));
        }
        let d = manifold.dim();
        for row in &coords {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let pd = if kind.is_wishart() {
            let m = manifold.size();
            coords
                .iter()
                .map(|row| PdCache::new(&sym_unvec(row, m)?))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            manifold,
            kind,
            coords,
            pd,
        })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    /// Log density with respect to the Riemannian volume.
    pub fn log_density(&self, x: &ManifoldPoint) -> Result<f64> {
        let n = self.coords.len() as f64;
        match self.kind {
            KernelKind::LogGaussian { bandwidth } => {
                let (v, log_j) = self.manifold.log_map_with_volume(x)?;
                Ok(gaussian_kde_log(&self.coords, &v, bandwidth) + log_j)
            }
            KernelKind::EuclideanGaussian { bandwidth } => {
                let c = self.manifold.chart_coords(x)?;
                Ok(gaussian_kde_log(&self.coords, &c, bandwidth) + log_chart_to_riemannian(self.manifold, x)?)
            }
            KernelKind::Wishart { .. } | KernelKind::InvWishart { .. } => {
                self.manifold.validate(x)?;
                let p = x.as_pd().expect("validated PD point");
                let q = PdCache::new(p.as_sym())?;
                let terms = WishartTerms::new(self.kind, self.manifold.size());
                let logs: Vec<f64> = self
                    .pd
                    .iter()
                    .map(|k| terms.eval(q.log_det, k.trace_term(self.kind, &q), k.log_det))
                    .collect();
                Ok(log_sum_exp(&logs) - n.ln() - pd_log_riemannian_density_wrt_entries(p)?)
            }
        }
    }
}

/// `log (1/n) Σ N(v; cᵢ, h²I)`.
pub(crate) fn gaussian_kde_log(centres: &[Vec<f64>], v: &[f64], h: f64) -> f64 {
    let d = v.len() as f64;
    let inv = 0.5 / (h * h);
    let logs: Vec<f64> = centres.iter().map(|c| -dist2_sq(c, v) * inv).collect();
    log_sum_exp(&logs) - (centres.len() as f64).ln() - 0.5 * d * (2.0 * PI * h * h).ln()
}

/// `log(d chart-Lebesgue / d μ_g)` at `x`: adds to a chart-coordinate density
/// to give a Riemannian one.
pub(crate) fn log_chart_to_riemannian(manifold: Manifold, x: &ManifoldPoint) -> Result<f64> {
    match (manifold, x) {
        (Manifold::Euclidean(_), _) => Ok(0.0),
        (Manifold::Pd(m), ManifoldPoint::Pd(p)) => {
            // sym_vec stretches each of the m(m−1)/2 off-diagonal entries by √2.
            let mf = m as f64;
            Ok(0.25 * mf * (mf - 1.0) * LN_2 - pd_log_riemannian_density_wrt_entries(p)?)
        }
        (Manifold::PoincareBall(d), ManifoldPoint::Vector(v)) => {
            let r2: f64 = v.iter().map(|c| c * c).sum();
            Ok(-(d as f64) * (2.0 / (1.0 - r2)).ln())
        }
        _ => Err(Error::Unsupported("chart-coordinate KDE is not available on the Siegel disk")),
    }
}
