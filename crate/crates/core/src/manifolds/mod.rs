//! Non-compact symmetric spaces with the base point fixed at the identity
//! element `e`.
//!
//! Each space provides the exponential and logarithm maps at `e` in an
//! orthonormal tangent frame, so the Euclidean norm of tangent coordinates is
//! the geodesic distance to `e`. The volume factor `J(x) = ∏ aᵢ / sinh(aᵢ)`
//! (the `aᵢ` being square roots of the curvature-operator eigenvalues along
//! `log x`) is the density of the Riemannian measure's pull-back relative to
//! tangent Lebesgue measure, inverted: a tangent density `g` pushes forward to
//! `f(x) = g(log x) · J(x)` with respect to the Riemannian volume.
//!
//! [`numeric_volume_factor`] recomputes `J` from finite differences of the
//! exponential map and the chart metric, independently of the closed forms.

mod oracle;
mod pd;
mod poincare;
mod siegel;

#[cfg(test)]
mod tests;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{sym_dim, CMatrix, CoordVector, PdMatrix};

pub use oracle::numeric_volume_factor;
pub use pd::{log_euclidean_distance, pd_log_riemannian_density_wrt_entries};
pub use siegel::{siegel_log_volume_from_radii, siegel_point, SIEGEL_MAX_ORDER};

/// Tangent vector at `e`, in orthonormal-frame coordinates.
pub type TangentCoords = CoordVector;

/// Chart-validity margin for the ball and the Siegel disk.
pub const CHART_MARGIN: f64 = 1e-12;

/// Which symmetric space, and its size parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Manifold {
    /// ℝᵈ; exp and log are the identity.
    Euclidean(usize),
    /// Positive definite `m × m` matrices with the affine-invariant metric.
    Pd(usize),
    /// Unit ball in ℝᵈ with metric `4‖dx‖²/(1−‖x‖²)²`.
    PoincareBall(usize),
    /// Complex symmetric `m × m` matrices with `Z*Z ≺ I`.
    SiegelDisk(usize),
}

/// A point in the natural chart of its manifold.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldPoint {
    /// Euclidean or Poincaré-ball coordinates.
    Vector(Vec<f64>),
    Pd(PdMatrix),
    Siegel(CMatrix),
}

impl ManifoldPoint {
    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            ManifoldPoint::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_pd(&self) -> Option<&PdMatrix> {
        match self {
            ManifoldPoint::Pd(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_siegel(&self) -> Option<&CMatrix> {
        match self {
            ManifoldPoint::Siegel(z) => Some(z),
            _ => None,
        }
    }
}

impl Manifold {
    /// Builds a handle, rejecting zero sizes.
    pub fn new_checked(self) -> Result<Self> {
        if self.size() == 0 {
            return Err(invalid("manifold size must be at least 1"));
        }
        Ok(self)
    }

    /// The size parameter (`d` for vector spaces, `m` for matrix spaces).
    pub fn size(&self) -> usize {
        match *self {
            Manifold::Euclidean(d) | Manifold::PoincareBall(d) => d,
            Manifold::Pd(m) | Manifold::SiegelDisk(m) => m,
        }
    }

    /// Real dimension of the manifold (and of its tangent space).
    pub fn dim(&self) -> usize {
        match *self {
            Manifold::Euclidean(d) | Manifold::PoincareBall(d) => d,
            Manifold::Pd(m) => sym_dim(m),
            Manifold::SiegelDisk(m) => m * (m + 1),
        }
    }

    pub fn base_point(&self) -> ManifoldPoint {
        match *self {
            Manifold::Euclidean(d) | Manifold::PoincareBall(d) => ManifoldPoint::Vector(vec![0.0; d]),
            Manifold::Pd(m) => ManifoldPoint::Pd(PdMatrix::identity(m)),
            Manifold::SiegelDisk(m) => ManifoldPoint::Siegel(CMatrix::zeros(m)),
        }
    }

    /// Checks that `x` is a valid point of this manifold.
    pub fn validate(&self, x: &ManifoldPoint) -> Result<()> {
        match (*self, x) {
            (Manifold::Euclidean(d), ManifoldPoint::Vector(v)) => {
                check_len(d, v.len())?;
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFinite);
                }
                Ok(())
            }
            (Manifold::PoincareBall(d), ManifoldPoint::Vector(v)) => {
                check_len(d, v.len())?;
                poincare::validate(v)
            }
            (Manifold::Pd(m), ManifoldPoint::Pd(p)) => check_len(m, p.order()),
            (Manifold::SiegelDisk(m), ManifoldPoint::Siegel(z)) => {
                check_len(m, z.order())?;
                siegel::validate(z)
            }
            _ => Err(invalid(format!("point kind does not belong to {self}"))),
        }
    }

    fn check_tangent(&self, v: &[f64]) -> Result<()> {
        check_len(self.dim(), v.len())?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Riemannian exponential at `e`.
    pub fn exp_map(&self, v: &[f64]) -> Result<ManifoldPoint> {
        self.check_tangent(v)?;
        match *self {
            Manifold::Euclidean(_) => Ok(ManifoldPoint::Vector(v.to_vec())),
            Manifold::Pd(m) => pd::exp(m, v).map(ManifoldPoint::Pd),
            Manifold::PoincareBall(_) => poincare::exp(v).map(ManifoldPoint::Vector),
            Manifold::SiegelDisk(m) => siegel::exp(m, v).map(ManifoldPoint::Siegel),
        }
    }

    /// Riemannian logarithm at `e`.
    pub fn log_map(&self, x: &ManifoldPoint) -> Result<TangentCoords> {
        self.log_map_with_volume(x).map(|(v, _)| v)
    }

    /// `log x` together with `log J(x)`, sharing the spectral work.
    pub fn log_map_with_volume(&self, x: &ManifoldPoint) -> Result<(TangentCoords, f64)> {
        self.validate(x)?;
        match (*self, x) {
            (Manifold::Euclidean(_), ManifoldPoint::Vector(v)) => Ok((CoordVector::new(v.clone())?, 0.0)),
            (Manifold::Pd(_), ManifoldPoint::Pd(p)) => pd::log_with_volume(p),
            (Manifold::PoincareBall(d), ManifoldPoint::Vector(v)) => poincare::log_with_volume(d, v),
            (Manifold::SiegelDisk(_), ManifoldPoint::Siegel(z)) => siegel::log_with_volume(z),
            _ => unreachable!("validated above"),
        }
    }

    /// `log J(exp v)` evaluated directly from tangent coordinates.
    pub fn log_volume_factor_tangent(&self, v: &[f64]) -> Result<f64> {
        self.check_tangent(v)?;
        match *self {
            Manifold::Euclidean(_) => Ok(0.0),
            Manifold::Pd(m) => pd::log_volume_tangent(m, v),
            Manifold::PoincareBall(d) => Ok(poincare::log_volume_radius(d, crate::linalg::norm2(v))),
            Manifold::SiegelDisk(m) => siegel::log_volume_tangent(m, v),
        }
    }

    pub fn log_volume_factor(&self, x: &ManifoldPoint) -> Result<f64> {
        self.log_map_with_volume(x).map(|(_, lj)| lj)
    }

    /// `J(x) ∈ (0, 1]`, equal to 1 exactly at `e`.
    pub fn volume_factor(&self, x: &ManifoldPoint) -> Result<f64> {
        self.log_volume_factor(x).map(f64::exp)
    }

    /// Geodesic distance. The Siegel disk is supported for `m = 1` only.
    pub fn geodesic_distance(&self, x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
        self.validate(x)?;
        self.validate(y)?;
        match (*self, x, y) {
            (Manifold::Euclidean(_), ManifoldPoint::Vector(a), ManifoldPoint::Vector(b)) => {
                Ok(crate::linalg::dist2_sq(a, b).sqrt())
            }
            (Manifold::PoincareBall(_), ManifoldPoint::Vector(a), ManifoldPoint::Vector(b)) => {
                Ok(poincare::distance(a, b))
            }
            (Manifold::Pd(_), ManifoldPoint::Pd(a), ManifoldPoint::Pd(b)) => pd::distance(a, b),
            (Manifold::SiegelDisk(1), ManifoldPoint::Siegel(a), ManifoldPoint::Siegel(b)) => {
                Ok(siegel::distance_order_one(a.get(0, 0), b.get(0, 0)))
            }
            (Manifold::SiegelDisk(_), _, _) => {
                Err(Error::Unsupported("geodesic distance on the Siegel disk needs m = 1"))
            }
            _ => unreachable!("validated above"),
        }
    }

    /// Flat real coordinates of the chart representation (`Vec(X)` for
    /// matrices, using the orthonormal symmetric vectorization).
    pub fn chart_coords(&self, x: &ManifoldPoint) -> Result<Vec<f64>> {
        self.validate(x)?;
        Ok(match x {
            ManifoldPoint::Vector(v) => v.clone(),
            ManifoldPoint::Pd(p) => crate::linalg::sym_vec(p).into_vec(),
            ManifoldPoint::Siegel(z) => siegel::complex_sym_vec(z),
        })
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::Euclidean(d) => write!(f, "euclidean:{d}"),
            Manifold::Pd(m) => write!(f, "pd:{m}"),
            Manifold::PoincareBall(d) => write!(f, "poincare:{d}"),
            Manifold::SiegelDisk(m) => write!(f, "siegel:{m}"),
        }
    }
}

impl FromStr for Manifold {
    type Err = Error;

    /// Parses `pd:<m>`, `poincare:<d>`, `siegel:<m>` or `euclidean:<d>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, size) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| invalid(format!("manifold `{s}` is not of the form kind:size")))?;
        let size: usize = size
            .trim()
            .parse()
            .map_err(|_| invalid(format!("manifold size `{size}` is not an integer")))?;
        let m = match kind.trim().to_ascii_lowercase().as_str() {
            "pd" | "spd" => Manifold::Pd(size),
            "poincare" | "ball" => Manifold::PoincareBall(size),
            "siegel" => Manifold::SiegelDisk(size),
            "euclidean" | "rn" => Manifold::Euclidean(size),
            other => return Err(invalid(format!("unknown manifold kind `{other}`"))),
        };
        m.new_checked()
    }
}

/// `log(a / sinh a)`, stable for small and large `|a|`; zero at `a = 0`.
pub fn log_x_over_sinh(a: f64) -> f64 {
    let a = a.abs();
    if a < 1e-3 {
        let a2 = a * a;
        // Series of log(a / sinh a) = −a²/6 + a⁴/180 − …
        return -a2 / 6.0 + a2 * a2 / 180.0;
    }
    // log sinh a = a − ln 2 + ln(1 − e^{−2a})
    a.ln() - (a - core::f64::consts::LN_2 + (-(-2.0 * a).exp_m1()).ln())
}
