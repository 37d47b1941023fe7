//! Poincaré ball of any dimension, curvature −1.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{log_x_over_sinh, CHART_MARGIN};
use crate::error::{Error, Result};
use crate::linalg::{norm2, CoordVector};

pub(super) fn validate(x: &[f64]) -> Result<()> {
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite);
    }
    if norm2(x) >= 1.0 - CHART_MARGIN {
        return Err(Error::OutsideChart("Poincaré ball point needs ‖x‖ < 1"));
    }
    Ok(())
}

/// Radial map: same direction, Euclidean radius `tanh(r/2)`.
pub(super) fn exp(v: &[f64]) -> Result<Vec<f64>> {
    let r = norm2(v);
    if r == 0.0 {
        return Ok(vec![0.0; v.len()]);
    }
    let rho = (0.5 * r).tanh();
    if rho >= 1.0 - CHART_MARGIN {
        return Err(Error::TangentTooLarge(r));
    }
    let s = rho / r;
    Ok(v.iter().map(|c| c * s).collect())
}

/// Geodesic radius of a ball point, `2·atanh‖x‖`.
pub(super) fn radius(x: &[f64]) -> f64 {
    2.0 * norm2(x).atanh()
}

pub(super) fn log_with_volume(d: usize, x: &[f64]) -> Result<(CoordVector, f64)> {
    let rho = norm2(x);
    if rho == 0.0 {
        return Ok((CoordVector::new(vec![0.0; d])?, 0.0));
    }
    let r = radius(x);
    let s = r / rho;
    let v = CoordVector::new(x.iter().map(|c| c * s).collect())?;
    Ok((v, log_volume_radius(d, r)))
}

/// `(d − 1)·log(r/sinh r)`.
pub(super) fn log_volume_radius(d: usize, r: f64) -> f64 {
    (d as f64 - 1.0) * log_x_over_sinh(r)
}

/// `acosh(1 + 2‖x−y‖²/((1−‖x‖²)(1−‖y‖²)))`, evaluated as `2·asinh(√δ)`.
pub(super) fn distance(x: &[f64], y: &[f64]) -> f64 {
    let diff = crate::linalg::dist2_sq(x, y);
    let nx = x.iter().map(|c| c * c).sum::<f64>();
    let ny = y.iter().map(|c| c * c).sum::<f64>();
    let delta = diff / ((1.0 - nx) * (1.0 - ny));
    2.0 * delta.sqrt().asinh()
}
