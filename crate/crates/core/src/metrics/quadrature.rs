use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;

use super::ManifoldDensity;
use crate::distributions::GaussianParams;
use crate::error::{invalid, Error, Result};
use crate::manifolds::{Manifold, ManifoldPoint};

/// Largest accepted difference between the full-grid and half-grid values.
pub const QUADRATURE_TOLERANCE: f64 = 1e-3;

/// Midpoint grid over the disk `ρ ≤ r_max` of the Poincaré disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    pub radial: usize,
    pub angular: usize,
    pub r_max: f64,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self {
            radial: 500,
            angular: 360,
            r_max: 0.999,
        }
    }
}

impl PolarGrid {
    fn check(&self) -> Result<()> {
        if self.radial < 2 || self.angular < 2 {
            return Err(invalid("polar grid needs at least 2 radial and 2 angular cells"));
        }
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(invalid("polar grid radius must lie in (0, 1)"));
        }
        Ok(())
    }

    fn halved(&self) -> Self {
        Self {
            radial: self.radial / 2,
            angular: self.angular / 2,
            r_max: self.r_max,
        }
    }

    /// `Σ f(ρ, θ)·dρ·dθ` over midpoints.
    fn sum(&self, mut f: impl FnMut(f64, f64) -> Result<f64>) -> Result<f64> {
        let dr = self.r_max / self.radial as f64;
        let dt = 2.0 * PI / self.angular as f64;
        let mut total = 0.0;
        for i in 0..self.radial {
            let rho = (i as f64 + 0.5) * dr;
            for k in 0..self.angular {
                total += f(rho, (k as f64 + 0.5) * dt)?;
            }
        }
        Ok(total * dr * dt)
    }
}

fn check_power(power: u32) -> Result<()> {
    if !(power == 1 || power == 2) {
        return Err(invalid("Lp quadrature supports p = 1 or p = 2"));
    }
    Ok(())
}

/// Runs `integral` on `grid` and on the grid with half the cells per axis;
/// their difference estimates the error.
fn with_error_check(grid: &PolarGrid, integral: impl Fn(&PolarGrid) -> Result<f64>, power: u32) -> Result<f64> {
    grid.check()?;
    let full = integral(grid)?.powf(1.0 / power as f64);
    let coarse = integral(&grid.halved())?.powf(1.0 / power as f64);
    let err = (full - coarse).abs();
    if !(err <= QUADRATURE_TOLERANCE) {
        return Err(Error::CoarseGrid(err));
    }
    Ok(full)
}

/// `(∫|p − q|ᵖ dμ_g)^{1/p}` on the Poincaré disk, with the hyperbolic area
/// element `4ρ/(1 − ρ²)² dρ dθ`.
pub fn lp_distance_quadrature<P, Q>(p: &P, q: &Q, power: u32, grid: &PolarGrid) -> Result<f64>
where
    P: ManifoldDensity + ?Sized,
    Q: ManifoldDensity + ?Sized,
{
    check_power(power)?;
    if p.manifold() != Manifold::PoincareBall(2) || q.manifold() != Manifold::PoincareBall(2) {
        return Err(Error::Unsupported("Lp quadrature is implemented on the Poincaré disk only"));
    }
    let integral = |g: &PolarGrid| {
        g.sum(|rho, theta| {
            let x = ManifoldPoint::Vector(vec![rho * theta.cos(), rho * theta.sin()]);
            let diff = (p.log_density(&x)?.exp() - q.log_density(&x)?.exp()).abs();
            let conf = 1.0 - rho * rho;
            Ok(diff.powi(power as i32) * 4.0 * rho / (conf * conf))
        })
    };
    with_error_check(grid, integral, power)
}

/// `(∫|p − q|ᵖ dv)^{1/p}` for two Gaussians on the plane, on the same grid
/// pulled back through `exp`: node `ρ` maps to radius `2·atanh ρ`.
pub fn lp_distance_tangent(p: &GaussianParams, q: &GaussianParams, power: u32, grid: &PolarGrid) -> Result<f64> {
    check_power(power)?;
    if p.dim() != 2 || q.dim() != 2 {
        return Err(Error::Unsupported("tangent Lp quadrature is implemented on the plane only"));
    }
    let integral = |g: &PolarGrid| {
        g.sum(|rho, theta| {
            let r = 2.0 * rho.atanh();
            let v = [r * theta.cos(), r * theta.sin()];
            let diff = (p.log_density(&v)?.exp() - q.log_density(&v)?.exp()).abs();
            Ok(diff.powi(power as i32) * r * 2.0 / (1.0 - rho * rho))
        })
    };
    with_error_check(grid, integral, power)
}

/// `∫ p dμ_g` over the grid disk of the Poincaré disk. Unlike the Lᵖ
/// routines this does not run the half-grid check, so callers can study the
/// quadrature error directly.
pub fn disk_mass<P>(p: &P, grid: &PolarGrid) -> Result<f64>
where
    P: ManifoldDensity + ?Sized,
{
    grid.check()?;
    if p.manifold() != Manifold::PoincareBall(2) {
        return Err(Error::Unsupported("disk quadrature is implemented on the Poincaré disk only"));
    }
    grid.sum(|rho, theta| {
        let x = ManifoldPoint::Vector(vec![rho * theta.cos(), rho * theta.sin()]);
        let conf = 1.0 - rho * rho;
        Ok(p.log_density(&x)?.exp() * 4.0 * rho / (conf * conf))
    })
}
