//! Siegel disk of complex symmetric matrices `Z` with `Z*Z ≺ I`, metric
//! `4·Re tr((I − ZZ*)⁻¹ dZ (I − Z*Z)⁻¹ dZ*)`. At `m = 1` this is the Poincaré
//! disk.
//!
//! A tangent vector at `0` is a complex symmetric `Y` with `dZ = Y/2`, so its
//! length is `‖Y‖_F`. Coordinates list the diagonal `(Re, Im)` pairs first,
//! then the strictly upper entries as `√2·(Re, Im)` pairs in row-major order.
//! If `Y = U S Uᵀ` (Takagi) then `exp Y = U tanh(S/2) Uᵀ`.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::{log_x_over_sinh, CHART_MARGIN};
use crate::error::{invalid, Error, Result};
use crate::linalg::{sym_eig, CMatrix, CoordVector};

/// Largest supported matrix order for exp, log and volume factors.
pub const SIEGEL_MAX_ORDER: usize = 2;

fn check_order(m: usize) -> Result<()> {
    if m > SIEGEL_MAX_ORDER {
        return Err(Error::Unsupported("Siegel disk is limited to order <= 2"));
    }
    Ok(())
}

/// Eigenvalues of the Hermitian `Z*Z`, clamped at zero, descending.
fn gram_spectrum(z: &CMatrix) -> Result<Vec<f64>> {
    let gram = z.adjoint().mul(z);
    let eig = sym_eig(&gram.realify_hermitian())?;
    // The real image doubles every eigenvalue; keep one of each pair.
    Ok(eig.eigenvalues.iter().step_by(2).map(|t| t.max(0.0)).collect())
}

pub(super) fn validate(z: &CMatrix) -> Result<()> {
    check_order(z.order())?;
    let scale = 1.0 + z.frobenius_norm();
    if z.asymmetry() > 1e-12 * scale {
        return Err(Error::OutsideChart("Siegel disk point must be complex symmetric"));
    }
    let top = gram_spectrum(z)?[0].sqrt();
    if top >= 1.0 - CHART_MARGIN {
        return Err(Error::OutsideChart("Siegel disk point needs largest singular value < 1"));
    }
    Ok(())
}

/// Orthonormal real coordinates of a complex symmetric matrix.
pub(super) fn complex_sym_vec(z: &CMatrix) -> Vec<f64> {
    let m = z.order();
    let mut out = Vec::with_capacity(m * (m + 1));
    for i in 0..m {
        let c = z.get(i, i);
        out.push(c.re);
        out.push(c.im);
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let c = z.get(i, j);
            out.push(SQRT_2 * c.re);
            out.push(SQRT_2 * c.im);
        }
    }
    out
}

fn complex_sym_unvec(v: &[f64], m: usize) -> Result<CMatrix> {
    let expected = m * (m + 1);
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: v.len(),
        });
    }
    let mut z = CMatrix::zeros(m);
    for i in 0..m {
        z.set(i, i, Complex64::new(v[2 * i], v[2 * i + 1]));
    }
    let mut k = 2 * m;
    for i in 0..m {
        for j in (i + 1)..m {
            let c = Complex64::new(v[k], v[k + 1]) / SQRT_2;
            z.set(i, j, c);
            z.set(j, i, c);
            k += 2;
        }
    }
    Ok(z)
}

/// `tanh(√t/2)/√t`.
fn exp_kernel(t: f64) -> f64 {
    if t < 1e-8 {
        return 0.5 - t / 24.0;
    }
    let s = t.sqrt();
    (0.5 * s).tanh() / s
}

/// `2·atanh(√t)/√t`.
fn log_kernel(t: f64) -> f64 {
    if t < 1e-8 {
        return 2.0 + 2.0 * t / 3.0;
    }
    let s = t.sqrt();
    2.0 * s.atanh() / s
}

pub(super) fn exp(m: usize, v: &[f64]) -> Result<CMatrix> {
    check_order(m)?;
    let y = complex_sym_unvec(v, m)?;
    let s_max = gram_spectrum(&y)?[0].sqrt();
    if (0.5 * s_max).tanh() >= 1.0 - CHART_MARGIN {
        return Err(Error::TangentTooLarge(s_max));
    }
    let gram = y.adjoint().mul(&y);
    let z = y.mul(&gram.hermitian_map(exp_kernel)?);
    Ok(symmetrize(&z))
}

pub(super) fn log_with_volume(z: &CMatrix) -> Result<(CoordVector, f64)> {
    let gram = z.adjoint().mul(z);
    let y = symmetrize(&z.mul(&gram.hermitian_map(log_kernel)?));
    let radii: Vec<f64> = gram_spectrum(z)?
        .iter()
        .map(|t| 2.0 * t.sqrt().min(1.0 - CHART_MARGIN).atanh())
        .collect();
    Ok((CoordVector::new(complex_sym_vec(&y))?, siegel_log_volume_from_radii(&radii)))
}

pub(super) fn log_volume_tangent(m: usize, v: &[f64]) -> Result<f64> {
    check_order(m)?;
    let y = complex_sym_unvec(v, m)?;
    let radii: Vec<f64> = gram_spectrum(&y)?.iter().map(|t| t.sqrt()).collect();
    Ok(siegel_log_volume_from_radii(&radii))
}

/// `log J` from the Takagi singular values `sᵢ` of the tangent vector.
///
/// With `λ = s/2`, `J = ∏_{i<j} φ(λᵢ − λⱼ) · ∏_{i≤j} φ(λᵢ + λⱼ)`, `φ(a) = a/sinh a`.
pub fn siegel_log_volume_from_radii(s: &[f64]) -> f64 {
    let lambda: Vec<f64> = s.iter().map(|x| 0.5 * x).collect();
    let mut acc = 0.0;
    for i in 0..lambda.len() {
        for j in i..lambda.len() {
            acc += log_x_over_sinh(lambda[i] + lambda[j]);
            if j > i {
                acc += log_x_over_sinh(lambda[i] - lambda[j]);
            }
        }
    }
    acc
}

/// Poincaré-disk distance between two scalars of the unit disk.
pub(super) fn distance_order_one(a: Complex64, b: Complex64) -> f64 {
    let delta = (a - b).norm_sqr() / ((1.0 - a.norm_sqr()) * (1.0 - b.norm_sqr()));
    2.0 * delta.sqrt().asinh()
}

fn symmetrize(z: &CMatrix) -> CMatrix {
    let m = z.order();
    let mut out = z.clone();
    for i in 0..m {
        for j in (i + 1)..m {
            let c = (z.get(i, j) + z.get(j, i)) * 0.5;
            out.set(i, j, c);
            out.set(j, i, c);
        }
    }
    out
}

/// Builds a Siegel point from row-major `(re, im)` pairs.
pub fn siegel_point(m: usize, pairs: &[(f64, f64)]) -> Result<CMatrix> {
    if m == 0 {
        return Err(invalid("matrix order must be at least 1"));
    }
    let data = pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    let z = CMatrix::from_row_major(m, data)?;
    validate(&z)?;
    Ok(z)
}
