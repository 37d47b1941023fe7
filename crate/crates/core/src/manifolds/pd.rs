//! Positive definite matrices with the affine-invariant metric
//! `g_Σ(U, V) = tr(Σ⁻¹UΣ⁻¹V)`. At the identity the metric is Frobenius, so
//! matrix exp/log composed with `sym_vec` are the Riemannian maps in an
//! orthonormal frame.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::log_x_over_sinh;
use crate::error::Result;
use crate::linalg::{mat_exp, mat_log, mat_pow, sym_eig, sym_unvec, sym_vec, CoordVector, PdMatrix};

pub(super) fn exp(m: usize, v: &[f64]) -> Result<PdMatrix> {
    mat_exp(&sym_unvec(v, m)?)
}

pub(super) fn log_with_volume(p: &PdMatrix) -> Result<(CoordVector, f64)> {
    let eig = sym_eig(p.as_sym())?;
    crate::linalg::check_positive(&eig)?;
    let log = eig.map(f64::ln);
    let mu: Vec<f64> = eig.eigenvalues.iter().map(|l| l.ln()).collect();
    Ok((sym_vec(&log), log_volume_from_log_spectrum(&mu)))
}

pub(super) fn log_volume_tangent(m: usize, v: &[f64]) -> Result<f64> {
    let eig = sym_eig(&sym_unvec(v, m)?)?;
    Ok(log_volume_from_log_spectrum(&eig.eigenvalues))
}

/// `Σ_{i<j} log(a/sinh a)` with `a = |μᵢ − μⱼ|/2`, `μ` the spectrum of `log Σ`.
///
/// Equivalently `|λᵢ − λⱼ|/sinh|λᵢ − λⱼ|` with `λ` the spectrum of `log Σ^{1/2}`.
pub(super) fn log_volume_from_log_spectrum(mu: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..mu.len() {
        for j in (i + 1)..mu.len() {
            acc += log_x_over_sinh(0.5 * (mu[i] - mu[j]));
        }
    }
    acc
}

pub(super) fn distance(x: &PdMatrix, y: &PdMatrix) -> Result<f64> {
    let inv_sqrt = mat_pow(x, -0.5)?;
    let whitened = y.sandwich(&inv_sqrt);
    let eig = sym_eig(&whitened)?;
    Ok(eig
        .eigenvalues
        .iter()
        .map(|l| {
            let ll = l.max(f64::MIN_POSITIVE).ln();
            ll * ll
        })
        .sum::<f64>()
        .sqrt())
}

/// `‖log x − log y‖_F`.
pub fn log_euclidean_distance(x: &PdMatrix, y: &PdMatrix) -> Result<f64> {
    Ok(mat_log(x)?.sub(&mat_log(y)?).frobenius_norm())
}

/// `log(dμ_g / dX)` where `dX = ∏_{i≤j} dXᵢⱼ` is Lebesgue measure on the
/// independent entries: `−((m+1)/2)·log det X + (m(m−1)/4)·ln 2`.
///
/// A density `w` on the entries (e.g. Wishart) has Riemannian density
/// `w(X) · exp(−this)`.
pub fn pd_log_riemannian_density_wrt_entries(x: &PdMatrix) -> Result<f64> {
    let m = x.order() as f64;
    let eig = sym_eig(x.as_sym())?;
    let log_det: f64 = eig.eigenvalues.iter().map(|l| l.ln()).sum();
    Ok(-0.5 * (m + 1.0) * log_det + 0.25 * m * (m - 1.0) * core::f64::consts::LN_2)
}
