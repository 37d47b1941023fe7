//! Density estimation on a manifold by mapping to the tangent space at `e`,
//! estimating there, and pushing the estimate forward.
//!
//! Every `log_density` returned by this module is with respect to the
//! Riemannian volume of the manifold, so estimators of different kinds can be
//! compared point by point. Wishart-type kernels are naturally densities on
//! the matrix entries and are converted.

mod cv;
mod em;
mod kde;


use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

pub use cv::{
    bandwidth_cv, bandwidth_cv_coords, bandwidth_cv_grouped, default_bandwidth_grid, default_dof_grid, dof_cv,
    log_grid, CvReport, DEFAULT_FOLDS, DEFAULT_GRID_POINTS,
};
pub use em::{em_fit, model_select_k, CovarianceKind, EmConfig, KSelection, MixtureModel};
pub use kde::{KdeModel, KernelKind};
pub(crate) use kde::gaussian_kde_log;

/// `log Σ exp(xᵢ)`, `−∞` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Rows of `coords` selected by `idx`.
pub(crate) fn gather(coords: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| coords[i].clone()).collect()
}
