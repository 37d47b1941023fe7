use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::kde::{KernelKind, PdCache, WishartTerms};
use super::log_sum_exp;
use crate::error::{invalid, Error, Result};
use crate::linalg::dist2_sq;
use crate::manifolds::{pd_log_riemannian_density_wrt_entries, Manifold, ManifoldPoint};
use crate::rng::{Seed, SymRng};

pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_GRID_POINTS: usize = 40;

/// Upper end of the default degrees-of-freedom grid for Wishart-type kernels.
pub const DEFAULT_MAX_DOF: f64 = 1000.0;

/// Outcome of k-fold cross-validation over a parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub candidates: Vec<f64>,
    /// `fold_scores[c][f]`: mean held-out log density for candidate `c` on fold `f`.
    pub fold_scores: Vec<Vec<f64>>,
    pub mean_scores: Vec<f64>,
    pub selected_index: usize,
    pub selected: f64,
    pub folds: usize,
    pub seed: u64,
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
        return Err(invalid("log grid needs 0 < lo <= hi and at least one point"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

/// `[0.01ŝ, 10ŝ]` on a 40-point log grid, `ŝ` the mean per-coordinate
/// standard deviation (1 when the data have no spread).
pub fn default_bandwidth_grid(coords: &[Vec<f64>]) -> Vec<f64> {
    let s = mean_coordinate_sd(coords);
    let s = if s.is_finite() && s > 0.0 { s } else { 1.0 };
    log_grid(0.01 * s, 10.0 * s, DEFAULT_GRID_POINTS).expect("positive range")
}

/// Wishart: `ν ∈ [m, 1000]`; inverse Wishart: `ν ∈ [m + 2, 1000]`; 40 log-spaced points.
pub fn default_dof_grid(kind: KernelKind, m: usize) -> Vec<f64> {
    let lo = match kind {
        KernelKind::InvWishart { .. } => m as f64 + 2.0,
        _ => (m as f64).max(1.0),
    };
    log_grid(lo, DEFAULT_MAX_DOF, DEFAULT_GRID_POINTS).expect("positive range")
}

fn mean_coordinate_sd(coords: &[Vec<f64>]) -> f64 {
    let n = coords.len();
    if n == 0 {
        return 0.0;
    }
    let d = coords[0].len();
    let mut total = 0.0;
    for j in 0..d {
        let mean = coords.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = coords.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n as f64;
        total += var.sqrt();
    }
    total / d as f64
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("parameter grid is empty"));
    }
    if grid.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(invalid("grid values must be positive and finite"));
    }
    Ok(())
}

/// Fold index for every member of every group. Members are shuffled within
/// their group and dealt round-robin, continuing the deal across groups so
/// that every fold receives about `n/k` points.
pub(crate) fn assign_folds(sizes: &[usize], folds: usize, seed: Seed) -> Vec<Vec<usize>> {
    let mut rng = SymRng::new(seed);
    let mut dealt = 0usize;
    sizes
        .iter()
        .map(|&n| {
            let mut perm: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut perm);
            let mut labels = vec![0; n];
            for &member in &perm {
                labels[member] = dealt % folds;
                dealt += 1;
            }
            labels
        })
        .collect()
}

fn check_folds(total: usize, folds: usize) -> Result<()> {
    if folds < 2 {
        return Err(invalid("cross-validation needs at least 2 folds"));
    }
    if total < 2 * folds {
        return Err(invalid(alloc::format!("{total} points cannot fill {folds} folds (need at least {})", 2 * folds)));
    }
    Ok(())
}

/// Picks the best mean score; exact ties go to `prefer` (the smoother end).
fn select(candidates: &[f64], means: &[f64], prefer_larger: bool) -> usize {
    let mut best = 0;
    for i in 1..candidates.len() {
        let better = means[i] > means[best]
            || (means[i] == means[best]
                && if prefer_larger {
                    candidates[i] > candidates[best]
                } else {
                    candidates[i] < candidates[best]
                });
        if better {
            best = i;
        }
    }
    best
}

fn report(candidates: &[f64], fold_scores: Vec<Vec<f64>>, folds: usize, seed: Seed, prefer_larger: bool) -> Result<CvReport> {
    let mean_scores: Vec<f64> = fold_scores.iter().map(|f| f.iter().sum::<f64>() / folds as f64).collect();
    if mean_scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite);
    }
    let selected_index = select(candidates, &mean_scores, prefer_larger);
    Ok(CvReport {
        candidates: candidates.to_vec(),
        fold_scores,
        mean_scores,
        selected_index,
        selected: candidates[selected_index],
        folds,
        seed: seed.0,
    })
}

/// Isotropic Gaussian KDE cross-validation. Each held-out point is scored
/// under the KDE of the training part of its own group, plus its offset.
fn gaussian_cv(groups: &[(&[Vec<f64>], Vec<f64>)], grid: &[f64], folds: usize, seed: Seed) -> Result<CvReport> {
    check_grid(grid)?;
    let sizes: Vec<usize> = groups.iter().map(|(c, _)| c.len()).collect();
    check_folds(sizes.iter().sum(), folds)?;
    if groups.len() > 1 && sizes.iter().any(|&n| n < 2) {
        return Err(invalid("every group needs at least 2 points for grouped cross-validation"));
    }
    let labels = assign_folds(&sizes, folds, seed);
    let d = groups
        .iter()
        .find_map(|(c, _)| c.first().map(|r| r.len()))
        .ok_or_else(|| invalid("no data"))?;
    let norm: Vec<f64> = grid.iter().map(|h| 0.5 * d as f64 * (2.0 * PI * h * h).ln()).collect();
    let inv: Vec<f64> = grid.iter().map(|h| 0.5 / (h * h)).collect();

    let mut fold_scores = vec![vec![0.0; folds]; grid.len()];
    let mut buf = Vec::new();
    let mut d2 = Vec::new();
    for f in 0..folds {
        let mut sums = vec![0.0; grid.len()];
        let mut count = 0usize;
        for ((coords, offsets), lab) in groups.iter().zip(&labels) {
            let train: Vec<&Vec<f64>> = coords.iter().zip(lab).filter(|(_, &l)| l != f).map(|(c, _)| c).collect();
            let ln_n = (train.len() as f64).ln();
            for (i, x) in coords.iter().enumerate().filter(|(i, _)| lab[*i] == f) {
                d2.clear();
                d2.extend(train.iter().map(|c| dist2_sq(c, x)));
                for (k, s) in sums.iter_mut().enumerate() {
                    buf.clear();
                    buf.extend(d2.iter().map(|v| -v * inv[k]));
                    *s += log_sum_exp(&buf) - ln_n - norm[k] + offsets[i];
                }
                count += 1;
            }
        }
        for (k, s) in sums.into_iter().enumerate() {
            fold_scores[k][f] = s / count as f64;
        }
    }
    report(grid, fold_scores, folds, seed, true)
}

/// Log-Gaussian KDE bandwidth by k-fold held-out log-likelihood.
pub fn bandwidth_cv(manifold: Manifold, points: &[ManifoldPoint], grid: &[f64], folds: usize, seed: Seed) -> Result<CvReport> {
    let mut coords = Vec::with_capacity(points.len());
    let mut log_j = Vec::with_capacity(points.len());
    for x in points {
        let (v, lj) = manifold.log_map_with_volume(x)?;
        coords.push(v.into_vec());
        log_j.push(lj);
    }
    gaussian_cv(&[(&coords, log_j)], grid, folds, seed)
}

/// Gaussian KDE bandwidth on plain coordinates (no volume term).
pub fn bandwidth_cv_coords(coords: &[Vec<f64>], grid: &[f64], folds: usize, seed: Seed) -> Result<CvReport> {
    gaussian_cv(&[(coords, vec![0.0; coords.len()])], grid, folds, seed)
}

/// One bandwidth shared by several class-conditional KDEs: folds are
/// stratified by group and each held-out point is scored under its own
/// group's estimate.
pub fn bandwidth_cv_grouped(groups: &[Vec<Vec<f64>>], grid: &[f64], folds: usize, seed: Seed) -> Result<CvReport> {
    let g: Vec<(&[Vec<f64>], Vec<f64>)> = groups.iter().map(|c| (c.as_slice(), vec![0.0; c.len()])).collect();
    gaussian_cv(&g, grid, folds, seed)
}

/// Degrees of freedom for a Wishart-type KDE on PD(m). Scores are Riemannian
/// log densities; ties go to the smaller (smoother) `ν`.
pub fn dof_cv(kind: KernelKind, manifold: Manifold, points: &[ManifoldPoint], grid: &[f64], folds: usize, seed: Seed) -> Result<CvReport> {
    let m = match manifold {
        Manifold::Pd(m) => m,
        _ => return Err(Error::Unsupported("Wishart-type kernels live on PD(m)")),
    };
    if !matches!(kind, KernelKind::Wishart { .. } | KernelKind::InvWishart { .. }) {
        return Err(invalid("dof_cv needs a Wishart-type kernel"));
    }
    check_grid(grid)?;
    for &nu in grid {
        if matches!(kind, KernelKind::Wishart { .. }) && nu <= m as f64 - 1.0 {
            return Err(invalid(alloc::format!("Wishart dof {nu} must exceed {}", m as f64 - 1.0)));
        }
    }
    check_folds(points.len(), folds)?;
    let mut cache = Vec::with_capacity(points.len());
    let mut offset = Vec::with_capacity(points.len());
    for x in points {
        manifold.validate(x)?;
        let p = x.as_pd().ok_or_else(|| invalid("expected a PD point"))?;
        cache.push(PdCache::new(p.as_sym())?);
        offset.push(-pd_log_riemannian_density_wrt_entries(p)?);
    }
    let terms: Vec<WishartTerms> = grid.iter().map(|&nu| WishartTerms::new(kind.with_parameter(nu), m)).collect();
    let labels = assign_folds(&[points.len()], folds, seed).pop().expect("one group");

    let mut fold_scores = vec![vec![0.0; folds]; grid.len()];
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut buf = Vec::new();
    for f in 0..folds {
        let train: Vec<&PdCache> = cache.iter().zip(&labels).filter(|(_, &l)| l != f).map(|(c, _)| c).collect();
        let ln_n = (train.len() as f64).ln();
        let mut sums = vec![0.0; grid.len()];
        let mut count = 0usize;
        for (i, q) in cache.iter().enumerate().filter(|(i, _)| labels[*i] == f) {
            pairs.clear();
            pairs.extend(train.iter().map(|k| (k.trace_term(kind, q), k.log_det)));
            for (s, t) in sums.iter_mut().zip(&terms) {
                buf.clear();
                buf.extend(pairs.iter().map(|&(tr, ld)| t.eval(q.log_det, tr, ld)));
                *s += log_sum_exp(&buf) - ln_n + offset[i];
            }
            count += 1;
        }
        for (k, s) in sums.into_iter().enumerate() {
            fold_scores[k][f] = s / count as f64;
        }
    }
    report(grid, fold_scores, folds, seed, false)
}
