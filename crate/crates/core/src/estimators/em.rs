use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{gather, log_sum_exp};
use crate::distributions::GaussianParams;
use crate::error::{invalid, Error, Result};
use crate::linalg::{sym_eig, SymMatrix};
use crate::manifolds::{Manifold, ManifoldPoint};
use crate::rng::{Seed, SymRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceKind {
    #[default]
    Full,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig {
    pub components: usize,
    pub max_iter: usize,
    /// Stop when the relative log-likelihood gain falls below this.
    pub tol: f64,
    /// Lower bound on every covariance eigenvalue.
    pub reg_floor: f64,
    pub covariance: CovarianceKind,
}

impl EmConfig {
    pub fn new(components: usize) -> Self {
        Self {
            components,
            max_iter: 500,
            tol: 1e-8,
            reg_floor: 1e-6,
            covariance: CovarianceKind::Full,
        }
    }
}

/// Gaussian mixture in tangent coordinates, pushed forward to the manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    manifold: Manifold,
    weights: Vec<f64>,
    components: Vec<GaussianParams>,
    covariance: CovarianceKind,
    /// Total training log-likelihood after each EM iteration (index 0: initial state).
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub reseeded: bool,
}

impl MixtureModel {
    /// Weights must lie on the simplex to within 1e-12.
    pub fn from_parts(
        manifold: Manifold,
        weights: Vec<f64>,
        means: Vec<Vec<f64>>,
        covariances: Vec<SymMatrix>,
        covariance: CovarianceKind,
    ) -> Result<Self> {
        let k = weights.len();
        if k == 0 || means.len() != k || covariances.len() != k {
            return Err(invalid("mixture needs matching, nonempty weights, means and covariances"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("mixture weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(alloc::format!("mixture weights sum to {total}, not 1")));
        }
        let d = manifold.dim();
        let components = means
            .into_iter()
            .zip(covariances)
            .map(|(mu, s)| {
                if mu.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: mu.len(),
                    });
                }
                GaussianParams::new(mu, s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            manifold,
            weights,
            components,
            covariance,
            trace: Vec::new(),
            iterations: 0,
            converged: true,
            reseeded: false,
        })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[GaussianParams] {
        &self.components
    }

    pub fn covariance_kind(&self) -> CovarianceKind {
        self.covariance
    }

    pub fn log_likelihood(&self) -> f64 {
        self.trace.last().copied().unwrap_or(f64::NAN)
    }

    /// `log Σⱼ ωⱼ N(v; μⱼ, Σⱼ)` in tangent coordinates.
    pub fn log_density_coords(&self, v: &[f64]) -> Result<f64> {
        let mut lp = Vec::with_capacity(self.k());
        for (w, c) in self.weights.iter().zip(&self.components) {
            lp.push(w.ln() + c.log_density(v)?);
        }
        Ok(log_sum_exp(&lp))
    }

    /// Riemannian log density `log J(x) + log Σⱼ ωⱼ N(log x; μⱼ, Σⱼ)`.
    pub fn log_density(&self, x: &ManifoldPoint) -> Result<f64> {
        let (v, log_j) = self.manifold.log_map_with_volume(x)?;
        Ok(self.log_density_coords(&v)? + log_j)
    }
}

fn mean_and_cov(x: &[Vec<f64>], resp: Option<&[f64]>) -> (f64, Vec<f64>, Vec<f64>) {
    let d = x[0].len();
    let w = |i: usize| resp.map_or(1.0, |r| r[i]);
    let total: f64 = (0..x.len()).map(w).sum();
    let mut mean = vec![0.0; d];
    for (i, row) in x.iter().enumerate() {
        let wi = w(i);
        for j in 0..d {
            mean[j] += wi * row[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= total);
    let mut cov = vec![0.0; d * d];
    for (i, row) in x.iter().enumerate() {
        let wi = w(i);
        for a in 0..d {
            let da = row[a] - mean[a];
            for b in 0..=a {
                cov[a * d + b] += wi * da * (row[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in 0..=a {
            let v = cov[a * d + b] / total;
            cov[a * d + b] = v;
            cov[b * d + a] = v;
        }
    }
    (total, mean, cov)
}

/// Projects a scatter matrix onto `{Σ : λ_min(Σ) ≥ floor}` (the constrained
/// maximizer of the Gaussian likelihood). Untouched when already feasible.
fn floor_covariance(d: usize, cov: Vec<f64>, floor: f64, kind: CovarianceKind) -> Result<SymMatrix> {
    match kind {
        CovarianceKind::Diagonal => {
            let diag: Vec<f64> = (0..d).map(|i| cov[i * d + i].max(floor)).collect();
            Ok(SymMatrix::diagonal(&diag))
        }
        CovarianceKind::Full => {
            let s = SymMatrix::from_row_major(d, cov)?;
            let eig = sym_eig(&s)?;
            if eig.eigenvalues.iter().all(|&l| l >= floor) {
                return Ok(s);
            }
            Ok(eig.map(|l| l.max(floor)))
        }
    }
}

/// k-means++ seeding: first centre uniform, then proportional to squared
/// distance to the nearest chosen centre.
fn kmeans_pp(x: &[Vec<f64>], k: usize, rng: &mut SymRng) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut centres = vec![x[rng.below(n)].clone()];
    let mut d2: Vec<f64> = x.iter().map(|r| crate::linalg::dist2_sq(r, &centres[0])).collect();
    while centres.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.uniform() * total;
            let mut idx = n - 1;
            for (i, v) in d2.iter().enumerate() {
                if u < *v {
                    idx = i;
                    break;
                }
                u -= v;
            }
            idx
        } else {
            rng.below(n)
        };
        let c = x[pick].clone();
        for (r, v) in x.iter().zip(d2.iter_mut()) {
            *v = v.min(crate::linalg::dist2_sq(r, &c));
        }
        centres.push(c);
    }
    centres
}

/// E-step: per-point log-likelihoods and responsibilities (row-major n × K).
fn e_step(x: &[Vec<f64>], weights: &[f64], comps: &[GaussianParams], resp: &mut [f64], ll: &mut [f64]) -> Result<f64> {
    let k = weights.len();
    let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    let mut total = 0.0;
    for (i, row) in x.iter().enumerate() {
        let r = &mut resp[i * k..(i + 1) * k];
        for j in 0..k {
            r[j] = log_w[j] + comps[j].log_density(row)?;
        }
        let l = log_sum_exp(r);
        r.iter_mut().for_each(|v| *v = (*v - l).exp());
        ll[i] = l;
        total += l;
    }
    Ok(total)
}

/// Gaussian-mixture EM in tangent coordinates.
pub fn em_fit(manifold: Manifold, coords: &[Vec<f64>], cfg: &EmConfig, seed: Seed) -> Result<MixtureModel> {
    let n = coords.len();
    let k = cfg.components;
    if k == 0 {
        return Err(invalid("mixture needs at least one component"));
    }
    if k > n {
        return Err(invalid(alloc::format!("{k} components need at least {k} points, got {n}")));
    }
    if !(cfg.reg_floor > 0.0) || !(cfg.tol >= 0.0) {
        return Err(invalid("reg_floor must be positive and tol nonnegative"));
    }
    let d = manifold.dim();
    for row in coords {
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

    let mut rng = SymRng::new(seed);
    let (_, _, global) = mean_and_cov(coords, None);
    let global = floor_covariance(d, global, cfg.reg_floor, cfg.covariance)?;
    let mut weights = vec![1.0 / k as f64; k];
    let mut comps = kmeans_pp(coords, k, &mut rng)
        .into_iter()
        .map(|mu| GaussianParams::new(mu, global.clone()))
        .collect::<Result<Vec<_>>>()?;

    let mut resp = vec![0.0; n * k];
    let mut point_ll = vec![0.0; n];
    let mut trace = vec![e_step(coords, &weights, &comps, &mut resp, &mut point_ll)?];
    let mut reseeded = false;
    let mut converged = false;
    let mut iterations = 0;
    let min_mass = 0.1; // weight 1/(10n)

    while iterations < cfg.max_iter {
        iterations += 1;
        let mut next = Vec::with_capacity(k);
        let mut next_weights = vec![0.0; k];
        let mut empty = None;
        for j in 0..k {
            let r: Vec<f64> = (0..n).map(|i| resp[i * k + j]).collect();
            let (mass, mu, cov) = mean_and_cov(coords, Some(&r));
            if !(mass >= min_mass) {
                empty = Some(j);
                break;
            }
            next_weights[j] = mass / n as f64;
            next.push(GaussianParams::new(mu, floor_covariance(d, cov, cfg.reg_floor, cfg.covariance)?)?);
        }
        if let Some(j) = empty {
            if reseeded {
                return Err(Error::EmptyComponent { component: j });
            }
            reseeded = true;
            // Restart the starved component at the worst-explained point.
            let worst = (0..n).min_by(|&a, &b| point_ll[a].total_cmp(&point_ll[b])).expect("n >= 1");
            comps[j] = GaussianParams::new(coords[worst].clone(), global.clone())?;
            weights.iter_mut().for_each(|w| *w *= 1.0 - 1.0 / k as f64);
            weights[j] = 1.0 / k as f64;
        } else {
            let total: f64 = next_weights.iter().sum();
            weights = next_weights.into_iter().map(|w| w / total).collect();
            comps = next;
        }
        let ll = e_step(coords, &weights, &comps, &mut resp, &mut point_ll)?;
        let prev = *trace.last().expect("initial entry");
        trace.push(ll);
        if empty.is_some() {
            // Re-seeding moves away from the current optimum; skip the checks once.
            continue;
        }
        debug_assert!(
            ll >= prev - 1e-10 * (1.0 + prev.abs()),
            "EM log-likelihood decreased: {prev} -> {ll}"
        );
        if ll - prev < cfg.tol * prev.abs() {
            converged = true;
            break;
        }
    }

    Ok(MixtureModel {
        manifold,
        weights,
        components: comps,
        covariance: cfg.covariance,
        trace,
        iterations,
        converged,
        reseeded,
    })
}

/// Chosen component count with the mean held-out log-likelihood of each `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub k: usize,
    /// `scores[K − 1]`; `−∞` when fitting failed on some fold.
    pub scores: Vec<f64>,
}

/// `K ∈ 1..=k_max` maximizing mean held-out log-likelihood over `folds`
/// folds; ties go to the smaller `K`.
pub fn model_select_k(
    manifold: Manifold,
    coords: &[Vec<f64>],
    k_max: usize,
    folds: usize,
    base: &EmConfig,
    seed: Seed,
) -> Result<KSelection> {
    if k_max == 0 {
        return Err(invalid("k_max must be at least 1"));
    }
    if k_max == 1 {
        return Ok(KSelection {
            k: 1,
            scores: vec![f64::NAN],
        });
    }
    let n = coords.len();
    if folds < 2 || n < 2 * folds {
        return Err(invalid(alloc::format!("{n} points cannot fill {folds} folds")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    SymRng::new(seed).shuffle(&mut perm);
    let mut labels = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        labels[i] = pos % folds;
    }
    let mut scores = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut total = 0.0;
        for f in 0..folds {
            let train: Vec<usize> = (0..n).filter(|&i| labels[i] != f).collect();
            let test: Vec<usize> = (0..n).filter(|&i| labels[i] == f).collect();
            let cfg = EmConfig { components: k, ..*base };
            let fold_seed = seed.derive((k * folds + f) as u64);
            let fit = em_fit(manifold, &gather(coords, &train), &cfg, fold_seed);
            let Ok(model) = fit else {
                total = f64::NEG_INFINITY;
                break;
            };
            let mut s = 0.0;
            for &i in &test {
                s += model.log_density_coords(&coords[i])?;
            }
            total += s / test.len() as f64;
        }
        scores.push(total / folds as f64);
    }
    let mut best = 0;
    for i in 1..k_max {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Ok(KSelection { k: best + 1, scores })
}
