//! Simulation study on PD(2): draw data from one family, split it evenly,
//! and score four density estimators by held-out log-likelihood.
//!
//! Scores are summed test-set log densities with respect to Lebesgue
//! measure on the matrix entries, so they are comparable across methods and
//! across sweep values.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use symspace_core::distributions::{InvWishartParams, LogGaussianParams, WishartParams};
use symspace_core::estimators::{
    bandwidth_cv, default_bandwidth_grid, default_dof_grid, dof_cv, em_fit, model_select_k, EmConfig, KdeModel,
    KernelKind,
};
use symspace_core::linalg::{PdMatrix, SymMatrix};
use symspace_core::manifolds::{pd_log_riemannian_density_wrt_entries, Manifold, ManifoldPoint};
use symspace_core::metrics::ManifoldDensity;
use symspace_core::rng::{Seed, SymRng};

use crate::error::{CliError, CliResult};
use crate::formats::format_f64;

pub const METHODS: [&str; 4] = ["wishart-kde", "inv-wishart-kde", "log-gaussian-kde", "log-gaussian-mixture"];

pub const CSV_HEADER: &str = "family,value,method,mean,sd,replicates";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Wishart,
    InvWishart,
    LogGaussian,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Wishart => "wishart",
            Family::InvWishart => "inv-wishart",
            Family::LogGaussian => "log-gaussian",
        }
    }

    /// `ν ∈ {2..10}`, `ν ∈ {4..10}` and `σ² ∈ {e⁻³..e³}` respectively.
    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            Family::Wishart => (2..=10).map(f64::from).collect(),
            Family::InvWishart => (4..=10).map(f64::from).collect(),
            Family::LogGaussian => (-3..=3).map(|k| f64::from(k).exp()).collect(),
        }
    }

    fn check(self, value: f64) -> CliResult<()> {
        let ok = match self {
            Family::Wishart => value > 1.0,
            Family::InvWishart => value > 1.0,
            Family::LogGaussian => value > 0.0,
        };
        if !(ok && value.is_finite()) {
            return Err(CliError::usage(format!("sweep value {value} is invalid for the {} family", self.name())));
        }
        Ok(())
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wishart" => Ok(Family::Wishart),
            "invwishart" | "inv-wishart" => Ok(Family::InvWishart),
            "loggaussian" | "log-gaussian" | "lg" => Ok(Family::LogGaussian),
            _ => Err(CliError::usage(format!("unknown family `{s}` (expected wishart, invwishart or loggaussian)"))),
        }
    }
}

/// Scale matrix of the inverse-Wishart generator.
pub fn inv_wishart_scale() -> PdMatrix {
    PdMatrix::from_row_major(2, vec![100.0, 30.0, 30.0, 10.0]).expect("positive definite")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub family: Family,
    pub sweep: Vec<f64>,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub folds: usize,
    /// Largest mixture size tried by cross-validation.
    pub k_max: usize,
}

impl SimConfig {
    pub fn new(family: Family, seed: u64) -> Self {
        Self {
            family,
            sweep: family.default_sweep(),
            n: 2000,
            replicates: 10,
            seed,
            folds: 5,
            k_max: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimConfig,
    /// `scores[s][r][method]`: summed test log-likelihood.
    pub scores: Vec<Vec<[f64; 4]>>,
}

impl SimulationReport {
    pub fn mean(&self, sweep_index: usize, method: usize) -> f64 {
        let reps = &self.scores[sweep_index];
        reps.iter().map(|r| r[method]).sum::<f64>() / reps.len() as f64
    }

    /// Sample standard deviation over replicates (zero for one replicate).
    pub fn sd(&self, sweep_index: usize, method: usize) -> f64 {
        let reps = &self.scores[sweep_index];
        if reps.len() < 2 {
            return 0.0;
        }
        let m = self.mean(sweep_index, method);
        (reps.iter().map(|r| (r[method] - m).powi(2)).sum::<f64>() / (reps.len() - 1) as f64).sqrt()
    }

    pub fn to_csv(&self, echo: &str) -> String {
        let mut out = format!("# {echo}\n{CSV_HEADER}\n");
        for (s, v) in self.config.sweep.iter().enumerate() {
            for (k, name) in METHODS.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{name},{},{},{}",
                    self.config.family.name(),
                    format_f64(*v),
                    format_f64(self.mean(s, k)),
                    format_f64(self.sd(s, k)),
                    self.scores[s].len()
                );
            }
        }
        out
    }
}

fn generate(family: Family, value: f64, n: usize, rng: &mut SymRng) -> CliResult<Vec<ManifoldPoint>> {
    Ok(match family {
        Family::Wishart => {
            let w = WishartParams::new(PdMatrix::identity(2), value)?;
            (0..n).map(|_| ManifoldPoint::Pd(w.draw(rng))).collect()
        }
        Family::InvWishart => {
            let w = InvWishartParams::new(inv_wishart_scale(), value)?;
            (0..n).map(|_| ManifoldPoint::Pd(w.draw(rng))).collect()
        }
        Family::LogGaussian => {
            let lg = LogGaussianParams::new(Manifold::Pd(2), vec![0.0; 3], SymMatrix::identity(3).scale(value))?;
            lg.sample_with(n, rng)?.points
        }
    })
}

fn test_score(model: &dyn ManifoldDensity, test: &[ManifoldPoint]) -> CliResult<f64> {
    let mut total = 0.0;
    for x in test {
        let p = x.as_pd().expect("PD data");
        total += model.log_density(x)? + pd_log_riemannian_density_wrt_entries(p)?;
    }
    Ok(total)
}

/// One replicate at one sweep value: the four scores in [`METHODS`] order.
pub fn replicate(cfg: &SimConfig, value: f64, r: usize) -> CliResult<[f64; 4]> {
    let m = Manifold::Pd(2);
    let base = Seed(cfg.seed.wrapping_add(r as u64));
    let mut rng = SymRng::new(base);
    let data = generate(cfg.family, value, cfg.n, &mut rng)?;
    let (train, test) = data.split_at(cfg.n / 2);

    let mut scores = [0.0; 4];
    for (k, kind) in [KernelKind::Wishart { dof: 1.0 }, KernelKind::InvWishart { dof: 1.0 }].into_iter().enumerate() {
        let cv = dof_cv(kind, m, train, &default_dof_grid(kind, 2), cfg.folds, base.derive(k as u64))?;
        let kde = KdeModel::fit(m, train, kind.with_parameter(cv.selected))?;
        scores[k] = test_score(&kde, test)?;
    }

    let coords: Vec<Vec<f64>> = train.iter().map(|x| m.log_map(x).map(|v| v.into_vec())).collect::<Result<_, _>>()?;
    let cv = bandwidth_cv(m, train, &default_bandwidth_grid(&coords), cfg.folds, base.derive(2))?;
    let kde = KdeModel::fit(m, train, KernelKind::LogGaussian { bandwidth: cv.selected })?;
    scores[2] = test_score(&kde, test)?;

    let pick = model_select_k(m, &coords, cfg.k_max, cfg.folds, &EmConfig::new(1), base.derive(3))?;
    let mix = em_fit(m, &coords, &EmConfig::new(pick.k), base.derive(4))?;
    scores[3] = test_score(&mix, test)?;
    Ok(scores)
}

/// Runs every (sweep value, replicate) pair on `pool`; results are ordered by
/// index, so they do not depend on scheduling.
pub fn run(cfg: &SimConfig, pool: &rayon::ThreadPool) -> CliResult<SimulationReport> {
    if cfg.n < 4 * cfg.folds || cfg.replicates == 0 || cfg.sweep.is_empty() || cfg.k_max == 0 {
        return Err(CliError::usage(format!(
            "simulation needs n >= {}, at least one replicate, a nonempty sweep and k_max >= 1",
            4 * cfg.folds
        )));
    }
    for &v in &cfg.sweep {
        cfg.family.check(v)?;
    }
    let jobs: Vec<(usize, usize)> = (0..cfg.sweep.len()).flat_map(|s| (0..cfg.replicates).map(move |r| (s, r))).collect();
    let flat: Vec<[f64; 4]> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, r)| replicate(cfg, cfg.sweep[s], r))
            .collect::<CliResult<Vec<_>>>()
    })?;
    let scores = flat.chunks(cfg.replicates).map(<[[f64; 4]]>::to_vec).collect();
    Ok(SimulationReport {
        config: cfg.clone(),
        scores,
    })
}
