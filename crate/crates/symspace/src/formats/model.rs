//! Distribution and model files as JSON.
//!
//! A file is either a bare model object or `{"config": …, "model": …}`, where
//! `config` echoes the command that produced it. Models are tagged by
//! `type`: `log-gaussian` (tangent mean and covariance), `kde` (kernel name,
//! bandwidth or degrees of freedom, stored coordinates) or `mixture`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use symspace_core::distributions::LogGaussianParams;
use symspace_core::estimators::{CovarianceKind, KdeModel, KernelKind, MixtureModel};
use symspace_core::linalg::SymMatrix;
use symspace_core::manifolds::{Manifold, ManifoldPoint};
use symspace_core::metrics::ManifoldDensity;
use symspace_core::rng::Seed;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    LogGaussian {
        manifold: String,
        mu: Vec<f64>,
        sigma: Vec<Vec<f64>>,
    },
    Kde {
        manifold: String,
        kernel: String,
        parameter: f64,
        coords: Vec<Vec<f64>>,
    },
    Mixture {
        manifold: String,
        covariance: String,
        weights: Vec<f64>,
        means: Vec<Vec<f64>>,
        covariances: Vec<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
    pub model: ModelSpec,
}

impl ModelDoc {
    pub fn parse(text: &str) -> CliResult<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Doc(ModelDoc),
            Bare(ModelSpec),
        }
        match serde_json::from_str::<Either>(text) {
            Ok(Either::Doc(d)) => Ok(d),
            Ok(Either::Bare(model)) => Ok(ModelDoc { config: None, model }),
            Err(_) => {
                // Re-parse strictly for a useful message.
                let err = serde_json::from_str::<ModelSpec>(text).err().map_or_else(|| "unrecognized model".into(), |e| e.to_string());
                Err(CliError::data(format!("model file: {err}")))
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("models serialize");
        s.push('\n');
        s
    }
}

/// A model ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedModel {
    LogGaussian(LogGaussianParams),
    Kde(KdeModel),
    Mixture(MixtureModel),
}

fn parse_manifold(s: &str) -> CliResult<Manifold> {
    s.parse().map_err(|e| CliError::data(format!("model manifold: {e}")))
}

fn square(rows: &[Vec<f64>]) -> CliResult<SymMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::data("covariance must be a square array of rows"));
    }
    Ok(SymMatrix::from_row_major(n, rows.concat())?)
}

fn rows(s: &SymMatrix) -> Vec<Vec<f64>> {
    s.as_slice().chunks(s.order()).map(<[f64]>::to_vec).collect()
}

pub fn kernel_from_name(name: &str, parameter: f64) -> CliResult<KernelKind> {
    match name {
        "log-gaussian" => Ok(KernelKind::LogGaussian { bandwidth: parameter }),
        "euclidean-gaussian" => Ok(KernelKind::EuclideanGaussian { bandwidth: parameter }),
        "wishart" => Ok(KernelKind::Wishart { dof: parameter }),
        "inv-wishart" => Ok(KernelKind::InvWishart { dof: parameter }),
        other => Err(CliError::usage(format!(
            "unknown kernel `{other}` (expected log-gaussian, euclidean-gaussian, wishart or inv-wishart)"
        ))),
    }
}

fn covariance_name(kind: CovarianceKind) -> &'static str {
    match kind {
        CovarianceKind::Full => "full",
        CovarianceKind::Diagonal => "diagonal",
    }
}

pub fn covariance_from_name(name: &str) -> CliResult<CovarianceKind> {
    match name {
        "full" => Ok(CovarianceKind::Full),
        "diagonal" | "diag" => Ok(CovarianceKind::Diagonal),
        other => Err(CliError::usage(format!("unknown covariance kind `{other}` (expected full or diagonal)"))),
    }
}

impl LoadedModel {
    pub fn from_spec(spec: &ModelSpec) -> CliResult<Self> {
        Ok(match spec {
            ModelSpec::LogGaussian { manifold, mu, sigma } => {
                LoadedModel::LogGaussian(LogGaussianParams::new(parse_manifold(manifold)?, mu.clone(), square(sigma)?)?)
            }
            ModelSpec::Kde {
                manifold,
                kernel,
                parameter,
                coords,
            } => LoadedModel::Kde(KdeModel::from_coords(
                parse_manifold(manifold)?,
                kernel_from_name(kernel, *parameter).map_err(|e| CliError::data(e.to_string()))?,
                coords.clone(),
            )?),
            ModelSpec::Mixture {
                manifold,
                covariance,
                weights,
                means,
                covariances,
            } => {
                let covs = covariances.iter().map(|c| square(c)).collect::<CliResult<Vec<_>>>()?;
                LoadedModel::Mixture(MixtureModel::from_parts(
                    parse_manifold(manifold)?,
                    weights.clone(),
                    means.clone(),
                    covs,
                    covariance_from_name(covariance).map_err(|e| CliError::data(e.to_string()))?,
                )?)
            }
        })
    }

    pub fn to_spec(&self) -> ModelSpec {
        match self {
            LoadedModel::LogGaussian(p) => ModelSpec::LogGaussian {
                manifold: p.manifold().to_string(),
                mu: p.tangent().mu().to_vec(),
                sigma: rows(p.tangent().sigma()),
            },
            LoadedModel::Kde(k) => ModelSpec::Kde {
                manifold: k.manifold().to_string(),
                kernel: k.kind().name().to_string(),
                parameter: k.kind().parameter(),
                coords: k.coords().to_vec(),
            },
            LoadedModel::Mixture(m) => ModelSpec::Mixture {
                manifold: m.manifold().to_string(),
                covariance: covariance_name(m.covariance_kind()).to_string(),
                weights: m.weights().to_vec(),
                means: m.components().iter().map(|c| c.mu().to_vec()).collect(),
                covariances: m.components().iter().map(|c| rows(c.sigma())).collect(),
            },
        }
    }

    fn inner(&self) -> &dyn ManifoldDensity {
        match self {
            LoadedModel::LogGaussian(p) => p,
            LoadedModel::Kde(k) => k,
            LoadedModel::Mixture(m) => m,
        }
    }
}

impl ManifoldDensity for LoadedModel {
    fn manifold(&self) -> Manifold {
        self.inner().manifold()
    }

    fn log_density(&self, x: &ManifoldPoint) -> symspace_core::Result<f64> {
        self.inner().log_density(x)
    }

    fn sample(&self, n: usize, seed: Seed) -> Option<symspace_core::Result<Vec<ManifoldPoint>>> {
        self.inner().sample(n, seed)
    }
}
