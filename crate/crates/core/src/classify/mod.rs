//! Density-based classifiers on manifold-valued data.
//!
//! | kind | features | class-conditional density |
//! |------|----------|---------------------------|
//! | GNB  | `Vec(X)` | product of 1-d Gaussians |
//! | GKC  | `Vec(X)` | Gaussian KDE, bandwidth `h` |
//! | LGNB | `log X`  | product of 1-d Gaussians |
//! | LGKC | `log X`  | Gaussian KDE, bandwidth `h` |
//!
//! `Vec` is the orthonormal symmetric vectorization and `log` the manifold
//! logarithm at `e`. Posteriors are `p(y=k)·p(x|y=k)` normalized in log space.


use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::estimators::{bandwidth_cv_grouped, default_bandwidth_grid, log_sum_exp, DEFAULT_FOLDS};
use crate::manifolds::{Manifold, ManifoldPoint};
use crate::rng::{Seed, SymRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    Gnb,
    Gkc,
    Lgnb,
    Lgkc,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [ClassifierKind::Gnb, ClassifierKind::Gkc, ClassifierKind::Lgnb, ClassifierKind::Lgkc];

    pub fn is_kernel(self) -> bool {
        matches!(self, ClassifierKind::Gkc | ClassifierKind::Lgkc)
    }

    pub fn uses_log(self) -> bool {
        matches!(self, ClassifierKind::Lgnb | ClassifierKind::Lgkc)
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::Gnb => "gnb",
            ClassifierKind::Gkc => "gkc",
            ClassifierKind::Lgnb => "lgnb",
            ClassifierKind::Lgkc => "lgkc",
        })
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gnb" => Ok(ClassifierKind::Gnb),
            "gkc" => Ok(ClassifierKind::Gkc),
            "lgnb" => Ok(ClassifierKind::Lgnb),
            "lgkc" => Ok(ClassifierKind::Lgkc),
            _ => Err(invalid(format!("unknown classifier '{s}' (expected gnb, gkc, lgnb or lgkc)"))),
        }
    }
}

/// Points with labels in `1..=classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    manifold: Manifold,
    points: Vec<ManifoldPoint>,
    labels: Vec<usize>,
    classes: usize,
}

impl LabeledDataset {
    /// The class count is the largest label.
    pub fn new(manifold: Manifold, points: Vec<ManifoldPoint>, labels: Vec<usize>) -> Result<Self> {
        let classes = labels.iter().copied().max().unwrap_or(0);
        Self::with_classes(manifold, points, labels, classes)
    }

    /// Allows classes that are absent from this particular sample, as in a test split.
    pub fn with_classes(manifold: Manifold, points: Vec<ManifoldPoint>, labels: Vec<usize>, classes: usize) -> Result<Self> {
        let manifold = manifold.new_checked()?;
        if points.is_empty() {
            return Err(invalid("dataset is empty"));
        }
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: labels.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|&&l| l == 0 || l > classes) {
            return Err(invalid(format!("label {bad} outside 1..={classes}")));
        }
        for p in &points {
            manifold.validate(p)?;
        }
        Ok(Self {
            manifold,
            points,
            labels,
            classes,
        })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn points(&self) -> &[ManifoldPoint] {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Indices of each class, `result[k]` for label `k + 1`.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l - 1].push(i);
        }
        out
    }

    fn subset(&self, idx: &[usize]) -> Result<Self> {
        Self::with_classes(
            self.manifold,
            idx.iter().map(|&i| self.points[i].clone()).collect(),
            idx.iter().map(|&i| self.labels[i]).collect(),
            self.classes,
        )
    }
}

/// Stratified split: within each class a seeded shuffle puts
/// `round(fraction·n_k)` points in the training part. Both parts keep the
/// original order.
pub fn split(data: &LabeledDataset, fraction: f64, seed: Seed) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(invalid("split fraction must lie in (0, 1)"));
    }
    let mut rng = SymRng::new(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (k, mut idx) in data.class_indices().into_iter().enumerate() {
        if idx.is_empty() {
            continue;
        }
        let n_train = (fraction * idx.len() as f64).round() as usize;
        if n_train == 0 || n_train == idx.len() {
            return Err(invalid(format!("class {} with {} points cannot be split at {fraction}", k + 1, idx.len())));
        }
        rng.shuffle(&mut idx);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.subset(&train)?, data.subset(&test)?))
}

#[derive(Debug, Clone, PartialEq)]
enum ClassModel {
    /// Per-class means and variances of each feature.
    NaiveBayes { means: Vec<Vec<f64>>, vars: Vec<Vec<f64>> },
    /// Per-class training features.
    Kernel { features: Vec<Vec<Vec<f64>>>, bandwidth: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    kind: ClassifierKind,
    manifold: Manifold,
    priors: Vec<f64>,
    model: ClassModel,
}

fn features(kind: ClassifierKind, manifold: Manifold, x: &ManifoldPoint) -> Result<Vec<f64>> {
    if kind.uses_log() {
        manifold.log_map(x).map(|v| v.into_vec())
    } else {
        manifold.chart_coords(x)
    }
}

impl ClassifierModel {
    /// Kernel kinds pick `h` by grouped cross-validation on `data` when
    /// `bandwidth` is `None`.
    pub fn fit(kind: ClassifierKind, data: &LabeledDataset, bandwidth: Option<f64>, seed: Seed) -> Result<Self> {
        let manifold = data.manifold;
        let groups: Vec<Vec<Vec<f64>>> = data
            .class_indices()
            .iter()
            .map(|idx| idx.iter().map(|&i| features(kind, manifold, &data.points[i])).collect())
            .collect::<Result<_>>()?;
        if let Some(k) = groups.iter().position(|g| g.is_empty()) {
            return Err(invalid(format!("class {} has no training points", k + 1)));
        }
        let n = data.len() as f64;
        let priors = groups.iter().map(|g| g.len() as f64 / n).collect();

        let model = if kind.is_kernel() {
            let bandwidth = match bandwidth {
                Some(h) if h.is_finite() && h > 0.0 => h,
                Some(h) => return Err(invalid(format!("bandwidth must be positive, got {h}"))),
                None => {
                    let all: Vec<Vec<f64>> = groups.iter().flatten().cloned().collect();
                    let grid = default_bandwidth_grid(&all);
                    bandwidth_cv_grouped(&groups, &grid, DEFAULT_FOLDS, seed)?.selected
                }
            };
            ClassModel::Kernel {
                features: groups,
                bandwidth,
            }
        } else {
            naive_bayes(&groups)?
        };
        Ok(Self {
            kind,
            manifold,
            priors,
            model,
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn classes(&self) -> usize {
        self.priors.len()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// The kernel bandwidth, for kernel kinds.
    pub fn bandwidth(&self) -> Option<f64> {
        match self.model {
            ClassModel::Kernel { bandwidth, .. } => Some(bandwidth),
            ClassModel::NaiveBayes { .. } => None,
        }
    }

    /// `log p(y=k) + log p(x | y=k)` in feature coordinates.
    fn log_joint_features(&self, f: &[f64]) -> Vec<f64> {
        match &self.model {
            ClassModel::NaiveBayes { means, vars } => means
                .iter()
                .zip(vars)
                .zip(&self.priors)
                .map(|((mu, var), p)| {
                    let ll: f64 = f
                        .iter()
                        .zip(mu)
                        .zip(var)
                        .map(|((x, m), v)| -0.5 * ((2.0 * PI * v).ln() + (x - m) * (x - m) / v))
                        .sum();
                    p.ln() + ll
                })
                .collect(),
            ClassModel::Kernel { features, bandwidth } => features
                .iter()
                .zip(&self.priors)
                .map(|(c, p)| p.ln() + crate::estimators::gaussian_kde_log(c, f, *bandwidth))
                .collect(),
        }
    }

    /// Per-class `log p(y=k) + log p(x | y=k)`. For the log kinds the density is
    /// Riemannian (it carries `log J(x)`), which shifts every class equally.
    pub fn log_joint(&self, x: &ManifoldPoint) -> Result<Vec<f64>> {
        if self.kind.uses_log() {
            let (v, log_j) = self.manifold.log_map_with_volume(x)?;
            Ok(self.log_joint_features(&v).into_iter().map(|l| l + log_j).collect())
        } else {
            Ok(self.log_joint_features(&self.manifold.chart_coords(x)?))
        }
    }

    pub fn predict_posteriors(&self, x: &ManifoldPoint) -> Result<Vec<f64>> {
        Ok(normalize(&self.log_joint(x)?))
    }

    /// Label in `1..=L`; ties go to the smallest label.
    pub fn predict(&self, x: &ManifoldPoint) -> Result<usize> {
        Ok(argmax(&self.predict_posteriors(x)?) + 1)
    }
}

fn naive_bayes(groups: &[Vec<Vec<f64>>]) -> Result<ClassModel> {
    let d = groups[0][0].len();
    if let Some(k) = groups.iter().position(|g| g.len() < 2) {
        return Err(invalid(format!("naive Bayes needs at least 2 points in class {}", k + 1)));
    }
    let all: Vec<&Vec<f64>> = groups.iter().flatten().collect();
    let (_, pooled) = moments(&all, d);
    let floor: Vec<f64> = pooled.iter().map(|v| 1e-9 * (v + 1.0)).collect();
    let mut means = Vec::with_capacity(groups.len());
    let mut vars = Vec::with_capacity(groups.len());
    for g in groups {
        let rows: Vec<&Vec<f64>> = g.iter().collect();
        let (m, v) = moments(&rows, d);
        means.push(m);
        vars.push(v.iter().zip(&floor).map(|(v, f)| v.max(*f)).collect());
    }
    Ok(ClassModel::NaiveBayes { means, vars })
}

/// Per-feature mean and `1/n` variance.
fn moments(rows: &[&Vec<f64>], d: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; d];
    for r in rows {
        for j in 0..d {
            mean[j] += r[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for r in rows {
        for j in 0..d {
            var[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    (mean, var)
}

fn normalize(log_joint: &[f64]) -> Vec<f64> {
    let z = log_sum_exp(log_joint);
    log_joint.iter().map(|l| (l - z).exp()).collect()
}

/// Index of the largest value, first one on ties.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// `(1/n) Σᵢ Σₖ (pᵢₖ − 1{yᵢ = k})²` with labels in `1..=L`.
pub fn brier_score(posteriors: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if posteriors.is_empty() || posteriors.len() != labels.len() {
        return Err(invalid("Brier score needs one label per posterior vector"));
    }
    let mut total = 0.0;
    for (p, &y) in posteriors.iter().zip(labels) {
        if y == 0 || y > p.len() {
            return Err(invalid(format!("label {y} outside 1..={}", p.len())));
        }
        total += p
            .iter()
            .enumerate()
            .map(|(k, pk)| {
                let t = if k + 1 == y { 1.0 } else { 0.0 };
                (pk - t) * (pk - t)
            })
            .sum::<f64>();
    }
    Ok(total / posteriors.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub brier: f64,
    /// `confusion[true − 1][predicted − 1]`.
    pub confusion: Vec<Vec<usize>>,
    pub n: usize,
    pub posteriors: Option<Vec<Vec<f64>>>,
}

/// Scores the model on `test`; keeps the posterior vectors when asked.
pub fn evaluate(model: &ClassifierModel, test: &LabeledDataset, keep_posteriors: bool) -> Result<EvalReport> {
    let l = model.classes();
    if test.is_empty() {
        return Err(invalid("test set is empty"));
    }
    if test.manifold() != model.manifold() {
        return Err(invalid("test set lives on a different manifold"));
    }
    if let Some(bad) = test.labels().iter().find(|&&y| y > l) {
        return Err(invalid(format!("test label {bad} outside 1..={l}")));
    }
    let posts = test
        .points()
        .iter()
        .map(|x| model.predict_posteriors(x))
        .collect::<Result<Vec<_>>>()?;
    let mut confusion = vec![vec![0usize; l]; l];
    for (p, &y) in posts.iter().zip(test.labels()) {
        confusion[y - 1][argmax(p)] += 1;
    }
    let correct: usize = (0..l).map(|k| confusion[k][k]).sum();
    Ok(EvalReport {
        accuracy: correct as f64 / test.len() as f64,
        brier: brier_score(&posts, test.labels())?,
        confusion,
        n: test.len(),
        posteriors: keep_posteriors.then_some(posts),
    })
}
