use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

use symspace_core::classify::{evaluate, split, ClassifierKind, ClassifierModel, LabeledDataset};
use symspace_core::descriptors::{covariance_descriptor, DescriptorConfig};
use symspace_core::estimators::{
    bandwidth_cv, default_bandwidth_grid, default_dof_grid, dof_cv, em_fit, log_grid, model_select_k, CvReport, EmConfig,
    KdeModel,
};
use symspace_core::manifolds::{Manifold, ManifoldPoint};
use symspace_core::metrics::{
    hellinger_sq, kl_divergence, lp_distance_quadrature, wasserstein_empirical, ManifoldDensity, PolarGrid, TransportCost,
};
use symspace_core::rng::Seed;

use super::{
    parse_manifold, ClassifyArgs, CostKind, DensityArgs, DescriptorArgs, EmArgs, Format, KdeArgs, MetricArgs, MetricKind,
    SampleArgs, SimulateArgs, VerifyArgs, THREADS_ENV,
};
use crate::error::{CliError, CliResult};
use crate::formats::{covariance_from_name, format_f64, kernel_from_name, parse_pgm, read_dataset, write_dataset, Dataset, LoadedModel, ModelDoc};
use crate::simulate::{self, Family, SimConfig, METHODS};
use crate::verify::run_verify;

/// Ordered configuration echo. Renders as `symspace <cmd> k=v …` for CSV
/// comments and as a JSON object; values never include file paths.
struct Echo {
    command: &'static str,
    fields: Vec<(&'static str, Value)>,
}

impl Echo {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            fields: Vec::new(),
        }
    }

    fn with(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.fields.push((key, value.into()));
        self
    }

    fn line(&self) -> String {
        let mut s = format!("symspace {}", self.command);
        for (k, v) in &self.fields {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Number(_) => v.as_f64().map_or_else(|| v.to_string(), format_f64),
                Value::Array(xs) if xs.iter().all(Value::is_number) => {
                    xs.iter().filter_map(Value::as_f64).map(format_f64).collect::<Vec<_>>().join(",")
                }
                other => other.to_string(),
            };
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.into());
        for (k, v) in &self.fields {
            m.insert((*k).into(), v.clone());
        }
        Value::Object(m)
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_output(out: Option<&Path>, content: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content)
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn load_model(path: &Path) -> CliResult<LoadedModel> {
    LoadedModel::from_spec(&ModelDoc::parse(&read_text(path)?)?.model)
}

fn load_dataset(path: &Path, manifold: Option<Manifold>) -> CliResult<Dataset> {
    read_dataset(&read_text(path)?, manifold)
}

fn optional_manifold(s: &Option<String>) -> CliResult<Option<Manifold>> {
    s.as_deref().map(parse_manifold).transpose()
}

/// `lo:hi:n` (log-spaced, inclusive) or a comma-separated list.
fn parse_grid(s: &str, flag: &str) -> CliResult<Vec<f64>> {
    let bad = |why: String| CliError::usage(format!("{flag}: {why}"));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad(format!("`{}` is not a number", parts[0])))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad(format!("`{}` is not a number", parts[1])))?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad(format!("`{}` is not a count", parts[2])))?;
        log_grid(lo, hi, n).map_err(|e| bad(e.to_string()))?
    } else if parts.len() == 1 {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("`{t}` is not a number"))))
            .collect::<CliResult<Vec<_>>>()?
    } else {
        return Err(bad("expected lo:hi:n or a comma-separated list".into()));
    };
    if grid.is_empty() || grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(bad("values must be positive and finite".into()));
    }
    Ok(grid)
}

fn cv_json(cv: &CvReport) -> Value {
    json!({
        "candidates": cv.candidates,
        "mean_scores": cv.mean_scores,
        "selected": cv.selected,
        "folds": cv.folds,
    })
}

/// Rayon pool sized by `SYMSPACE_THREADS`, or the available parallelism.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(CliError::usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {threads} threads: {e}")))
}

pub fn sample(a: SampleArgs) -> CliResult<()> {
    let model = load_model(&a.params)?;
    let manifold = model.manifold();
    if let Some(expected) = optional_manifold(&a.manifold)? {
        if expected != manifold {
            return Err(CliError::data(format!("parameters live on {manifold}, not {expected}")));
        }
    }
    let points = if a.n == 0 {
        Vec::new()
    } else {
        model
            .sample(a.n, Seed(a.common.seed))
            .ok_or_else(|| CliError::data("this model has no sampler"))??
    };
    let echo = Echo::new("sample")
        .with("manifold", manifold.to_string())
        .with("n", a.n)
        .with("seed", a.common.seed);
    let labels = vec![1; points.len()];
    write_output(a.common.out.as_deref(), write_dataset(&echo.line(), manifold, &points, &labels).as_bytes())
}

pub fn density(a: DensityArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let manifold = match optional_manifold(&a.manifold)? {
        Some(m) => m,
        None => model.manifold(),
    };
    let data = load_dataset(&a.input, Some(manifold))?;
    if data.manifold != model.manifold() {
        return Err(CliError::data(format!("points live on {}, the model on {}", data.manifold, model.manifold())));
    }
    let values = data.points.iter().map(|x| model.log_density(x)).collect::<symspace_core::Result<Vec<f64>>>()?;
    let echo = Echo::new("density")
        .with("manifold", manifold.to_string())
        .with("n", values.len())
        .with("seed", a.common.seed);
    let text = match a.format {
        Format::Csv => {
            let mut s = format!("# {}\nindex,label,log_density\n", echo.line());
            for (i, (v, l)) in values.iter().zip(&data.labels).enumerate() {
                s.push_str(&format!("{i},{l},{}\n", format_f64(*v)));
            }
            s
        }
        Format::Json => json_text(&json!({"config": echo.json(), "log_density": values})),
    };
    write_output(a.common.out.as_deref(), text.as_bytes())
}

pub fn kde(a: KdeArgs) -> CliResult<()> {
    let data = load_dataset(&a.input, optional_manifold(&a.manifold)?)?;
    let manifold = data.manifold;
    let kind = kernel_from_name(&a.kernel, 1.0)?;
    let wishart = matches!(a.kernel.as_str(), "wishart" | "inv-wishart");
    let (fixed, grid_flag) = if wishart {
        if a.h.is_some() || a.h_grid.is_some() {
            return Err(CliError::usage("Wishart-type kernels take --dof/--dof-grid, not --h/--h-grid"));
        }
        (a.dof, a.dof_grid.as_deref().map(|g| parse_grid(g, "--dof-grid")).transpose()?)
    } else {
        if a.dof.is_some() || a.dof_grid.is_some() {
            return Err(CliError::usage("Gaussian kernels take --h/--h-grid, not --dof/--dof-grid"));
        }
        (a.h, a.h_grid.as_deref().map(|g| parse_grid(g, "--h-grid")).transpose()?)
    };
    if fixed.is_some() && grid_flag.is_some() {
        return Err(CliError::usage("give either a fixed parameter or a grid, not both"));
    }
    let seed = Seed(a.common.seed);
    let mut echo = Echo::new("kde")
        .with("manifold", manifold.to_string())
        .with("kernel", a.kernel.clone())
        .with("n", data.points.len())
        .with("seed", a.common.seed);
    let parameter = match fixed {
        Some(p) => p,
        None => {
            let cv = if wishart {
                let grid = grid_flag.unwrap_or_else(|| default_dof_grid(kind, manifold.size()));
                dof_cv(kind, manifold, &data.points, &grid, a.folds, seed)?
            } else if matches!(a.kernel.as_str(), "log-gaussian") {
                let grid = match grid_flag {
                    Some(g) => g,
                    None => {
                        let coords = log_coords(manifold, &data.points)?;
                        default_bandwidth_grid(&coords)
                    }
                };
                bandwidth_cv(manifold, &data.points, &grid, a.folds, seed)?
            } else {
                let coords = data.points.iter().map(|x| manifold.chart_coords(x)).collect::<symspace_core::Result<Vec<_>>>()?;
                let grid = grid_flag.unwrap_or_else(|| default_bandwidth_grid(&coords));
                symspace_core::estimators::bandwidth_cv_coords(&coords, &grid, a.folds, seed)?
            };
            echo = echo.with("cv", cv_json(&cv));
            cv.selected
        }
    };
    echo = echo.with("parameter", parameter);
    let model = KdeModel::fit(manifold, &data.points, kind.with_parameter(parameter))?;
    let doc = ModelDoc {
        config: Some(echo.json()),
        model: LoadedModel::Kde(model).to_spec(),
    };
    write_output(a.common.out.as_deref(), doc.to_json().as_bytes())
}

fn log_coords(manifold: Manifold, points: &[ManifoldPoint]) -> CliResult<Vec<Vec<f64>>> {
    Ok(points
        .iter()
        .map(|x| manifold.log_map(x).map(|v| v.into_vec()))
        .collect::<symspace_core::Result<Vec<_>>>()?)
}

pub fn em(a: EmArgs) -> CliResult<()> {
    let data = load_dataset(&a.input, optional_manifold(&a.manifold)?)?;
    let manifold = data.manifold;
    let coords = log_coords(manifold, &data.points)?;
    let seed = Seed(a.common.seed);
    let mut base = EmConfig::new(1);
    base.max_iter = a.max_iter;
    base.tol = a.tol;
    base.reg_floor = a.reg_floor;
    base.covariance = covariance_from_name(&a.covariance)?;
    let mut echo = Echo::new("em")
        .with("manifold", manifold.to_string())
        .with("covariance", a.covariance.clone())
        .with("n", coords.len())
        .with("seed", a.common.seed);
    let k = match a.k {
        Some(0) => return Err(CliError::usage("--K must be at least 1")),
        Some(k) => k,
        None => {
            let pick = model_select_k(manifold, &coords, a.k_max, a.folds, &base, seed.derive(0))?;
            echo = echo.with("k_max", a.k_max).with("folds", a.folds).with("k_scores", pick.scores.clone());
            pick.k
        }
    };
    let cfg = EmConfig { components: k, ..base };
    let model = em_fit(manifold, &coords, &cfg, seed)?;
    echo = echo.with("K", k).with("log_likelihood", model.log_likelihood());
    let doc = ModelDoc {
        config: Some(echo.json()),
        model: LoadedModel::Mixture(model).to_spec(),
    };
    write_output(a.common.out.as_deref(), doc.to_json().as_bytes())
}

fn labeled(data: Dataset, classes: Option<usize>) -> CliResult<LabeledDataset> {
    Ok(match classes {
        Some(k) => LabeledDataset::with_classes(data.manifold, data.points, data.labels, k)?,
        None => LabeledDataset::new(data.manifold, data.points, data.labels)?,
    })
}

pub fn classify(a: ClassifyArgs) -> CliResult<()> {
    let kind: ClassifierKind = a.kind.parse().map_err(|e: symspace_core::Error| CliError::usage(e.to_string()))?;
    if a.repeats == 0 {
        return Err(CliError::usage("--repeats must be at least 1"));
    }
    let train_all = labeled(load_dataset(&a.input, optional_manifold(&a.manifold)?)?, None)?;
    let manifold = train_all.manifold();
    let mut echo = Echo::new("classify")
        .with("kind", kind.to_string())
        .with("manifold", manifold.to_string())
        .with("classes", train_all.classes())
        .with("seed", a.common.seed);
    if let Some(h) = a.h {
        echo = echo.with("h", h);
    }
    let mut pairs = Vec::new();
    if let Some(test_path) = &a.test {
        if a.repeats != 1 {
            return Err(CliError::usage("--repeats applies only when splitting --in"));
        }
        let test = labeled(load_dataset(test_path, Some(manifold))?, Some(train_all.classes()))?;
        pairs.push((a.common.seed, train_all, test));
        echo = echo.with("split", "separate");
    } else {
        for r in 0..a.repeats as u64 {
            let s = a.common.seed.wrapping_add(r);
            let (train, test) = split(&train_all, a.fraction, Seed(s))?;
            pairs.push((s, train, test));
        }
        echo = echo.with("fraction", a.fraction).with("repeats", a.repeats);
    }
    let mut runs = Vec::new();
    let (mut acc, mut brier) = (0.0, 0.0);
    for (s, train, test) in &pairs {
        let model = ClassifierModel::fit(kind, train, a.h, Seed(*s))?;
        let report = evaluate(&model, test, false)?;
        acc += report.accuracy;
        brier += report.brier;
        runs.push(json!({
            "seed": s,
            "train": train.len(),
            "test": report.n,
            "bandwidth": model.bandwidth(),
            "accuracy": report.accuracy,
            "brier": report.brier,
            "confusion": report.confusion,
        }));
    }
    let r = pairs.len() as f64;
    let out = json!({
        "config": echo.json(),
        "runs": runs,
        "mean_accuracy": acc / r,
        "mean_brier": brier / r,
    });
    write_output(a.common.out.as_deref(), json_text(&out).as_bytes())
}

fn require<'a>(p: &'a Option<std::path::PathBuf>, flag: &str, kind: MetricKind) -> CliResult<&'a Path> {
    p.as_deref()
        .ok_or_else(|| CliError::usage(format!("{flag} is required for {}", metric_name(kind))))
}

fn metric_name(kind: MetricKind) -> &'static str {
    match kind {
        MetricKind::Hellinger => "hellinger",
        MetricKind::Kl => "kl",
        MetricKind::L1 => "l1",
        MetricKind::L2 => "l2",
        MetricKind::Wasserstein => "wasserstein",
    }
}

pub fn metric(a: MetricArgs) -> CliResult<()> {
    let seed = Seed(a.common.seed);
    let mut echo = Echo::new("metric").with("kind", metric_name(a.kind)).with("seed", a.common.seed);
    let (value, stderr, n, extra) = match a.kind {
        MetricKind::Hellinger | MetricKind::Kl => {
            let p = load_model(require(&a.p, "--p", a.kind)?)?;
            let q = load_model(require(&a.q, "--q", a.kind)?)?;
            let est = if a.kind == MetricKind::Hellinger {
                hellinger_sq(&p, &q, a.n, seed)?
            } else {
                kl_divergence(&p, &q, a.n, seed)?
            };
            echo = echo.with("manifold", p.manifold().to_string());
            (est.value, Some(est.std_error), est.n, json!({"clamped": est.clamped}))
        }
        MetricKind::L1 | MetricKind::L2 => {
            let p = load_model(require(&a.p, "--p", a.kind)?)?;
            let q = load_model(require(&a.q, "--q", a.kind)?)?;
            let grid = PolarGrid {
                radial: a.radial,
                angular: a.angular,
                ..PolarGrid::default()
            };
            let power = if a.kind == MetricKind::L1 { 1 } else { 2 };
            let v = lp_distance_quadrature(&p, &q, power, &grid)?;
            echo = echo
                .with("manifold", p.manifold().to_string())
                .with("radial", grid.radial)
                .with("angular", grid.angular)
                .with("r_max", grid.r_max);
            (v, None, grid.radial * grid.angular, Value::Null)
        }
        MetricKind::Wasserstein => {
            let xs = load_dataset(require(&a.xs, "--xs", a.kind)?, None)?;
            let ys = load_dataset(require(&a.ys, "--ys", a.kind)?, Some(xs.manifold))?;
            let cost = match a.cost {
                CostKind::Geodesic => TransportCost::Geodesic,
                CostKind::Tangent => TransportCost::Tangent,
            };
            let v = wasserstein_empirical(xs.manifold, &xs.points, &ys.points, a.order, cost)?;
            echo = echo
                .with("manifold", xs.manifold.to_string())
                .with("order", a.order)
                .with("cost", if a.cost == CostKind::Geodesic { "geodesic" } else { "tangent" });
            (v, None, xs.points.len(), Value::Null)
        }
    };
    let mut out = json!({
        "config": echo.json(),
        "value": value,
        "stderr": stderr,
        "n": n,
        "seed": a.common.seed,
    });
    if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
        o.extend(e);
    }
    write_output(a.common.out.as_deref(), json_text(&out).as_bytes())
}

pub fn descriptor(a: DescriptorArgs) -> CliResult<()> {
    let cfg = DescriptorConfig {
        grid: a.grid,
        epsilon: a.epsilon,
    };
    let mut points = Vec::with_capacity(a.input.len());
    for path in &a.input {
        let bytes = fs::read(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        let img = parse_pgm(&bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        points.push(ManifoldPoint::Pd(covariance_descriptor(&img, &cfg)?));
    }
    let manifold = Manifold::Pd(symspace_core::descriptors::FEATURES);
    let echo = Echo::new("descriptor")
        .with("manifold", manifold.to_string())
        .with("images", points.len())
        .with("grid", cfg.grid)
        .with("epsilon", cfg.epsilon)
        .with("label", a.label)
        .with("seed", a.common.seed);
    let labels = vec![a.label; points.len()];
    write_output(a.common.out.as_deref(), write_dataset(&echo.line(), manifold, &points, &labels).as_bytes())
}

pub fn verify(a: VerifyArgs) -> CliResult<()> {
    let manifold = parse_manifold(&a.manifold)?;
    if a.cases == 0 {
        return Err(CliError::usage("--cases must be at least 1"));
    }
    let report = run_verify(manifold, a.cases, a.common.seed)?;
    let echo = Echo::new("verify")
        .with("manifold", manifold.to_string())
        .with("cases", a.cases)
        .with("seed", a.common.seed);
    let out = json!({
        "config": echo.json(),
        "checks": report.checks,
        "passed": report.passed,
    });
    write_output(a.common.out.as_deref(), json_text(&out).as_bytes())?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}

pub fn simulate(a: SimulateArgs) -> CliResult<()> {
    let family: Family = a.family.parse()?;
    let mut cfg = SimConfig::new(family, a.common.seed);
    if let Some(s) = &a.sweep {
        cfg.sweep = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::usage(format!("--sweep: `{t}` is not a number"))))
            .collect::<CliResult<Vec<_>>>()?;
    }
    cfg.n = a.n;
    cfg.replicates = a.replicates;
    cfg.folds = a.folds;
    cfg.k_max = a.k_max;
    let pool = thread_pool()?;
    let report = simulate::run(&cfg, &pool)?;
    let echo = Echo::new("simulate")
        .with("family", family.name())
        .with("sweep", cfg.sweep.clone())
        .with("n", cfg.n)
        .with("replicates", cfg.replicates)
        .with("folds", cfg.folds)
        .with("k_max", cfg.k_max)
        .with("seed", cfg.seed);
    let text = match a.format {
        Format::Csv => report.to_csv(&echo.line()),
        Format::Json => {
            let mut rows = Vec::new();
            for (s, v) in cfg.sweep.iter().enumerate() {
                for (k, name) in METHODS.iter().enumerate() {
                    rows.push(json!({
                        "value": v,
                        "method": name,
                        "mean": report.mean(s, k),
                        "sd": report.sd(s, k),
                    }));
                }
            }
            json_text(&json!({"config": echo.json(), "summary": rows, "scores": report.scores}))
        }
    };
    write_output(a.common.out.as_deref(), text.as_bytes())
}
