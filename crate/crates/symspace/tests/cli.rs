use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use symspace::formats::{read_dataset, write_dataset, LoadedModel, ModelDoc};
use symspace_core::distributions::LogGaussianParams;
use symspace_core::estimators::{KdeModel, KernelKind};
use symspace_core::linalg::{PdMatrix, SymMatrix};
use symspace_core::manifolds::{Manifold, ManifoldPoint};
use symspace_core::metrics::ManifoldDensity;
use symspace_core::rng::Seed;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symspace"))
        .args(args)
        .current_dir(dir)
        .env("SYMSPACE_THREADS", "2")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const LG_PD2: &str = r#"{"type":"log-gaussian","manifold":"pd:2","mu":[0.1,0,-0.2],"sigma":[[0.4,0,0],[0,0.4,0],[0,0,0.4]]}"#;

fn fixture() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("lg.json"), LG_PD2).unwrap();
    dir
}

#[test]
fn sample_is_deterministic_and_seed_sensitive() {
    let dir = fixture();
    let p = dir.path();
    let a = ok(p, &["sample", "--params", "lg.json", "--n", "20", "--seed", "1"]);
    let b = ok(p, &["sample", "--params", "lg.json", "--n", "20", "--seed", "1"]);
    let c = ok(p, &["sample", "--params", "lg.json", "--n", "20", "--seed", "2"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    let data = read_dataset(&a, None).unwrap();
    assert_eq!((data.manifold, data.points.len()), (Manifold::Pd(2), 20));
    assert!(data.labels.iter().all(|&l| l == 1));
    assert!(a.starts_with("# symspace sample manifold=pd:2 n=20 seed=1\n"));
}

#[test]
fn sample_zero_is_header_only() {
    let dir = fixture();
    let out = ok(dir.path(), &["sample", "--params", "lg.json", "--n", "0"]);
    assert_eq!(out.lines().count(), 2);
    assert_eq!(out.lines().nth(1), Some("label,m,x11,x12,x21,x22"));
}

#[test]
fn degenerate_covariance_samples_sit_at_exp_mu() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let spec = r#"{"type":"log-gaussian","manifold":"pd:2","mu":[1,0,-1],"sigma":[[1e-12,0,0],[0,1e-12,0],[0,0,1e-12]]}"#;
    std::fs::write(p.join("tiny.json"), spec).unwrap();
    let data = read_dataset(&ok(p, &["sample", "--params", "tiny.json", "--n", "5", "--seed", "3"]), None).unwrap();
    let target = Manifold::Pd(2).exp_map(&[1.0, 0.0, -1.0]).unwrap();
    let ManifoldPoint::Pd(t) = target else { unreachable!() };
    for x in &data.points {
        let x = x.as_pd().unwrap();
        for (a, b) in x.as_slice().iter().zip(t.as_slice()) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }
}

#[test]
fn kde_model_file_reproduces_densities_bit_for_bit() {
    let dir = fixture();
    let p = dir.path();
    std::fs::write(p.join("pts.csv"), ok(p, &["sample", "--params", "lg.json", "--n", "40", "--seed", "5"])).unwrap();
    std::fs::write(p.join("kde.json"), ok(p, &["kde", "--in", "pts.csv", "--h", "0.3"])).unwrap();

    let doc = ModelDoc::parse(&std::fs::read_to_string(p.join("kde.json")).unwrap()).unwrap();
    let loaded = LoadedModel::from_spec(&doc.model).unwrap();
    let data = read_dataset(&std::fs::read_to_string(p.join("pts.csv")).unwrap(), None).unwrap();
    let direct = KdeModel::fit(Manifold::Pd(2), &data.points, KernelKind::LogGaussian { bandwidth: 0.3 }).unwrap();

    let csv = ok(p, &["density", "--model", "kde.json", "--in", "pts.csv"]);
    let from_cli: Vec<f64> = csv.lines().skip(2).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(from_cli.len(), data.points.len());
    for (x, cli) in data.points.iter().zip(&from_cli) {
        let a = direct.log_density(x).unwrap();
        assert_eq!(a.to_bits(), loaded.log_density(x).unwrap().to_bits());
        assert_eq!(a.to_bits(), cli.to_bits());
    }
}

#[test]
fn kde_cross_validation_is_echoed() {
    let dir = fixture();
    let p = dir.path();
    std::fs::write(p.join("pts.csv"), ok(p, &["sample", "--params", "lg.json", "--n", "60", "--seed", "6"])).unwrap();
    let out: Value = serde_json::from_str(&ok(p, &["kde", "--in", "pts.csv", "--h-grid", "0.05:2:8", "--folds", "3"])).unwrap();
    let cv = &out["config"]["cv"];
    assert_eq!(cv["candidates"].as_array().unwrap().len(), 8);
    assert_eq!(cv["folds"], 3);
    assert_eq!(out["config"]["parameter"], cv["selected"]);
    assert_eq!(out["model"]["parameter"], cv["selected"]);
}

#[test]
fn separated_classes_are_classified_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let m = Manifold::Pd(2);
    let tiny = SymMatrix::identity(3).scale(1e-6);
    let far = PdMatrix::from_row_major(2, vec![10f64.exp(), 0.0, 0.0, 10f64.exp()]).unwrap();
    let far_log = m.log_map(&ManifoldPoint::Pd(far)).unwrap().into_vec();
    let mut pts = LogGaussianParams::new(m, vec![0.0; 3], tiny.clone()).unwrap().sample(20, Seed(1)).unwrap();
    pts.extend(LogGaussianParams::new(m, far_log, tiny).unwrap().sample(20, Seed(2)).unwrap());
    let labels: Vec<usize> = (0..40).map(|i| 1 + i / 20).collect();
    std::fs::write(p.join("two.csv"), write_dataset("fixture", m, &pts, &labels)).unwrap();
    let out: Value = serde_json::from_str(&ok(p, &["classify", "--kind", "lgnb", "--in", "two.csv", "--seed", "3"])).unwrap();
    assert_eq!(out["mean_accuracy"], 1.0);
    assert_eq!(out["runs"][0]["confusion"], serde_json::json!([[10, 0], [0, 10]]));
}

#[test]
fn self_hellinger_is_within_noise() {
    let dir = fixture();
    let out: Value =
        serde_json::from_str(&ok(dir.path(), &["metric", "--kind", "hellinger", "--p", "lg.json", "--q", "lg.json", "--n", "1000"]))
            .unwrap();
    let (v, se) = (out["value"].as_f64().unwrap(), out["stderr"].as_f64().unwrap());
    assert!(v.abs() <= 3.0 * se + 1e-12, "{v} vs {se}");
    assert_eq!(out["n"], 1000);
    assert_eq!(out["seed"], 0);
}

#[test]
fn em_with_fixed_k_writes_a_mixture() {
    let dir = fixture();
    let p = dir.path();
    std::fs::write(p.join("pts.csv"), ok(p, &["sample", "--params", "lg.json", "--n", "80", "--seed", "7"])).unwrap();
    let out = ok(p, &["em", "--in", "pts.csv", "--K", "2", "--covariance", "diagonal", "--seed", "1"]);
    let doc = ModelDoc::parse(&out).unwrap();
    let LoadedModel::Mixture(mix) = LoadedModel::from_spec(&doc.model).unwrap() else { panic!("not a mixture") };
    assert_eq!(mix.k(), 2);
    for c in mix.components() {
        let s = c.sigma();
        assert!(s.get(0, 1) == 0.0 && s.get(0, 2) == 0.0 && s.get(1, 2) == 0.0);
    }
}

#[test]
fn exit_codes() {
    let dir = fixture();
    let p = dir.path();
    assert_eq!(run(p, &["--help"]).status.code(), Some(0));
    assert_eq!(run(p, &["--version"]).status.code(), Some(0));
    assert_eq!(run(p, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(p, &["sample", "--params", "lg.json"]).status.code(), Some(1));
    assert_eq!(run(p, &["classify", "--kind", "svm", "--in", "x.csv"]).status.code(), Some(1));
    assert_eq!(run(p, &["sample", "--params", "missing.json", "--n", "3"]).status.code(), Some(2));
    std::fs::write(p.join("bad.csv"), "label,m,x11\n1,1,-4\n").unwrap();
    assert_eq!(run(p, &["density", "--model", "lg.json", "--in", "bad.csv"]).status.code(), Some(2));
    assert_eq!(run(p, &["verify", "--manifold", "pd:2", "--cases", "10"]).status.code(), Some(0));
}

#[test]
fn verify_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let out: Value = serde_json::from_str(&ok(dir.path(), &["verify", "--manifold", "siegel:1", "--cases", "25", "--seed", "4"])).unwrap();
    let names: Vec<&str> = out["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["volume-factor-oracle", "exp-log-round-trip", "siegel-matches-poincare"]);
    assert_eq!(out["passed"], true);
}

#[test]
fn simulate_csv_has_one_row_per_value_and_method() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["simulate", "--family", "loggaussian", "--sweep", "0.5,1", "--n", "80", "--replicates", "2"]);
    let rows: Vec<&str> = out.lines().skip(2).collect();
    assert_eq!(rows.len(), 8);
    assert!(out.lines().nth(1) == Some("family,value,method,mean,sd,replicates"));
    assert!(rows.iter().all(|r| r.starts_with("log-gaussian,") && r.ends_with(",2")));
}
