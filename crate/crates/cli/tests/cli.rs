use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use altest_core::data::{read_feature_csv, sample_labeled, write_labeled_csv, GaussianPair, LabeledDataset};
use altest_core::{minimize_risk, DenseMatrix, LinearScoreModel, OptimizerConfig, PuDataset};
use serde_json::Value;

fn altest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altest"))
        .args(args)
        .env_remove("ALTEST_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

/// Key paths and value kinds, one per line; arrays contribute their first element.
fn shape(v: &Value, path: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            out.push(format!("{path}: object"));
            for (k, x) in m {
                shape(x, &format!("{path}.{k}"), out);
            }
        }
        Value::Array(a) => {
            out.push(format!("{path}: array"));
            if let Some(x) = a.first() {
                shape(x, &format!("{path}[]"), out);
            }
        }
        Value::Number(_) => out.push(format!("{path}: number")),
        Value::String(_) => out.push(format!("{path}: string")),
        Value::Bool(_) => out.push(format!("{path}: bool")),
        Value::Null => out.push(format!("{path}: null")),
    }
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(actual.trim_end(), want.trim_end(), "schema drift against {}", path.display());
}

fn generated(dir: &Path, seed: &str) -> PathBuf {
    let out = altest(&[
        "generate", "--n-pos", "100", "--n-unlabeled", "2000", "--n-test", "500", "--seed", seed,
        "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.to_path_buf()
}

fn train_args<'a>(d: &'a Path, extra: &[&'a str]) -> Vec<String> {
    let mut v: Vec<String> = vec![
        "train".into(),
        "--positive".into(),
        d.join("positive.csv").display().to_string(),
        "--unlabeled".into(),
        d.join("unlabeled.csv").display().to_string(),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run(args: &[String]) -> Output {
    altest(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn train_report_schema_is_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let d = generated(tmp.path(), "3");
    let test = d.join("test.csv").display().to_string();
    let out = run(&train_args(&d, &["--test-set", &test]));
    assert!(out.status.success());
    let v = stdout_json(&out);
    let mut lines = Vec::new();
    shape(&v, "$", &mut lines);
    golden("train_schema.txt", &lines.join("\n"));
    let est = v["estimated_prior"].as_f64().unwrap();
    assert!((est - 0.5).abs() < 0.1, "estimate {est}");
    assert_eq!(v["trajectory"].as_array().unwrap().last().unwrap().as_f64().unwrap(), est);
}

#[test]
fn train_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let d = generated(tmp.path(), "5");
    let a = run(&train_args(&d, &["--seed", "9"]));
    let b = run(&train_args(&d, &["--seed", "9"]));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bias_adds_one_weight() {
    let tmp = tempfile::tempdir().unwrap();
    let d = generated(tmp.path(), "1");
    let w = |m: &str| stdout_json(&run(&train_args(&d, &["--model", m])))["weights"].as_array().unwrap().len();
    assert_eq!(w("altest1"), 2);
    assert_eq!(w("altest2"), 1);
}

#[test]
fn fixed_prior_is_one_minimization() {
    let tmp = tempfile::tempdir().unwrap();
    let d = generated(tmp.path(), "2");
    let v = stdout_json(&run(&train_args(&d, &["--fixed-prior", "0.5"])));
    assert_eq!(v["trajectory"], serde_json::json!([0.5]));
    assert_eq!(v["estimated_prior"], 0.5);

    let read = |n: &str| read_feature_csv(std::fs::File::open(d.join(n)).unwrap()).unwrap();
    let data = PuDataset::new(read("positive.csv"), read("unlabeled.csv")).unwrap();
    let want = minimize_risk(&data, 0.5, &OptimizerConfig::default(), &LinearScoreModel::zeros(1, true)).unwrap();
    let got: Vec<f64> = v["weights"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(got, want.model.weights());
}

#[test]
fn exhausted_restarts_give_json_error() {
    let tmp = tempfile::tempdir().unwrap();
    let half = [0.4, 1.1, 2.0, 2.7];
    let p: Vec<f64> = half.iter().flat_map(|&x| [x, -x]).collect();
    let data = LabeledDataset::new(DenseMatrix::from_row_major(p.len(), 1, p).unwrap(), vec![1; 8]).unwrap();
    for name in ["positive.csv", "unlabeled.csv"] {
        write_labeled_csv(std::fs::File::create(tmp.path().join(name)).unwrap(), &data).unwrap();
    }
    let out = run(&train_args(tmp.path(), &["--model", "altest2", "--delta", "0.4", "--max-iters", "1000"]));
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "initial_prior_exhausted");
    assert!(v["error"]["restarts"].as_u64().unwrap() > 0);
    let mut lines = Vec::new();
    shape(&v, "$", &mut lines);
    golden("error_schema.txt", &lines.join("\n"));
}

#[test]
fn estimate_prior_matches_train() {
    let tmp = tempfile::tempdir().unwrap();
    let d = generated(tmp.path(), "4");
    let mut args = train_args(&d, &[]);
    let train = stdout_json(&run(&args));
    args[0] = "estimate-prior".into();
    let est = stdout_json(&run(&args));
    assert_eq!(train["estimated_prior"], est["estimated_prior"]);
    assert_eq!(
        est["iterations"].as_u64().unwrap() as usize + 1,
        train["trajectory"].as_array().unwrap().len()
    );
}

#[test]
fn libsvm_case_control_training() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = GaussianPair::isotropic(vec![1.5, 1.5], vec![-1.5, -1.5], 0.5);
    let pool = sample_labeled(&spec, 3000, 8).unwrap();
    let path = tmp.path().join("pool.svm");
    altest_core::data::write_libsvm(std::fs::File::create(&path).unwrap(), &pool).unwrap();
    let out = altest(&[
        "train", "--libsvm", path.to_str().unwrap(), "--n-pos", "200", "--n-unlabeled", "800",
        "--prior", "0.3", "--test-size", "500", "--model", "altest2", "--seed", "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!((v["estimated_prior"].as_f64().unwrap() - 0.3).abs() < 0.1);
    assert!(v["test_error"].as_f64().unwrap() < 0.1);
}

fn csv_rows(bytes: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn population_trace_is_monotone() {
    let out = altest(&["population-sim", "--mode", "trace", "--iters", "200"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out.stdout);
    golden("trace_header.txt", &header.join(","));
    assert_eq!(rows.len(), 201);
    let priors: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(priors.windows(2).all(|w| w[1] <= w[0]));
    assert!(rows.last().unwrap()[2].is_empty());
    for r in &rows[..rows.len() - 1] {
        let gap: f64 = r[2].parse().unwrap();
        let rhs: f64 = r[3].parse().unwrap();
        assert!((gap - rhs).abs() < 1e-6);
    }
}

#[test]
fn population_sweep_fixed_point_row() {
    let out = altest(&["population-sim", "--mode", "sweep", "--priors", "0.7", "--include-pi-max"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out.stdout);
    golden("sweep_header.txt", &header.join(","));
    let last = rows.last().unwrap();
    let (a, b): (f64, f64) = (last[0].parse().unwrap(), last[1].parse().unwrap());
    assert!((a - 0.495).abs() < 1e-9 && (a - b).abs() < 1e-5);
}

#[test]
fn invalid_flags_fail_with_usage() {
    let out = altest(&["population-sim", "--grid", "banana"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--help"));
    let out = altest(&["population-sim", "--sigma", "-1"]);
    assert!(!out.status.success());
}

const ONE_ROW: &str = r#"
priors = [0.4]
n_unlabeled = [300]
n_pos = 150
repetitions = 1
flip = [false]
test_size = 300
seed = 11

[[datasets]]
name = "g"
kind = "gaussian"
mean_pos = [1.0, 1.0]
mean_neg = [-1.0, -1.0]
pool_size = 3000

[[datasets]]
name = "absent"
kind = "libsvm"
path = "does-not-exist.svm"
labels = { kind = "binary" }
"#;

#[test]
fn single_row_benchmark() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bench.toml");
    std::fs::write(&cfg, ONE_ROW).unwrap();
    let out = altest(&["benchmark", cfg.to_str().unwrap(), "--jobs", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent"));
    let (header, rows) = csv_rows(&out.stdout);
    golden("benchmark_header.txt", &header.join(","));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][4], "0");
    assert_eq!((rows[1][4].as_str(), rows[2][4].as_str()), ("mean", "std"));
    let est: f64 = rows[0][5].parse().unwrap();
    let abs: f64 = rows[0][6].parse().unwrap();
    assert_eq!(abs, (est - 0.4).abs());
    assert_eq!(rows[1][5..8], rows[0][5..8]);
}

#[test]
fn bad_benchmark_config_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bench.toml");
    std::fs::write(&cfg, "priors = [2.0]\n").unwrap();
    assert!(!altest(&["benchmark", cfg.to_str().unwrap()]).status.success());
}

#[test]
fn output_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_altest"))
        .args(["population-sim", "--iters", "3"])
        .env("ALTEST_OUTPUT_DIR", tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(tmp.path().join("population_trace.csv")).unwrap();
    assert!(text.starts_with("k,prior,gap,lemma2_rhs\n"));
}
