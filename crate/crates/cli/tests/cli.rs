use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn rdcann(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdcann"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, name: &str, n: &str, noise: &str) -> std::path::PathBuf {
    let out = dir.join(name);
    let o = rdcann(&["gen-data", "--n", n, "--seed", "1", "--noise", noise, "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

fn train(dir: &Path, data: &Path, name: &str) -> (std::path::PathBuf, Output) {
    let model = dir.join(name);
    let o = rdcann(&[
        "train", "--data", p(data), "--hidden", "7", "--iterations", "3000", "--seed", "1",
        "--split", "0.8", "--model-out", p(&model),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    (model, o)
}

fn metric(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.trim().strip_prefix('=')?.trim().parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in:\n{text}"))
}

#[test]
fn gen_data_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = fs::read(gen(dir.path(), "a.csv", "400", "0.01")).unwrap();
    let b = fs::read(gen(dir.path(), "b.csv", "400", "0.01")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 401);
    assert!(text.starts_with("sf_ratio,feed_temp_c,solvent_temp_c,rotation_rpm,product_flow_m3hr\n"));
}

#[test]
fn zero_samples_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = rdcann(&["gen-data", "--n", "0", "--out", p(&dir.path().join("x.csv"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(rdcann(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rdcann(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("d.csv");
    fs::write(&cfg, format!("n = 50\nseed = 3\nout = {}\n", p(&out))).unwrap();
    let o = rdcann(&["--config", p(&cfg), "gen-data", "--n", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 21);
    let err = stderr(&o);
    assert!(err.contains("# n = 20"), "{err}");
    assert!(err.contains("# seed = 3"), "{err}");

    fs::write(&cfg, "learning_rate = 1\n").unwrap();
    let o = rdcann(&["--config", p(&cfg), "gen-data", "--n", "5", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_writes_reproducible_model() {
    let dir = TempDir::new().unwrap();
    let data = gen(dir.path(), "d.csv", "200", "0.01");
    let (m1, o) = train(dir.path(), &data, "m1.txt");
    let (m2, _) = train(dir.path(), &data, "m2.txt");
    let a = fs::read_to_string(&m1).unwrap();
    assert_eq!(a, fs::read_to_string(&m2).unwrap());
    assert!(a.lines().any(|l| l == "dims 4 7 1"));
    let out = stdout(&o);
    for key in ["train.mse", "train.pct_error", "validation.mse", "validation.pct_error"] {
        assert!(metric(&out, key).is_finite());
    }
}

#[test]
fn missing_data_file_is_io_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    let o = rdcann(&["train", "--data", p(&missing), "--model-out", p(&dir.path().join("m"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.csv"));
}

#[test]
fn arch_search_single_candidate() {
    let dir = TempDir::new().unwrap();
    let data = gen(dir.path(), "d.csv", "120", "0.01");
    let report = dir.path().join("r.csv");
    let o = rdcann(&[
        "arch-search", "--data", p(&data), "--min-hidden", "7", "--max-hidden", "7",
        "--iterations", "200", "--out", p(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("selected hidden nodes: 7"));
    let csv = fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "hidden_nodes,train_mse,val_mse,val_pct_error");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("7,"));
}

#[test]
fn evaluate_scatter_and_schema_error() {
    let dir = TempDir::new().unwrap();
    let data = gen(dir.path(), "d.csv", "100", "0.01");
    let (model, _) = train(dir.path(), &data, "m.txt");
    let test = gen(dir.path(), "t.csv", "80", "0.01");
    let scatter = dir.path().join("s.csv");
    let o = rdcann(&["evaluate", "--model", p(&model), "--data", p(&test), "--scatter-out", p(&scatter)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let avg = metric(&out, "evaluation.avg_relative_error_pct");
    let max = metric(&out, "evaluation.max_relative_error_pct");
    assert!(metric(&out, "evaluation.mse") >= 0.0);
    assert!(metric(&out, "evaluation.pct_error").is_finite());
    assert!(avg <= max);
    let s = fs::read_to_string(&scatter).unwrap();
    assert_eq!(s.lines().next(), Some("actual,predicted"));
    assert_eq!(s.lines().count(), 81);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b,c\n1,2,3\n").unwrap();
    let o = rdcann(&["evaluate", "--model", p(&model), "--data", p(&bad)]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn sweep_and_predict() {
    let dir = TempDir::new().unwrap();
    let data = gen(dir.path(), "d.csv", "300", "0.0");
    let (model, _) = train(dir.path(), &data, "m.txt");

    let o = rdcann(&["sweep", "--model", p(&model), "--var", "sf_ratio", "--from", "1", "--to", "3", "--steps", "11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("sf_ratio,predicted_flow_m3hr\n"));
    assert!(out.contains("# trend: increasing"), "{out}");

    let o = rdcann(&["predict", "--model", p(&model), "--input", "sf_ratio=2,feed_temp=85,solvent_temp=85,rotation=35"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let q: f64 = stdout(&o).trim().parse().unwrap();
    assert!(q > 0.0);

    let o = rdcann(&["predict", "--model", p(&model), "--input", "sf_ratio=2,feed_temp=85"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for key in ["sf_ratio", "feed_temp", "solvent_temp", "rotation"] {
        assert!(err.contains(key), "{err}");
    }

    // noiseless row from the training file
    let csv = fs::read_to_string(&data).unwrap();
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let input = format!("sf_ratio={},feed_temp={},solvent_temp={},rotation={}", row[0], row[1], row[2], row[3]);
    let o = rdcann(&["predict", "--model", p(&model), "--input", &input]);
    let q: f64 = stdout(&o).trim().parse().unwrap();
    assert!(((q - row[4]) / row[4]).abs() < 0.02, "predicted {q}, actual {}", row[4]);
}
