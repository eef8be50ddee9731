use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordmetric")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn sample(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["sample", "--out", s(&out)];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn circle_grid_sample_has_equally_spaced_angles() {
    let dir = TempDir::new().unwrap();
    let f = sample(&dir, "s.json", &["--space", "circle", "--n", "8", "--mode", "grid"]);
    let v = json(&f);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 8);
    for (i, p) in points.iter().enumerate() {
        let angle = p[0].as_f64().unwrap();
        assert!((angle - 2.0 * std::f64::consts::PI * i as f64 / 8.0).abs() < 1e-12);
    }
    assert_eq!(v["space"]["kind"], "circle");
}

#[test]
fn seeded_sample_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = sample(&dir, "a.json", &["--space", "torus", "--n", "128", "--seed", "7"]);
    let b = sample(&dir, "b.json", &["--space", "torus", "--n", "128", "--seed", "7"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(json(&a)["points"].as_array().unwrap().len(), 128);
}

#[test]
fn usage_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.json");
    assert_eq!(code(&run(&["sample", "--space", "circle", "--n", "1", "--out", s(&out)])), 64);
    assert_eq!(code(&run(&["sample", "--space", "hyperbolic", "--n", "4", "--out", s(&out)])), 64);
    assert_eq!(code(&run(&["sample", "--space", "torus", "--n", "4", "--sides", "1", "--out", s(&out)])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert!(!out.exists());
}

#[test]
fn help_documents_defaults() {
    let o = run(&["reconstruct", "--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("ceil(log2 n) + 2"));
    assert!(text.contains("[default: d-plus]"));
    let o = run(&["evaluate", "--help"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("[default: 0.0001]"));
}

#[test]
fn segment_pipeline_recovers_and_passes() {
    let dir = TempDir::new().unwrap();
    let smp = sample(&dir, "s.json", &["--space", "segment", "--n", "5", "--mode", "grid"]);
    let res = path(&dir, "r.json");
    assert_eq!(code(&run(&["reconstruct", "--sample", s(&smp), "--out", s(&res)])), 0);
    let r = json(&res);
    assert_eq!(r["p_n"], 2);
    for (u, row) in r["d_plus"].as_array().unwrap().iter().enumerate() {
        for (v, x) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(x.as_f64().unwrap(), (u as f64 - v as f64).abs() / 4.0);
        }
    }
    let rep = path(&dir, "e.json");
    let o = run(&["evaluate", "--sample", s(&smp), "--result", s(&res), "--out", s(&rep)]);
    assert_eq!(code(&o), 0);
    let e = json(&rep);
    for flag in ["lemma1", "lemma2", "lemma3", "thm2", "cor", "metric"] {
        assert_eq!(e["passed"][flag], true, "{flag}");
    }
}

#[test]
fn reconstruct_is_byte_identical_on_rerun() {
    let dir = TempDir::new().unwrap();
    let smp = sample(&dir, "s.json", &["--space", "sphere", "--n", "80", "--seed", "3"]);
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    assert_eq!(code(&run(&["reconstruct", "--sample", s(&smp), "--out", s(&a)])), 0);
    assert_eq!(code(&run(&["reconstruct", "--sample", s(&smp), "--out", s(&b)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn two_point_sample_fails_reconstruction_with_exit_2() {
    let dir = TempDir::new().unwrap();
    let smp = sample(&dir, "s.json", &["--space", "segment", "--n", "2", "--mode", "grid"]);
    let o = run(&["reconstruct", "--sample", s(&smp), "--out", s(&path(&dir, "r.json"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("reconstruction failed"));
}

#[test]
fn tampered_result_fails_evaluation() {
    let dir = TempDir::new().unwrap();
    let smp = sample(&dir, "s.json", &["--space", "segment", "--n", "9", "--mode", "grid"]);
    let res = path(&dir, "r.json");
    assert_eq!(code(&run(&["reconstruct", "--sample", s(&smp), "--out", s(&res)])), 0);
    let mut r = json(&res);
    let x = r["d_plus"][0][8].as_f64().unwrap();
    r["d_plus"][0][8] = serde_json::json!(x - 0.5);
    r["d_plus"][8][0] = serde_json::json!(x - 0.5);
    std::fs::write(&res, serde_json::to_string(&r).unwrap()).unwrap();
    let rep = path(&dir, "e.json");
    let o = run(&["evaluate", "--sample", s(&smp), "--result", s(&res), "--out", s(&rep)]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&rep)["passed"]["lemma3"], false);
}

#[test]
fn evaluate_rejects_missing_and_mismatched_files() {
    let dir = TempDir::new().unwrap();
    let small = sample(&dir, "a.json", &["--space", "segment", "--n", "5", "--mode", "grid"]);
    let large = sample(&dir, "b.json", &["--space", "segment", "--n", "9", "--mode", "grid"]);
    let res = path(&dir, "r.json");
    assert_eq!(code(&run(&["reconstruct", "--sample", s(&small), "--out", s(&res)])), 0);
    let rep = path(&dir, "e.json");
    let missing = path(&dir, "missing.json");
    assert_eq!(code(&run(&["evaluate", "--sample", s(&missing), "--result", s(&res), "--out", s(&rep)])), 64);
    assert_eq!(code(&run(&["evaluate", "--sample", s(&large), "--result", s(&res), "--out", s(&rep)])), 64);
    assert!(!rep.exists());
}

#[test]
fn sweep_rows_and_determinism() {
    let dir = TempDir::new().unwrap();
    let (a, b, summary) = (path(&dir, "a.csv"), path(&dir, "b.csv"), path(&dir, "sum.json"));
    let args = |out: &Path| {
        vec![
            "sweep".to_string(),
            "--space".into(),
            "circle".into(),
            "--n-list".into(),
            "16,24,32,48".into(),
            "--trials".into(),
            "20".into(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            s(out).into(),
        ]
    };
    let mut first = args(&a);
    first.extend(["--summary".to_string(), s(&summary).into()]);
    let first: Vec<&str> = first.iter().map(String::as_str).collect();
    assert_eq!(code(&run(&first)), 0);
    let second = args(&b);
    let second: Vec<&str> = second.iter().map(String::as_str).collect();
    assert_eq!(code(&run(&second)), 0);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 1 + 80);
    assert!(text.starts_with("space,dim,n,trial,seed,d_H,"));
    let sum = json(&summary);
    assert_eq!(sum["rows"], 80);
    assert!(sum["fit"]["exponent"].as_f64().unwrap().is_finite());
}

#[test]
fn sweep_rejects_bad_size_lists() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "rows.csv");
    assert_eq!(code(&run(&["sweep", "--space", "circle", "--n-list", "64,32", "--out", s(&out)])), 64);
    assert_eq!(code(&run(&["sweep", "--space", "circle", "--n-list", "x", "--out", s(&out)])), 64);
}
