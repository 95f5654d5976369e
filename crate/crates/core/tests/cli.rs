use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stein-bounds")).args(args).output().unwrap()
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> String {
    let p = dir.path().join("config.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bounds_config_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"model":{"type":"indep_sum","family":"rademacher","n":10},
            "tasks":["be_iid","dw_indep","kolmogorov_exact"],"reps":2000,"seed":1}"#,
    );
    let out = bin(&["bounds", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let bounds = v["bounds"].as_array().unwrap();
    assert_eq!(bounds.len(), 2);
    assert!(bounds.iter().all(|b| b["dominates"] == true));
}

#[test]
fn bounds_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, r#"{"model":{"type":"indep_sum","family":"rademacher","n":6},"tasks":["dw_indep"],"seed":3}"#);
    let out_path = dir.path().join("out.csv");
    let out = bin(&["bounds", "--config", &cfg, "--format", "csv", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(out_path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("bound_name,"));
    assert!(lines.next().unwrap().contains("wasserstein"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing_seed = write_config(&dir, r#"{"model":{"type":"indep_sum","family":"rademacher","n":6},"tasks":["dw_indep"]}"#);
    assert_eq!(bin(&["bounds", "--config", &missing_seed]).status.code(), Some(2));
    let unknown = write_config(&dir, r#"{"model":{"type":"indep_sum","family":"rademacher","n":6},"tasks":["nope"],"seed":1}"#);
    assert_eq!(bin(&["bounds", "--config", &unknown]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "regression", "--model", "iid-rademacher", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn task_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"model":{"type":"indep_sum","family":"rademacher","n":6},"tasks":["concentration"],
            "seed":1,"params":{"a":1.0,"b":0.0}}"#,
    );
    assert_eq!(bin(&["bounds", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn verify_prints_checks_csv() {
    let out = bin(&["--seed", "7", "--format", "csv", "verify", "regression", "--model", "combinatorial", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("task,name,residual"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn be_sweep_is_seed_stable() {
    let args = ["--seed", "11", "--reps", "5000", "--format", "csv", "experiment", "be-sweep", "--n", "10,40"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
