use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_istiefel-opt"))
}

#[test]
fn run_writes_history_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = bin()
        .args(["run", "--problem", "trace", "--metric", "gcan", "--n", "30", "--k", "6", "--seed", "3", "--no-elapsed", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&status.stdout).unwrap();
    assert_eq!(summary["status"], "Converged");
    assert_eq!(summary["lyapunov_solves"], 0);

    let hist = fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(hist.lines().next(), Some("iter,f,grad_norm,feas,tau,n_evals,elapsed"));
    assert!(hist.lines().skip(1).all(|l| l.ends_with(",0e0")));
    assert!(out.join("summary.json").exists());
    assert!(out.join("convergence.csv").exists());
    assert!(out.join("x_final.json").exists());
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.json");
    fs::write(&cfg, r#"{"problem": "trace", "metric": "gcan", "n": 30, "k": 6, "seed": 1}"#).unwrap();
    let o = bin().args(["run", "--metric", "eucl", "--max-iter", "3", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["status"], "MaxIter");
    assert_eq!(summary["iter"], 3);
    assert_eq!(summary["config"]["metric"], "eucl");
}

#[test]
fn verify_passes() {
    let o = bin().args(["verify", "--cases", "5"]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn compare_renders_table() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    let body = serde_json::json!({
        "base": {"problem": "trace", "metric": "gcan", "n": 30, "k": 6, "seed": 2, "out": dir.path().join("g")},
        "metrics": ["eucl", "gcan"],
        "retractions": ["qgeo"]
    });
    fs::write(&grid, body.to_string()).unwrap();
    let o = bin().args(["compare", "--jobs", "2", "--grid"]).arg(&grid).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.starts_with("Combination"));
    assert_eq!(table.lines().count(), 3);
    assert!(dir.path().join("g/compare.json").exists());
}

#[test]
fn bad_arguments_fail() {
    assert!(!bin().args(["run"]).output().unwrap().status.success());
    assert!(!bin().args(["run", "--problem", "sphere"]).output().unwrap().status.success());
    let o = bin().args(["run", "--problem", "procrustes", "--n", "20", "--k", "5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert!(!bin().args(["compare", "--grid", "/nonexistent/grid.json"]).output().unwrap().status.success());
}
