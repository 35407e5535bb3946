use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(task: &str, config: &str, dir: &Path, threads: Option<&str>) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vortex-phase-lab"));
    cmd.args([task, "--config"]).arg(&cfg).arg("--out").arg(dir.join("out"));
    match threads {
        Some(t) => cmd.env("VPL_THREADS", t),
        None => cmd.env_remove("VPL_THREADS"),
    };
    cmd.output().unwrap()
}

fn stderr_json(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stderr)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|_| panic!("not JSON: {l}")))
        .collect()
}

#[test]
fn classify_writes_table_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("classify", r#"{"task": "classify", "domain": {"areas": [1, 0.9, 0.5]}}"#, dir.path(), None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/classify.csv")).unwrap();
    assert!(csv.starts_with("kind,min_beta,components,total_area\nsecond,"), "{csv}");
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/classify.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["tool"], "vortex-phase-lab");
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(meta["summary"]["kind"], "second");
}

#[test]
fn every_csv_has_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("transition", r#"{"domain": {"areas": [1, 0.99997, 0.99997]}}"#, dir.path(), Some("2"));
    assert_eq!(o.status.code(), Some(0));
    let mut csvs = 0;
    for e in std::fs::read_dir(dir.path().join("out")).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "csv") {
            csvs += 1;
            assert!(p.with_extension("meta.json").exists(), "{p:?}");
        }
    }
    assert!(csvs > 0);
}

#[test]
fn single_disk_has_no_transition() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("transition", r#"{"domain": {"areas": [1]}}"#, dir.path(), None);
    assert_eq!(o.status.code(), Some(2));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/transition.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["summary"]["found"], false);
}

#[test]
fn empty_mu_grid_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("branch", r#"{"domain": {"areas": [1, 0.5]}, "mu_grid": {"values": []}}"#, dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr_json(&o).pop().unwrap();
    assert_eq!(err["error"], "validation");
    assert!(err["field"].as_str().unwrap().starts_with("mu_grid"));
}

#[test]
fn unknown_key_is_a_parse_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("classify", "{\"domain\": {\"areas\": [1]},\n\"colour\": 1}", dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr_json(&o).pop().unwrap();
    assert_eq!(err["error"], "parse");
    assert_eq!(err["line"], 2);
}

#[test]
fn unsorted_areas_warn_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("classify", r#"{"domain": {"areas": [0.5, 1, 0.9]}}"#, dir.path(), None);
    assert_eq!(o.status.code(), Some(0));
    let lines = stderr_json(&o);
    assert!(lines.iter().any(|l| l.get("warning").is_some()));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/classify.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn zero_threads_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("classify", r#"{"domain": {"areas": [1]}}"#, dir.path(), Some("0"));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o).pop().unwrap()["error"], "threads");
}

#[test]
fn task_mismatch_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("branch", r#"{"task": "classify", "domain": {"areas": [1]}}"#, dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o).pop().unwrap()["error"], "validation");
}

#[test]
fn missing_config_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_vortex-phase-lab"))
        .args(["classify", "--config"])
        .arg(dir.path().join("nope.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o).pop().unwrap()["error"], "io");
}
