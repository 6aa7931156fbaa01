use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ncym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncym")).args(args).env_remove("NCYM_LOG").output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_clock(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_clock_seconds");
    v
}

const FLAT: &str = r#"{"kind":"torus_ym","payload":{"n":2,"theta":[[0,0.3],[-0.3,0]],"q":1,"connection":{"type":"flat"}}}"#;

#[test]
fn constants_subcommand_prints_the_dixmier_value() {
    let out = ncym(&["constants", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["results"]["dixmier"].as_f64().unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["conventions"]["cocycle"].as_str().unwrap().contains("U^r U^s"));
}

#[test]
fn flat_connection_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "flat.json", FLAT);
    let out = ncym(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["connection"]["ym"], 0.0);
    assert_eq!(v["config"]["payload"]["connection"]["type"], "flat");
}

#[test]
fn validate_reports_diagnostics_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", FLAT);
    let out = ncym(&["validate", &good]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(serde_json::from_slice::<Value>(&out.stdout).unwrap(), serde_json::json!([]));

    let bad = write(dir.path(), "bad.json", &FLAT.replace("[[0,0.3]", "[[1,0.3]"));
    let out = ncym(&["validate", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d.as_array().unwrap().len(), 1);
    assert_eq!(d[0]["path"], "/payload/theta");
    assert_eq!(d[0]["severity"], "error");
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let no_seed = write(
        dir.path(),
        "no_seed.json",
        &FLAT.replace(r#"{"type":"flat"}"#, r#"{"type":"random","radius":1,"amplitude":0.1}"#),
    );
    let out = ncym(&["run", &no_seed]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    assert!(out.stdout.is_empty());

    assert_eq!(ncym(&["run", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(1));
    let broken = write(dir.path(), "broken.json", r#"{"kind":"finite_forms","payload":{"triple":{"path":"nowhere.json"}}}"#);
    assert_eq!(ncym(&["run", &broken]).status.code(), Some(1));
}

#[test]
fn failed_verdicts_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "wrong.json",
        r#"{"kind":"finite_forms","payload":{"triple":{"matrix_case":{"mu":[[1]]}},"expect":{"dim_omega2":5}}}"#,
    );
    let out_path = dir.path().join("wrong.report.json");
    let out = ncym(&["run", &cfg, "--output", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = report(&out_path);
    assert_eq!(v["verdicts"]["expect_dim_omega2"], false);
    assert_eq!(v["results"]["forms"]["dim_omega2"], 2);
}

#[test]
fn output_path_resolves_next_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = FLAT.replace(r#""payload""#, r#""output_path":"flat.report.json","payload""#);
    let cfg = write(dir.path(), "flat.json", &text);
    let out = ncym(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(report(&dir.path().join("flat.report.json"))["kind"], "torus_ym");
}

#[test]
fn shipped_configs_run() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let out_path = dir.path().join(path.file_name().unwrap());
        let out = ncym(&["run", path.to_str().unwrap(), "--output", out_path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        assert!(report(&out_path)["verdicts"].as_object().unwrap().values().all(|v| v == true));
    }
}

#[test]
fn fixture_paths_are_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let cfg = configs().join("finite_product_case1_case3.json");
    let out = ncym(&["run", cfg.to_str().unwrap(), "--output", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out_path);
    assert_eq!(v["results"]["product"]["dim_h"], 6);
    assert_eq!(v["results"]["orthogonality"]["samples"], 100);
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("torus_product_random.json");
    let run = |seed: &str, name: &str| {
        let out_path = dir.path().join(name);
        let out = ncym(&["run", cfg.to_str().unwrap(), "--seed", seed, "--output", out_path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        without_clock(report(&out_path))
    };
    let (a, b, c) = (run("5", "a.json"), run("5", "b.json"), run("6", "c.json"));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_ne!(a["results"], c["results"]);
    assert_eq!(a["config"]["payload"]["checks"]["seed"], 5);
}

#[test]
fn log_level_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ncym"))
        .args(["constants", "--n", "1"])
        .env("NCYM_LOG", "info")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("running constants"));
}
