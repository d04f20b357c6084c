use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homfinsler")).args(args).output().unwrap()
}

fn config_file(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("homfinsler-cli-{}-{name}.json", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn catalog_json() {
    let out = run(&["catalog", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["cases"].as_array().unwrap().len(), 10);
}

#[test]
fn catalog_text() {
    let out = run(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("S_{k,l}"));
}

#[test]
fn bad_configs_exit_two() {
    let unknown = config_file("unknown", r#"{"space": {"case": 1, "colour": 3}}"#);
    let out = run(&["verify-case", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = run(&["scan", "--config", "/nonexistent/homfinsler.json"]);
    assert_eq!(out.status.code(), Some(2));

    let excluded = config_file("excluded", r#"{"space": {"case": 9}}"#);
    let out = run(&["verify-case", "--config", excluded.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn negative_control_exits_one() {
    let cfg = config_file(
        "control",
        r#"{"space": {"case": 6, "k": 1, "l": -1, "negative_control": true},
            "metric": {"phi": {"family": "randers", "eps": 0.2}},
            "scan": {"refine_iters": 4, "s_samples": 50}}"#,
    );
    let out = run(&["verify-case", "--config", cfg.to_str().unwrap(), "--samples", "64", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["config"]["scan"]["flag_samples"], 64);
}

#[test]
fn out_file_matches_stdout() {
    let cfg = config_file(
        "scan",
        r#"{"space": {"case": 1, "n": 1},
            "metric": {"phi": {"family": "randers", "eps": 0.3}},
            "scan": {"refine_iters": 4, "s_samples": 50}}"#,
    );
    let out_path = std::env::temp_dir().join(format!("homfinsler-cli-{}-report.json", std::process::id()));
    let out = run(&[
        "scan",
        "--config",
        cfg.to_str().unwrap(),
        "--samples",
        "32",
        "--seed",
        "5",
        "--json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(printed, written);
    assert_eq!(printed["config"]["seed"], 5);
}
