use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn toeplitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toeplitz")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const Z3: &str = r#"{"backend": {"kind": "z", "multipliers": [3, 3, 3]}, "depth": 3, "r": 2}"#;

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn report_run_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "z3.json", Z3);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = toeplitz(&["report", "run", "--config", &cfg, "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["tower.json", "jsets.json", "density.csv", "measures.csv", "simplex.json", "zmass.csv", "verify.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let plot = toeplitz(&["report", "plot", "--series", "density", "--bundle", a.to_str().unwrap()]);
    let text = String::from_utf8(plot.stdout).unwrap();
    let d: Vec<&str> = text.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(d, vec!["1/3", "5/9", "19/27"]);
    let bad = toeplitz(&["report", "plot", "--series", "nope", "--bundle", a.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_ratio_names_the_level() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"backend": {"kind": "z", "multipliers": [3, 2, 3]}, "depth": 3}"#,
    );
    let out = toeplitz(&["tower", "build", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("backend.multipliers[1]") && err.contains("level 2"), "{err}");
}

#[test]
fn f2_tower_sizes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "f2.json",
        r#"{"backend": {"kind": "f2_sanov", "levels": [1, 2]}, "depth": 2}"#,
    );
    let out = toeplitz(&["tower", "build", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["sizes"], serde_json::json!([1, 24, 648]));
    let valid = toeplitz(&["tower", "validate", "--tower", tmp.path().join("tower.json").to_str().unwrap()]);
    assert_eq!(valid.status.code(), Some(0));
}

#[test]
fn corrupted_tower_fails_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "z3.json", Z3);
    let out = toeplitz(&["tower", "build", "--config", &cfg]);
    let mut dump = stdout_json(&out);
    // 4 ≡ 13 mod 9, so D_2 stays a transversal but no longer tiles.
    let level = dump["levels"][1].as_array_mut().unwrap();
    let pos = level.iter().position(|v| v == "4").unwrap();
    level[pos] = Value::String("13".into());
    let path = tmp.path().join("broken.json");
    fs::write(&path, dump.to_string()).unwrap();
    let res = toeplitz(&["tower", "validate", "--tower", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(stdout_json(&res)["passed"], Value::Bool(false));
}

#[test]
fn eval_window_and_measures() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "z3.json", Z3);
    let out = toeplitz(&["toeplitz", "eval", "--config", &cfg, "--", "0", "-1", "4"]);
    let rows = stdout_json(&out);
    assert_eq!(rows[0]["symbol"], 1);
    assert_eq!(rows[0]["level"], 0);
    let out = toeplitz(&["toeplitz", "eval", "--config", &cfg, "--", "40"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("needs depth >= 4"));
    let masses = stdout_json(&toeplitz(&["measures", "masses", "--config", &cfg]));
    assert_eq!(masses[1]["counted"], serde_json::json!(["7/9", "2/9"]));
    let part = toeplitz(&["measures", "partition", "--config", &cfg, "--m", "3", "--n", "1", "--window", "2"]);
    assert_eq!(part.status.code(), Some(0));
    let matrix = stdout_json(&toeplitz(&["measures", "matrix", "--config", &cfg, "--n", "1"]));
    assert_eq!(matrix["entries"], serde_json::json!([["2/1", "0/1"], ["1/1", "3/1"]]));
    let window = stdout_json(&toeplitz(&["toeplitz", "window", "--config", &cfg, "0", "1"]));
    assert_eq!(window.as_array().unwrap().len(), 2);
}

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "z3.json", Z3);
    let one = toeplitz(&["verify", "good_gamma", "--config", &cfg, "--n", "1", "--m", "3"]);
    assert_eq!(one.status.code(), Some(0));
    let rep = stdout_json(&one);
    assert_eq!(rep["payload"]["count"], 2);
    assert_eq!(rep["verdict"], "pass");
    let all = toeplitz(&["verify", "all", "--config", &cfg, "--depth", "3"]);
    assert_eq!(all.status.code(), Some(0));
    assert_eq!(stdout_json(&all)["failed"], 0);
    let missing = toeplitz(&["verify", "rel_partition", "--config", &cfg, "--n", "0", "--m", "2"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown = toeplitz(&["verify", "nope", "--config", &cfg]);
    assert_eq!(unknown.status.code(), Some(2));
}
