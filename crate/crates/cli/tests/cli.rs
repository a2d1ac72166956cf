use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn toral(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toral"))
        .args(args)
        .env("TORAL_OUT_DIR", dir)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn build_box(dir: &Path) {
    let o = toral(dir, &["build-box", "--matrix", "2,1,1,1", "--y0", "1/5,2/5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn analyze_reports_exact_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let o = toral(dir.path(), &["analyze", "--matrix", "2,1,1,1"]);
    assert!(o.status.success());
    let env = read(&dir.path().join("analysis.json"));
    assert_eq!(env["kind"], "analysis");
    assert_eq!(env["payload"]["readable"]["lambda_plus"]["exact"], "3/2 + 1/2*sqrt(5)");
    assert!(env["payload"]["readable"]["lambda_plus"]["decimal"].as_str().unwrap().starts_with("2.6180339887498948482"));
    assert_eq!(env["payload"]["auto"]["lambda_plus"], serde_json::json!({"a": {"num": "3", "den": "2"}, "b": {"num": "1", "den": "2"}, "D": 5}));
    assert_eq!(env["input_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn artifacts_verify_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    build_box(d);
    assert!(toral(d, &["verify-overlaps", "--box", "box.json", "--depth", "5", "--slice-samples", "20"]).status.success());
    assert!(toral(d, &["find-segment", "--box", "box.json"]).status.success());
    for f in ["box.json", "overlaps.json", "segment.json"] {
        let text = std::fs::read_to_string(d.join(f)).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
        let o = toral(d, &["verify", "--in", f]);
        assert!(o.status.success(), "{f}: {}", String::from_utf8_lossy(&o.stdout));
        // a second run gives the same verdict byte for byte
        assert_eq!(o.stdout, toral(d, &["verify", "--in", f]).stdout);
    }
}

#[test]
fn tampered_artifacts_fail() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    build_box(d);
    let mut env = read(&d.join("box.json"));
    env["payload"]["certificate"]["c"]["terms"][0]["c"] = Value::from("1/2");
    env["payload"]["box"]["c"] = env["payload"]["certificate"]["c"].clone();
    std::fs::write(d.join("bad_box.json"), serde_json::to_string(&env).unwrap()).unwrap();
    let o = toral(d, &["verify", "--in", "bad_box.json"]);
    assert_eq!(o.status.code(), Some(1));

    let mut env = read(&d.join("box.json"));
    env["inputs"]["u-max"] = Value::from("1/3");
    std::fs::write(d.join("bad_inputs.json"), serde_json::to_string(&env).unwrap()).unwrap();
    assert_eq!(toral(d, &["verify", "--in", "bad_inputs.json"]).status.code(), Some(1));
}

#[test]
fn witness_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    build_box(d);
    let o = toral(
        d,
        &["witness", "--box", "box.json", "--s-matrix", "1,1,1,2", "--probe", "1/5,2/5", "--no-grid-probes", "--horizon", "500"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(toral(d, &["verify", "--in", "witness.json"]).status.success());
    let mut env = read(&d.join("witness.json"));
    let it = env["payload"]["report"]["visits"][0]["iterate"].as_u64().unwrap();
    env["payload"]["report"]["visits"][0]["iterate"] = Value::from(it + 1);
    std::fs::write(d.join("witness.json"), serde_json::to_string(&env).unwrap()).unwrap();
    let o = toral(d, &["verify", "--in", "witness.json"]);
    assert_eq!(o.status.code(), Some(1));
    let verdict: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(verdict["pass"], false);
}

#[test]
fn render_has_one_layer_per_depth() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    build_box(d);
    let o = toral(d, &["render", "--box", "box.json", "--depth", "3", "--out", "fig.svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(d.join("fig.svg")).unwrap();
    assert!(svg.contains(r#"version="1.1""#));
    assert_eq!(svg.matches(r#"class="tube-layer""#).count(), 4);
    assert!(toral(d, &["verify", "--in", "render.json"]).status.success());
    std::fs::write(d.join("fig.svg"), svg.replace("polygon", "polyline")).unwrap();
    assert_eq!(toral(d, &["verify", "--in", "render.json"]).status.code(), Some(1));
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("run.toml"),
        "out-dir = \"artifacts\"\n[analyze]\nmatrix = \"1,1,1,2\"\n[build-box]\nmatrix = \"2,1,1,1\"\nu-max = \"1/10\"\ny0 = \"1/5,2/5\"\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_toral"))
        .args(["--config", "run.toml", "analyze"])
        .current_dir(d)
        .env_remove("TORAL_OUT_DIR")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let env = read(&d.join("artifacts/analysis.json"));
    assert_eq!(env["payload"]["auto"]["matrix"], serde_json::json!([[1, 1], [1, 2]]));
    // a flag beats the file
    let o = toral(d, &["--config", "run.toml", "analyze", "--matrix", "3,1,2,1", "--out", "x.json"]);
    assert!(o.status.success());
    assert_eq!(read(&d.join("x.json"))["payload"]["auto"]["matrix"], serde_json::json!([[3, 1], [2, 1]]));
    // flags and file give the same inputs, hence the same hash
    let o = toral(d, &["--config", "run.toml", "build-box", "--out", "a.json"]);
    assert!(o.status.success());
    let o = toral(d, &["build-box", "--matrix", "2,1,1,1", "--u-max", "1/10", "--y0", "1/5,2/5", "--out", "b.json"]);
    assert!(o.status.success());
    assert_eq!(read(&d.join("a.json"))["input_hash"], read(&d.join("b.json"))["input_hash"]);
}

#[test]
fn validation_errors_are_actionable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = toral(d, &["analyze"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--matrix"));
    let o = toral(d, &["analyze", "--matrix", "1,1,0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hyperbolic"));
    let o = toral(d, &["build-box", "--matrix", "2,1,1,1", "--u-max", "abc"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(d.join("blocker"), "").unwrap();
    let o = toral(d, &["analyze", "--matrix", "2,1,1,1", "--out", "blocker/a.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = toral(d, &["verify", "--in", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
}
