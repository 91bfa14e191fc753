use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cocycle-lab");

const WEYL: &str = r#"{"dim_h":1,"dim_k":1,"A":[[[-0.5,0]]],"B":[[[-1,0]]],"C":[[[1,0]]],"D":[[[1,0]]]}"#;
const PROJECTION: &str = r#"{"dim_h":1,"dim_k":1,"A":[[[-1,0]]],"B":[[[1,0]]],"C":[[[1,0]]],"D":[[[0,0]]]}"#;
const TILTED: &str = r#"{"dim_h":2,"dim_k":1,
  "A":[[[0,0],[0,0]],[[0,0],[0,0]]],"B":[[[0,0],[0,0]],[[0,0],[0,0]]],
  "C":[[[0,0],[0,0]],[[0,0],[0,0]]],
  "D":[[[0.7071067811865476,0],[0,0]],[[0.7071067811865476,0],[0,0]]]}"#;

fn fixture(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cocycle-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("COCYCLE_LAB_TOL").output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_weyl() {
    let p = fixture("weyl.json", WEYL);
    let out = run(&["classify", "--input", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["unitary"]["verdict"], true);
    assert_eq!(v["self_adjoint"]["verdict"], false);
}

#[test]
fn power_half_fixes_projection() {
    let p = fixture("projection.json", PROJECTION);
    let out = run(&["power", "--input", p.to_str().unwrap(), "--alpha", "0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let g = &json(&out)["generator"];
    let expect = [("A", -1.0), ("B", 1.0), ("C", 1.0), ("D", 0.0)];
    for (block, value) in expect {
        let re = g[block][0][0][0].as_f64().unwrap();
        let im = g[block][0][0][1].as_f64().unwrap();
        assert!((re - value).abs() <= 1e-12 && im.abs() <= 1e-12, "{block}: {re}+{im}i");
    }
}

#[test]
fn tilted_projection_fails_at_level_two() {
    let p = fixture("tilted.json", TILTED);
    let out = run(&["gauge", "--input", p.to_str().unwrap(), "--n-max", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["first_failure"], 2);
}

#[test]
fn foreign_flag_is_usage_error() {
    let p = fixture("weyl-flag.json", WEYL);
    let out = run(&["classify", "--input", p.to_str().unwrap(), "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
}

#[test]
fn malformed_input_is_usage_error() {
    let p = fixture("broken.json", r#"{"dim_h":1,"dim_k":1,"A":[[[0,0]]]}"#);
    let out = run(&["classify", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim_end().lines().count(), 1);

    let missing = run(&["classify", "--input", "/nonexistent/generator.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn non_positive_power_input_is_claim_failure() {
    let p = fixture("weyl-power.json", WEYL);
    let out = run(&["power", "--input", p.to_str().unwrap(), "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_tolerance_env_is_usage_error() {
    let out = Command::new(BIN)
        .args(["verify", "--trials", "1"])
        .env("COCYCLE_LAB_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tolerance_env_is_reported() {
    let out = Command::new(BIN)
        .args(["verify", "--trials", "0", "--format", "json"])
        .env("COCYCLE_LAB_TOL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tol"], 1e-8);
}

#[test]
fn verify_is_deterministic() {
    let a = run(&["verify", "--seed", "11", "--trials", "5", "--format", "json"]);
    let b = run(&["verify", "--seed", "11", "--trials", "5", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_with_no_trials_passes() {
    let out = run(&["verify", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all suites pass"));
}

#[test]
fn matelem_writes_output_file() {
    let input = format!(
        r#"{{"generator":{WEYL},"f":{{"segments":[{{"dt":1.0,"value":[[0.5,0]]}}]}},"g":{{"segments":[{{"dt":1.0,"value":[[0.25,0]]}}]}}}}"#
    );
    let p = fixture("matelem.json", &input);
    let dest = p.with_file_name("matelem-out.json");
    let out = run(&[
        "matelem",
        "--input",
        p.to_str().unwrap(),
        "--order",
        "right",
        "--format",
        "json",
        "--output",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dest).unwrap()).unwrap();
    // exp(t(-1/2 - d + c̄ + c̄d)) with c = 0.5, d = 0.25, t = 1
    let expect = (-0.5f64 - 0.25 + 0.5 + 0.125).exp();
    let got = v["matrix"][0][0][0].as_f64().unwrap();
    assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
