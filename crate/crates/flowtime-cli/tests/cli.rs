use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flowtime-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn flowtime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowtime")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_then_verify_fix2() {
    let inst = fixture("fix2.fot");
    let result = scratch("fix2.json");
    let out = flowtime(&["solve", inst.to_str().unwrap(), "--out", result.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(json["value"], 3);
    assert_eq!(json["cost"], 0);
    let out = flowtime(&["verify", inst.to_str().unwrap(), result.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_rejects_a_tampered_result() {
    let inst = fixture("fix2.fot");
    let result = scratch("fix2-tampered.json");
    let out = flowtime(&["solve", inst.to_str().unwrap(), "--out", result.to_str().unwrap()]);
    assert!(out.status.success());
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
    json["cost"] = serde_json::json!(-1);
    fs::write(&result, json.to_string()).unwrap();
    let out = flowtime(&["verify", inst.to_str().unwrap(), result.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_matches_fixtures() {
    for (name, value, cost) in [("fix1.fot", 6, 18), ("fix2.fot", 3, 0), ("fix3.fot", 5, -9)] {
        let out = flowtime(&["oracle", fixture(name).to_str().unwrap()]);
        assert!(out.status.success());
        assert_eq!(stdout(&out), format!("value {value}\ncost {cost}\n"), "{name}");
    }
}

#[test]
fn threshold_of_the_unit_arc() {
    let out = flowtime(&["threshold", fixture("unit-arc-325.fot").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("theta_threshold = 324\n"), "{text}");
    assert!(text.contains("guaranteed_length(theta=325) = 235\n"), "{text}");
}

#[test]
fn expand_counts_fix1() {
    let out = flowtime(&["expand", fixture("fix1.fot").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("ten nodes = 10\n"), "{text}");
    assert!(text.contains("ten arcs = 11\n"), "{text}");
}

#[test]
fn gen_is_deterministic_and_solvable() {
    let args = ["gen", "--nodes", "5", "--arcs", "8", "--seed", "42", "--theta", "12"];
    let a = flowtime(&args);
    let b = flowtime(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("c gen nodes=5 arcs=8"));
    assert!(text.contains("c st-connected yes\n"));
    let path = scratch("gen42.fot");
    fs::write(&path, &text).unwrap();
    let out = flowtime(&["solve", path.to_str().unwrap(), "--out", scratch("gen42.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unreadable_input_is_a_usage_error() {
    let bad = scratch("bad.fot");
    fs::write(&bad, "p fot 2 1\nthis is not an instance\n").unwrap();
    assert_eq!(flowtime(&["solve", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(flowtime(&["threshold", "/nonexistent/x.fot"]).status.code(), Some(2));
    assert_eq!(flowtime(&["solve"]).status.code(), Some(2));
}
