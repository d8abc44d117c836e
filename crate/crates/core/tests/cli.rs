use std::process::Command;

fn tmotive(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_tmotive")).args(args).output().unwrap()
}

#[test]
fn periods_summary_and_exit_code() {
    let out = tmotive(&["periods", "--q", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] periods / v(pi2) = -q^2/(q^2-1): -9/8 vs -9/8"));
    assert!(text.ends_with("\n") && text.contains("periods: PASS"));
}

#[test]
fn json_report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = tmotive(&["eliminate", "--order", "4", "--seed", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], "tmotive-report/1");
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["order"], 4);
    assert_eq!(v["passed"], true);
    assert!(v["certified_precision"].is_string());
    assert!(v["assertions"].as_array().unwrap().len() >= 62);
}

#[test]
fn failing_assertion_gives_nonzero_exit() {
    // a large parameter is outside the region where the kernel is solved
    let out = tmotive(&["siegel", "--motive", "ma", "--a", "t^(-4)"]);
    assert!(!out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[FAIL]"));
}

#[test]
fn explicit_iso_and_dual_checks() {
    let out = tmotive(&["iso-check", "--a", "1", "--a2", "w", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"][0]["isomorphic"], true);
    let out = tmotive(&["dual-check", "--q", "3", "--s11", "pi1", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"][0]["verdict"]["is_lattice"], true);
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(!tmotive(&["periods", "--q", "6"]).status.success());
    assert!(!tmotive(&["nonsense"]).status.success());
}
