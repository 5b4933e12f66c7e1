use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_monogamy"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), json)
}

#[test]
fn classical_values() {
    assert_eq!(run(&["value-classical", "--game", "chsh", "--graph", "P4"]).1["omega_graph"], "3/4");
    assert_eq!(run(&["value-classical", "--game", "oc3"]).1["omega_classical"], "5/6");
    assert_eq!(run(&["value-classical", "--game", "chsh", "--graph", "P2"]).1["omega_classical"], "3/4");
}

#[test]
fn quantum_bound() {
    let (code, v) = run(&["bound-quantum", "--game", "chsh", "--graph", "P2", "--level", "1"]);
    assert_eq!(code, 0);
    assert!((v["bound"].as_f64().unwrap() - 0.8535534).abs() < 1e-5);
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["level"], "1");
}

#[test]
fn sos_identities() {
    assert_eq!(run(&["verify-sos", "--identity", "p3"]).1["exact_match"], true);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(&path, r#"{"label": "zero", "target": "0", "squares": []}"#).unwrap();
    let spec = format!("file:{}", path.display());
    assert_eq!(run(&["verify-sos", "--identity", &spec]).1["exact_match"], true);
}

#[test]
fn monogamy_reports() {
    assert_eq!(run(&["monogamy-report", "--game", "oc3", "--max-k", "2"]).1["classification"], "monogamous");
    assert_eq!(run(&["monogamy-report", "--game", "always-win", "--max-k", "2"]).1["classification"], "monogamous");
}

#[test]
fn single_cell_scan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let (code, v) = run(&["scan-region", "--grid", "0:0:1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["feasible"], 1);
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv, "x,y,npa_feasible,inside_quadratic,inside_linear\n0,0,true,true,true\n");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["value-classical", "--game", "no-such-game"]).0, 2);
    assert_eq!(run(&["value-classical", "--game", "chsh", "--cap", "10"]).0, 3);
    assert_eq!(run(&["scan-region", "--graph", "P5", "--out", "/dev/null"]).0, 2);
}
