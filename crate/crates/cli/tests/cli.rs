use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn circuit(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../circuits").join(name)
}

fn fprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fprop")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn pqe_stuck_at_gives_false_property() {
    let toy = circuit("toy1.net");
    let o = fprop(&["pqe", arg(&toy), "--gate", "g1", "--sa", "0", "--oracle-check"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["solution"]["termination"], "complete");
    assert_eq!(v["solution"]["certificate_checked"], true);
    assert_eq!(v["property"]["status"], "false");
    assert_eq!(v["solution"]["clauses"], serde_json::json!([["x3", "!z"]]));
}

#[test]
fn clause_budget_exits_3_with_partial_property() {
    let toy = circuit("toy1.net");
    let o = fprop(&["pqe", arg(&toy), "--gate", "g1", "--sa", "0", "--clause-budget", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["property"]["partial"], true);
}

#[test]
fn seeded_bug_exits_1() {
    let o = fprop(&[
        "compset",
        arg(&circuit("toy1_bug.net")),
        "--golden",
        arg(&circuit("toy1.net")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!json(&o)["tst"].is_null());
}

#[test]
fn compset_clean_circuit_exits_0() {
    let o = fprop(&["compset", arg(&circuit("toy1.net")), "--policy", "all-stuck-at"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["gates"].as_array().unwrap().len(), 2);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.net");
    assert_eq!(fprop(&["encode", arg(&missing)]).status.code(), Some(2));

    let bad = dir.path().join("bad.net");
    std::fs::write(&bad, "input a; y = FOO(a); output y;").unwrap();
    let o = fprop(&["encode", arg(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let toy = circuit("toy1.net");
    assert_eq!(fprop(&["pqe", arg(&toy), "--gate", "nope", "--sa", "0"]).status.code(), Some(2));
}

#[test]
fn encode_writes_dimacs_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("and1.cnf");
    let o = fprop(&["encode", arg(&circuit("and1.net")), "-o", arg(&out)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().find(|l| l.starts_with("p cnf")).unwrap();
    assert_eq!(header, "p cnf 3 3");
}

#[test]
fn mutate_lists_every_gate_subst() {
    let o = fprop(&["mutate", arg(&circuit("and1.net")), "--policy", "all-gate-subst"]);
    assert!(o.status.success());
    let v = json(&o);
    let labels: Vec<&str> = v.as_array().unwrap().iter().map(|m| m["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"g1:subst:OR"));
    assert!(!labels.contains(&"g1:subst:AND"));
}

#[test]
fn atpg_all_faults_detects_every_toy_fault() {
    let o = fprop(&["atpg", arg(&circuit("toy1.net")), "--all-faults"]);
    assert!(o.status.success());
    let v = json(&o);
    let faults = v.as_array().unwrap();
    assert_eq!(faults.len(), 4);
    assert!(faults.iter().all(|f| f["status"] == "detected"));
}

#[test]
fn reach_counter() {
    let o = fprop(&["reach", arg(&circuit("counter3.net"))]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["diameter"], 2);
}

#[test]
fn unroll_and_seq_compset() {
    let toggle = circuit("toggle.net");
    let o = fprop(&["unroll", arg(&toggle), "--frames", "2"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("p cnf"));

    let o = fprop(&["seq-compset", arg(&circuit("counter3.net")), "--frames", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn selftest_passes() {
    let o = fprop(&["selftest", "--rounds", "6", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
}
