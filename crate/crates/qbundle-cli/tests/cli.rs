//! End-to-end runs of the `qbundle` binary.

use std::process::{Command, Output};

fn qbundle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbundle"))
        .args(args)
        .env_remove("QBUNDLE_MAX_LEN")
        .env_remove("QBUNDLE_MAX_DEG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn passed_count(o: &Output) -> usize {
    let text = stdout(o);
    let line = text.lines().last().expect("summary line");
    line.split_whitespace()
        .next()
        .and_then(|n| n.parse().ok())
        .expect("pass count")
}

#[test]
fn check_torus_passes_with_many_identities() {
    let o = qbundle(&["check", "torus"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(passed_count(&o) >= 30);
}

#[test]
fn check_hopf_fibration_to_top_degree() {
    let o = qbundle(&["check", "qsu2_hopf", "--max-deg", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn corrupted_rule_file_fails_on_that_relation() {
    let good = stdout(&qbundle(&["export", "torus"]));
    let bad = good.replace("rule du*u -> u*du", "rule du*u -> (q^1)*u*du");
    assert_ne!(good, bad);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.qb");
    std::fs::write(&path, bad).unwrap();
    let o = qbundle(&["check", path.to_str().unwrap(), "--max-len", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let first = stdout(&o)
        .lines()
        .find(|l| l.starts_with("first failure"))
        .unwrap()
        .to_string();
    assert!(first.contains("du*u -> (q^1)*u*du"), "{first}");
}

#[test]
fn exported_file_checks_like_the_catalog_entry() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("group_z.qb");
    std::fs::write(&path, stdout(&qbundle(&["export", "group_z"]))).unwrap();
    let from_file = qbundle(&["check", path.to_str().unwrap(), "--format", "json"]);
    let from_catalog = qbundle(&["check", "group_z", "--format", "json"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_catalog.stdout);
}

#[test]
fn reports_are_byte_identical_and_written_twice() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(
        qbundle(&["check", "group_z", "--report", a.to_str().unwrap()])
            .status
            .success()
    );
    assert!(
        qbundle(&["check", "group_z", "--report", b.to_str().unwrap()])
            .status
            .success()
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(dir.path().join("a.txt")).unwrap();
    assert!(text.contains("[PASS]"));
}

#[test]
fn single_results() {
    let run = |args: &[&str]| stdout(&qbundle(args)).trim().to_string();
    assert_eq!(run(&["nf", "torus", "v*u"]), "(l^1)*u*v");
    assert_eq!(run(&["d", "torus", "u*v"]), "u*dv + (l^-1)*v*du");
    assert_eq!(run(&["wedge", "group_z", "q^-1*g*d(g)", "d(g)"]), "0");
    assert_eq!(run(&["coact", "torus", "u*v"]), "(u*v | 1)");
    assert_eq!(run(&["coact", "qsu2_hopf", "ep"]), "(ep | t*t)");
    assert_eq!(run(&["piver", "torus", "du"]), "(u | w)");
    let base = run(&["base", "torus", "1", "--max-len", "2"]);
    assert!(base.starts_with("# 2 base forms"), "{base}");
}

#[test]
fn bad_input_is_rejected_before_work() {
    let o = qbundle(&["check", "torus", "--max-len", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qbundle(&["check", "no_such_example"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown example"));
    let o = qbundle(&["nf", "torus", "u*"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qbundle(&["check", "/nonexistent/file.qb"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/file.qb"));
}

#[test]
fn bounds_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qbundle"))
        .args(["base", "torus", "1"])
        .env("QBUNDLE_MAX_LEN", "2")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("at most 2 letters"), "{}", stdout(&o));
}
