use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use spectrakit_cli::{execute, EXIT_NUMERICAL, EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_UNDECIDED};

const IDENTITY: &str = r#"{"scalar": {"re": 1, "im": 0}}"#;
const K_MINUS: &str = r#"{"scalar": {"re": 1}, "tail": {"terms": [{"c": -1, "r": 1, "p": 1}]}}"#;
const SWAP: &str = r#"{"scalar": {"re": 0}, "block": {"n": 2, "entries": [{"re": 0}, {"re": 1}, {"re": 1}, {"re": 0}]}}"#;
const INV_SQ: &str = r#"{"scalar": {"re": 1}, "tail": {"terms": [{"c": -1, "r": 1, "p": 2}]}}"#;
const DIAG_POS: &str = r#"{"scalar": {"re": 0}, "block": {"n": 1, "entries": [{"re": 1}]}}"#;
const DIAG_NEG: &str = r#"{"scalar": {"re": 0}, "block": {"n": 1, "entries": [{"re": -1}]}}"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["spectrakit"];
    full.extend_from_slice(args);
    let (code, text) = execute(full);
    (code, serde_json::from_str(&text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}")))
}

fn num(v: &Value, path: &str) -> f64 {
    v.pointer(path).and_then(Value::as_f64).unwrap_or_else(|| panic!("missing {path} in {v}"))
}

#[test]
fn analyze_identity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "identity.json", IDENTITY);
    let (code, v) = run(&["analyze", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(num(&v, "/results/norm/norm/value"), 1.0);
    assert_eq!(num(&v, "/results/min_modulus/value"), 1.0);
    assert_eq!(num(&v, "/results/essential_min_modulus/value"), 1.0);
    assert_eq!(v.pointer("/results/an_verdict").unwrap(), "in_an");
    assert_eq!(v.pointer("/results/classification/positive").unwrap(), true);
    assert_eq!(v.pointer("/inputs/0/sha256").unwrap().as_str().unwrap().len(), 64);
}

#[test]
fn an_check_k_minus() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "k_minus.json", K_MINUS);
    let (code, v) = run(&["an-check", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v.pointer("/results/verdict").unwrap(), "not_an");
    assert_eq!(v.pointer("/results/reason").unwrap(), "InfinitelyManyBelowEssential");
    assert_eq!(v.pointer("/results/offending").unwrap().as_array().unwrap().len(), 8);
}

#[test]
fn an_check_triple_reassembles() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "inv_sq.json", r#"{"scalar": {"re": 2}, "block": {"n": 1, "entries": [{"re": -1.5}]}, "tail": {"terms": [{"c": 1, "r": 0.5, "p": 0}]}}"#);
    let (code, v) = run(&["an-check", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v.pointer("/results/verdict").unwrap(), "in_an");
    assert_eq!(num(&v, "/results/triple/alpha/value"), 2.0);
    assert!(num(&v, "/results/triple/reassembly_error/value") <= 1e-12);
    assert!(num(&v, "/results/triple/kf_norm/value") <= 1e-12);
}

#[test]
fn commutator_modes() {
    let dir = tempfile::tempdir().unwrap();
    let swap = write(dir.path(), "swap.json", SWAP);
    let (code, v) = run(&["commutator", "--single", swap.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!((num(&v, "/results/achieved/value") - 2.0).abs() < 1e-9);
    assert_eq!(num(&v, "/results/target/value"), 2.0);

    let p = write(dir.path(), "p.json", DIAG_POS);
    let n = write(dir.path(), "n.json", DIAG_NEG);
    let (code, v) = run(&["commutator", "--pair", p.to_str().unwrap(), n.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert!((num(&v, "/results/achieved/value") - 2.0).abs() < 1e-9);

    let (code, v) = run(&["commutator", "--sandwich", swap.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert!((num(&v, "/results/achieved/value") - 1.0).abs() < 1e-9);
}

#[test]
fn pair_phase_mismatch_is_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIAG_POS);
    let (code, v) = run(&["commutator", "--pair", p.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(code, EXIT_PRECONDITION);
    assert_eq!(v.pointer("/error/kind").unwrap(), "precondition");
}

#[test]
fn commutator_needs_a_mode() {
    let (code, text) = execute(["spectrakit", "commutator"]);
    assert_eq!(code, EXIT_PARSE);
    assert!(text.contains("--single"));
}

#[test]
fn attainify_inverse_square() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "inv_sq.json", INV_SQ);
    let (code, v) = run(&["attainify", f.to_str().unwrap(), "--alpha", "0.1"]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert_eq!(v.pointer("/results/n_star").unwrap(), 5);
    assert!((num(&v, "/results/distance/value") - 0.04).abs() < 1e-15);
    assert_eq!(num(&v, "/results/norm_preserved/value"), 1.0);
    assert_eq!(num(&v, "/results/beta_achieved/re"), 1.0);
}

#[test]
fn attainify_rejects_beta_off_essential_point() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "inv_sq.json", INV_SQ);
    let (code, v) = run(&["attainify", f.to_str().unwrap(), "--alpha", "0.1", "--beta", "-1,0"]);
    assert_eq!(code, EXIT_PRECONDITION);
    assert!(v.pointer("/error/message").unwrap().as_str().unwrap().contains("essential"));
}

#[test]
fn oracle_compare_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "k.json", K_MINUS);
    let (code, v) = run(&["oracle-compare", f.to_str().unwrap(), "--dim", "40", "--seed", "7"]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert_eq!(v.pointer("/results/consistent").unwrap(), true);
    assert_eq!(v.pointer("/results/uncovered_eigenvalues").unwrap(), 0);
    assert_eq!(num(&v, "/tolerances/seed"), 7.0);
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", r#"{"scalar": {"re": 0}, "tail": {"terms": [{"c": 1, "r": 0, "p": 1}]}}"#);
    let (code, v) = run(&["analyze", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_PARSE);
    assert!(v.pointer("/error/message").unwrap().as_str().unwrap().contains("tail.terms[0].r"));
    let (code, _) = run(&["analyze", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, EXIT_PARSE);
}

#[test]
fn strict_undecided_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    // the positive term dominates only from around n = 1e30
    let f = write(dir.path(), "u.json", r#"{"scalar": {"re": 1}, "tail": {"terms": [{"c": 0.001, "r": 1, "p": 0.5}, {"c": -1, "r": 1, "p": 0.6}]}}"#);
    let (code, v) = run(&["an-check", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v.pointer("/results/verdict").unwrap(), "undecided");
    let (code, v) = run(&["an-check", "--strict", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_UNDECIDED);
    assert_eq!(v.pointer("/results/verdict").unwrap(), "undecided");
}

#[test]
fn json_output_is_written_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "swap.json", SWAP);
    let out = dir.path().join("out.json");
    let args = ["analyze", f.to_str().unwrap(), "--json", out.to_str().unwrap(), "--seed", "3"];
    let (_, first) = execute(std::iter::once("spectrakit").chain(args));
    let a = fs::read_to_string(&out).unwrap();
    let (_, second) = execute(std::iter::once("spectrakit").chain(args));
    assert_eq!(a, first);
    assert_eq!(first, second);
}

#[test]
fn suite_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [("identity.json", IDENTITY), ("k.json", K_MINUS), ("swap.json", SWAP), ("sq.json", INV_SQ)] {
        write(dir.path(), name, text);
    }
    let (code, v) = run(&["suite", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert_eq!(num(&v, "/results/passed"), 4.0);
    for stem in ["identity", "k", "swap", "sq"] {
        let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join(format!("{stem}.report.json"))).unwrap()).unwrap();
        assert!(r.pointer("/results/analyze").is_some());
        assert!(r.pointer("/results/oracle/consistent").unwrap().as_bool().unwrap());
    }
    // reports are skipped as inputs on a rerun
    let (code, again) = run(&["suite", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v, again);
}

#[test]
fn suite_flags_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", IDENTITY);
    write(dir.path(), "b.json", "not json");
    let (code, v) = run(&["suite", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_PARSE);
    assert_eq!(num(&v, "/results/failed"), 1.0);
    assert_eq!(v.pointer("/results/files/1/status").unwrap(), "error");
}

#[test]
fn tight_tolerance_exceeded_bounds_fail_suite() {
    let dir = tempfile::tempdir().unwrap();
    // rounding-level bounds exceed an absurdly small tolerance
    write(dir.path(), "h.json", r#"{"scalar": {"re": 0}, "block": {"n": 3, "entries": [{"re": 2}, {"re": 1}, {"re": 0.3}, {"re": 1}, {"re": 3}, {"re": 0.7}, {"re": 0.3}, {"re": 0.7}, {"re": 1}]}}"#);
    let (code, v) = run(&["suite", dir.path().to_str().unwrap(), "--tol", "1e-300"]);
    assert_eq!(code, EXIT_NUMERICAL);
    assert_eq!(v.pointer("/results/files/0/status").unwrap(), "bound_exceeded");
    assert!(!v.pointer("/results/files/0/bound_violations").unwrap().as_array().unwrap().is_empty());
    let (code, _) = run(&["suite", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn binary_exit_codes_and_env_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "identity.json", IDENTITY);
    let bin = env!("CARGO_BIN_EXE_spectrakit");
    let out = Command::new(bin).args(["analyze", f.to_str().unwrap()]).env("SPECTRAKIT_TOL", "1e-6").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(num(&v, "/tolerances/tol"), 1e-6);
    let bad = write(dir.path(), "bad.json", "{");
    let out = Command::new(bin).args(["analyze", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.pointer("/error/kind").unwrap(), "parse");
}
