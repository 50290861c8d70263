use std::process::{Command, Output};

use superinv::polyring::SuperPolynomial;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superinv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn gen_supertrace() {
    let o = run(&["gen", "--dim", "1,1", "--shape", "1:1", "--mult", "1", "--perm", "(1)"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let p = SuperPolynomial::parse_json(&stdout(&o)).unwrap();
    assert_eq!(p.to_string(), "T(1)^{1}_{1} - T(1)^{2}_{2}");
}

#[test]
fn gen_latex_and_diagram() {
    let o = run(&["gen", "--mult", "2", "--perm", "(1 2)", "--latex"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("T^{(1)}"));
    let o = run(&["gen", "--mult", "2", "--perm", "(1 2)", "--diagram"]);
    assert_eq!(stdout(&o), "[1:T(1)] --> [2:T(1)]\n[2:T(1)] --> [1:T(1)]\n");
}

#[test]
fn both_routes_agree() {
    for args in [
        vec!["--dim", "1,1", "--mult", "3", "--perm", "(1 2 3)"],
        vec!["--dim", "2,1", "--shape", "1:2,1:0", "--mult", "1,1", "--perm", "(1 2)"],
        vec!["--dim", "2,1", "--shape", "2:1,0:1", "--mult", "1,1"],
        vec!["--dim", "1,1", "--shape", "1:1,1:1", "--mult", "1,2", "--perm", "(1 3)"],
        vec!["--dim", "2,2", "--mult", "2", "--clifford", "2"],
    ] {
        let mut full = vec!["gen", "--route", "both"];
        full.extend(&args);
        let o = run(&full);
        assert!(o.status.success(), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("routes agree"));
    }
}

#[test]
fn literal_reading_reports_difference() {
    let o = run(&["gen", "--route", "both", "--reading", "literal", "--dim", "2,2", "--mult", "1", "--clifford", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("composed − formula"));
}

#[test]
fn inconsistent_multidegree_exits_2() {
    let o = run(&["gen", "--shape", "1:2", "--mult", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no invariants: Σmᵢbᵢ ≠ Σmᵢtᵢ"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["gen", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--perm", "(1 2)"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--dim", "2,1", "--clifford", "1"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--clifford", "1", "--eps", "1"]).status.code(), Some(2));
}

#[test]
fn verify_defaults_pass() {
    let o = run(&["verify", "--dim", "2,1", "--shape", "1:1,1:1", "--mult", "1,1", "--perm", "(1 2)"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS: 20 trials"));
    assert!(stderr(&o).contains("elapsed"));
}

#[test]
fn clifford_invariant_under_gl_fails_with_witness() {
    let o = run(&["verify", "--clifford", "1", "--group", "gl", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("seed 0: value"));
    let o = run(&["verify", "--clifford", "1", "--group", "q", "--trials", "5"]);
    assert!(o.status.success());
}

#[test]
fn zero_trials_is_vacuous() {
    let o = run(&["verify", "--trials", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("vacuous"));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["verify", "--json", "--mult", "2", "--perm", "(1 2)", "--clifford", "1", "--trials", "8"];
    let a = run(&args);
    let b = run(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_superinv")).args(args).env("SUPERINV_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["trials"], 8);
}

#[test]
fn duality_cases() {
    for group in ["gl", "q"] {
        let o = run(&["duality", "--dim", "1,1", "--k", "2", "--group", group]);
        assert!(o.status.success());
        assert!(stdout(&o).starts_with("spans agree"));
    }
    let o = run(&["duality", "--dim", "2,2", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("limited"));
}

#[test]
fn eval_of_saved_polynomial_matches_generated() {
    let gen_args = ["--dim", "2,1", "--mult", "2", "--perm", "(1 2)", "--seed", "5"];
    let o = run(&[&["gen"][..], &gen_args].concat());
    let dir = std::env::temp_dir().join(format!("superinv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("psi.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let a = run(&[&["eval"][..], &gen_args].concat());
    let b = run(&["eval", "--poly", path.to_str().unwrap(), "--seed", "5"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn trace_matches_invariant() {
    for args in [
        vec!["--shape", "1:1,1:1", "--mult", "2,1", "--perm", "(1 2 3)", "--dim", "2,1"],
        vec!["--shape", "1:1", "--mult", "3", "--perm", "(1 2 3)", "--dim", "1,1", "--eps", "111"],
    ] {
        let o = run(&[&["trace"][..], &args].concat());
        assert!(o.status.success(), "{}", stdout(&o));
        assert!(stdout(&o).ends_with("match\n"));
    }
}
