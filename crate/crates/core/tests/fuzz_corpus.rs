//! Replays the checked-in fuzz corpus through the parser entry points, so
//! regressions on those inputs show up in a plain `cargo test`.

use std::path::PathBuf;

use superinv::harness::{RunConfig, Spec};
use superinv::{Grassmann, Permutation, SuperMatrix, SuperPolynomial, TensorElement};

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus for {target}");
    files.into_iter().map(|p| std::fs::read(p).unwrap()).collect()
}

fn text(data: &[u8]) -> &str {
    std::str::from_utf8(data).unwrap()
}

#[test]
fn grassmann_text() {
    for data in corpus("grassmann_text") {
        let (&b, rest) = data.split_first().unwrap();
        let budget = 1 + b % 12;
        let x = Grassmann::parse(budget, text(rest)).unwrap();
        assert_eq!(Grassmann::parse(budget, &x.to_string()).unwrap(), x);
    }
}

#[test]
fn json_formats_roundtrip() {
    for data in corpus("grassmann_json") {
        let x = Grassmann::parse_json(text(&data)).unwrap();
        assert_eq!(Grassmann::parse_json(&serde_json::to_string(&x.to_json()).unwrap()).unwrap(), x);
    }
    for data in corpus("matrix_json") {
        let m = SuperMatrix::parse_json(text(&data)).unwrap();
        assert_eq!(SuperMatrix::parse_json(&serde_json::to_string(&m.to_json()).unwrap()).unwrap(), m);
    }
    for data in corpus("tensor_json") {
        let t = TensorElement::parse_json(text(&data)).unwrap();
        assert_eq!(TensorElement::parse_json(&serde_json::to_string(&t.to_json()).unwrap()).unwrap(), t);
    }
    for data in corpus("polynomial_json") {
        let p = SuperPolynomial::parse_json(text(&data)).unwrap();
        assert_eq!(SuperPolynomial::parse_json(&serde_json::to_string(&p.to_json()).unwrap()).unwrap(), p);
    }
}

#[test]
fn perm_cycles() {
    for data in corpus("perm_cycles") {
        let (&k, rest) = data.split_first().unwrap();
        let k = usize::from(k % 16);
        let p = Permutation::parse_cycles(text(rest), k).unwrap();
        assert_eq!(Permutation::parse_cycles(&p.to_string(), k).unwrap(), p);
    }
}

#[test]
fn cli_specs() {
    let mut accepted = 0;
    for data in corpus("cli_specs") {
        let f: Vec<&str> = text(&data).split('\n').collect();
        let field = |i: usize| f.get(i).copied().filter(|s| !s.is_empty());
        let spec = Spec {
            dim: field(0).unwrap_or("1,1"),
            shape: field(1).unwrap_or("1:1"),
            mult: field(2).unwrap_or("1"),
            perm: field(3),
            clifford: field(4).and_then(|s| s.parse().ok()),
            eps: field(5),
        };
        if RunConfig::from_spec(&spec).is_ok() {
            accepted += 1;
        }
    }
    // Every seed but the inconsistent-multidegree one is a valid config.
    assert_eq!(accepted, corpus("cli_specs").len() - 1);
}

#[test]
fn hostile_specs_are_rejected_without_panicking() {
    let huge = usize::MAX.to_string();
    let cases = [
        Spec { dim: &format!("{huge},1"), shape: "1:1", mult: "1", ..Default::default() },
        Spec { dim: "1,1", shape: "1:1", mult: &huge, ..Default::default() },
        Spec { dim: "1,1", shape: "16:16,16:16", mult: &format!("{huge},{huge}"), ..Default::default() },
        Spec { dim: "1,1", shape: "1:1", mult: "2", perm: Some("(1 2"), ..Default::default() },
        Spec { dim: "1,1", shape: "1:1", mult: "2", clifford: Some(0), ..Default::default() },
    ];
    for spec in &cases {
        assert!(RunConfig::from_spec(spec).is_err(), "{spec:?}");
    }
}
