#![no_main]

use libfuzzer_sys::fuzz_target;
use superinv::harness::{RunConfig, Spec};

// Newline-separated fields: dim, shape, mult, perm, clifford, eps.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let f: Vec<&str> = text.split('\n').collect();
    let field = |i: usize| f.get(i).copied().filter(|s| !s.is_empty());
    let spec = Spec {
        dim: field(0).unwrap_or("1,1"),
        shape: field(1).unwrap_or("1:1"),
        mult: field(2).unwrap_or("1"),
        perm: field(3),
        clifford: field(4).and_then(|s| s.parse().ok()),
        eps: field(5),
    };
    if let Ok(cfg) = RunConfig::from_spec(&spec) {
        assert_eq!(cfg.sigma.len(), cfg.n());
    }
});
