#![no_main]

use libfuzzer_sys::fuzz_target;
use superinv::SuperPolynomial;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = SuperPolynomial::parse_json(text) {
        let _ = p.to_latex();
        let again = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(SuperPolynomial::parse_json(&again).unwrap(), p);
    }
});
