#![no_main]

use libfuzzer_sys::fuzz_target;
use superinv::TensorElement;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = TensorElement::parse_json(text) {
        let again = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(TensorElement::parse_json(&again).unwrap(), t);
    }
});
