#![no_main]

use libfuzzer_sys::fuzz_target;
use superinv::SuperMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = SuperMatrix::parse_json(text) {
        let _ = m.supertrace();
        let _ = m.is_gl_element();
        let again = serde_json::to_string(&m.to_json()).unwrap();
        assert_eq!(SuperMatrix::parse_json(&again).unwrap(), m);
    }
});
