#![no_main]

use libfuzzer_sys::fuzz_target;
use superinv::Grassmann;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(x) = Grassmann::parse_json(text) {
        let again = serde_json::to_string(&x.to_json()).unwrap();
        assert_eq!(Grassmann::parse_json(&again).unwrap(), x);
    }
});
