#![no_main]

use libfuzzer_sys::fuzz_target;
use superinv::Permutation;

fuzz_target!(|data: &[u8]| {
    let Some((&k, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let k = usize::from(k % 16);
    if let Ok(p) = Permutation::parse_cycles(text, k) {
        assert_eq!(p.len(), k);
        assert_eq!(Permutation::parse_cycles(&p.to_string(), k).unwrap(), p);
    }
});
