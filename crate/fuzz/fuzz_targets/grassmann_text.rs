#![no_main]

use libfuzzer_sys::fuzz_target;
use superinv::Grassmann;

// First byte picks the budget; the rest is the expression. Anything that
// parses must print back to the same element.
fuzz_target!(|data: &[u8]| {
    let Some((&b, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let budget = 1 + b % 12;
    if let Ok(x) = Grassmann::parse(budget, text) {
        assert_eq!(Grassmann::parse(budget, &x.to_string()).unwrap(), x);
    }
});
