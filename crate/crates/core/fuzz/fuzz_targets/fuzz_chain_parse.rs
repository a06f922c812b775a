#![no_main]

use heisodo::chain_file::{parse_chain, ChainSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = parse_chain(text) {
        // Written specs parse back to themselves.
        let again: ChainSpec = spec.to_string().parse().expect("written spec parses");
        assert_eq!(again, spec);
    }
});
