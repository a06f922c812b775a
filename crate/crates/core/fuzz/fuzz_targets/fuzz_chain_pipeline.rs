#![no_main]

use heisodo::chain_file::parse_chain;
use heisodo::{classify, validate_chain};
use libfuzzer_sys::fuzz_target;
use num_bigint::BigInt;

const MAX_STAGES: usize = 6;
const MAX_BITS: u64 = 64;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = parse_chain(text) else {
        return;
    };
    let small = |v: &BigInt| v.bits() <= MAX_BITS;
    if spec.stages.len() > MAX_STAGES
        || !spec
            .stages
            .iter()
            .all(|s| small(&s.m) && s.a.iter().flatten().all(small) && s.i.iter().all(small))
    {
        return;
    }
    let Ok(triples) = spec.to_triples() else {
        return;
    };
    if let Ok(chain) = validate_chain(triples) {
        let report = classify(&chain);
        assert!(!report.class_name().is_empty());
    }
});
