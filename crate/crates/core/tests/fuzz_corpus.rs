//! Replays the checked-in fuzz corpus through the same calls as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use heisodo::chain_file::{parse_chain, ChainSpec};
use heisodo::{classify, validate_chain};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn parse_seeds_round_trip() {
    for (name, text) in seeds("fuzz_chain_parse") {
        if let Ok(spec) = parse_chain(&text) {
            let again: ChainSpec = spec.to_string().parse().unwrap_or_else(|e| panic!("{}: {}", name, e));
            assert_eq!(again, spec, "{}", name);
        }
    }
}

#[test]
fn pipeline_seeds_run() {
    let mut classified = 0;
    for (_, text) in seeds("fuzz_chain_pipeline") {
        let Ok(spec) = parse_chain(&text) else { continue };
        let Ok(triples) = spec.to_triples() else { continue };
        if let Ok(chain) = validate_chain(triples) {
            assert!(!classify(&chain).class_name().is_empty());
            classified += 1;
        }
    }
    assert_eq!(classified, 4);
}
