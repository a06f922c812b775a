use heisodo::chain::Verdict;
use heisodo::chain_file::ChainSpec;
use heisodo::{bundled, classify, parse_chain, validate_chain};

#[test]
fn every_bundled_chain_validates() {
    for (name, text) in bundled::ALL {
        let spec = parse_chain(text).unwrap_or_else(|e| panic!("{}: {}", name, e));
        let chain = validate_chain(spec.to_triples().unwrap()).unwrap_or_else(|e| panic!("{}: {}", name, e));
        assert!(chain.len() >= 3, "{}", name);
        for pair in chain.stages().windows(2) {
            assert!(pair[1].leq(&pair[0]), "{}", name);
        }
    }
}

#[test]
fn canonical_round_trip() {
    for (name, text) in bundled::ALL {
        let spec = parse_chain(text).unwrap();
        let triples = spec.to_triples().unwrap();
        let written = ChainSpec::from_triples(&spec.name, spec.notes.as_deref(), &triples).to_string();
        let again: ChainSpec = written.parse().unwrap();
        assert_eq!(again.to_triples().unwrap(), triples, "{}", name);
        assert_eq!(again.name, spec.name);
    }
}

#[test]
fn class_names() {
    let expect = [
        ("pure_product.chain", "pure product"),
        ("flat_non_product.chain", "flat, no (x,y)-product witness in prefix"),
        ("xy_product.chain", "(x,y)-product, not flat"),
        ("neither.chain", "not flat, no (x,y)-product witness in prefix"),
    ];
    for ((name, text), (want_name, want)) in bundled::ALL.iter().zip(expect) {
        assert_eq!(*name, want_name);
        let chain = validate_chain(parse_chain(text).unwrap().to_triples().unwrap()).unwrap();
        let report = classify(&chain);
        assert_eq!(report.class_name(), want, "{}", name);
        if report.pure_product.verdict == Verdict::Yes {
            assert_eq!(report.witness.as_ref().map(Vec::len), Some(chain.len()));
        }
    }
}

#[test]
fn deeper_stages_have_larger_index() {
    for (name, text) in bundled::ALL {
        let chain = validate_chain(parse_chain(text).unwrap().to_triples().unwrap()).unwrap();
        let idx: Vec<_> = chain.diagnostics().iter().map(|d| d.index.clone()).collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]), "{}: {:?}", name, idx);
    }
}
