//! Finite-index subgroups of the discrete Heisenberg group, odometer chains
//! built from them, and the discrete spectrum of the resulting actions.

pub mod chain;
pub mod chain_file;
pub mod coset_sim;
pub mod group;
pub mod heis_spectrum;
pub mod int;
pub mod lattice;
pub mod subgroup;
pub mod zd_spectrum;

pub use chain::{classify, validate_chain, ClassificationReport, OdometerChain, Verdict};
pub use chain_file::{parse_chain, ChainSpec};
pub use coset_sim::CosetSpace;
pub use group::GroupElement;
pub use heis_spectrum::{IrrepClass, SpectralTriple};
pub use lattice::{IntMatrix, LatticeBasis};
pub use subgroup::SubgroupTriple;
pub use zd_spectrum::{EigenPair, Phase};

/// Chain files shipped with the crate, one per classification outcome.
pub mod bundled {
    pub const PURE_PRODUCT: &str = include_str!("../chains/pure_product.chain");
    pub const FLAT_NON_PRODUCT: &str = include_str!("../chains/flat_non_product.chain");
    pub const XY_PRODUCT: &str = include_str!("../chains/xy_product.chain");
    pub const NEITHER: &str = include_str!("../chains/neither.chain");

    /// `(file name, contents)` for every bundled chain.
    pub const ALL: [(&str, &str); 4] = [
        ("pure_product.chain", PURE_PRODUCT),
        ("flat_non_product.chain", FLAT_NON_PRODUCT),
        ("xy_product.chain", XY_PRODUCT),
        ("neither.chain", NEITHER),
    ];
}
