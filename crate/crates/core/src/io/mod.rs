//! Reading and writing sentence bundles and dataset pairs; idf over a corpus.

mod bundles;
mod idf;
mod pairs;

pub use bundles::{
    bundles_to_string, read_bundles, read_bundles_from, write_bundles, BundleFile, LoadWarning,
    SAM_WARN_TOL,
};
pub(crate) use bundles::write_atomic;
pub use idf::compute_idf;
pub use pairs::{
    pairs_to_string, parse_pairs, read_pairs, write_pairs, DatasetPair, Gold, PairMode, PairsFile,
};
