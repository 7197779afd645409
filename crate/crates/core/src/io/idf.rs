use std::collections::{BTreeMap, BTreeSet};

use crate::measures::{IdfTable, SentenceBundle};

/// Smoothed sentence-level idf: `ln((1 + N) / (1 + df(t))) + 1`, where `N`
/// is the number of sentences and `df(t)` the number containing `t`.
pub fn compute_idf<'a>(bundles: impl IntoIterator<Item = &'a SentenceBundle>) -> IdfTable {
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    let mut sentences = 0usize;
    for b in bundles {
        sentences += 1;
        let unique: BTreeSet<&str> = b.tokens().iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t.to_string()).or_default() += 1;
        }
    }
    let n = sentences as f64;
    let values = df
        .into_iter()
        .map(|(t, d)| (t, ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0))
        .collect();
    IdfTable::new(values).expect("smoothed idf is always positive")
}
