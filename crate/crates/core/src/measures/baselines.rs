//! Non-transport baselines: bag-of-words and mean-embedding cosine similarity.

use std::collections::BTreeMap;

use ndarray::Array1;

use super::SentenceBundle;

/// A cosine similarity. `zero_vector` is set when one side was the zero
/// vector, in which case `value` is 0 by convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineScore {
    pub value: f64,
    pub zero_vector: bool,
}

fn cosine(x: &Array1<f64>, y: &Array1<f64>) -> CosineScore {
    let (nx, ny) = (x.dot(x).sqrt(), y.dot(y).sqrt());
    if nx == 0.0 || ny == 0.0 {
        return CosineScore {
            value: 0.0,
            zero_vector: true,
        };
    }
    CosineScore {
        value: (x.dot(y) / (nx * ny)).clamp(-1.0, 1.0),
        zero_vector: false,
    }
}

/// Cosine similarity of token-frequency vectors over the union vocabulary.
pub fn bow_similarity(a: &SentenceBundle, b: &SentenceBundle) -> CosineScore {
    let mut counts: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for t in a.tokens() {
        counts.entry(t).or_default().0 += 1.0;
    }
    for t in b.tokens() {
        counts.entry(t).or_default().1 += 1.0;
    }
    let x: Array1<f64> = counts.values().map(|c| c.0).collect();
    let y: Array1<f64> = counts.values().map(|c| c.1).collect();
    cosine(&x, &y)
}

/// Cosine similarity of the mean embedding rows.
pub fn sent_emb_similarity(a: &SentenceBundle, b: &SentenceBundle) -> CosineScore {
    let mean = |s: &SentenceBundle| s.embeddings().mean_axis(ndarray::Axis(0)).expect("non-empty");
    cosine(&mean(a), &mean(b))
}
