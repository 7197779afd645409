//! Synthetic paraphrase data where word order carries the label.
//!
//! Every pair consists of two sentences over the same multiset of words in
//! different orders, so bag-of-words style measures cannot tell the classes
//! apart. Each sentence has an attention matrix tied to the roles of its
//! words. In a positive pair the second sentence's attention is the first
//! one's carried along with the reordering (same structure). In a negative
//! pair two words additionally swap roles, the way "the press greets the
//! president" swaps subject and object relative to "the president greets
//! the press".

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::io::{BundleFile, DatasetPair, Gold, PairMode, PairsFile};
use crate::measures::SentenceBundle;

#[derive(Debug, Clone)]
pub struct OrderFlipConfig {
    pub pairs: usize,
    pub vocabulary: usize,
    pub dim: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Uniform half-width of per-token embedding noise.
    pub embedding_noise: f64,
    /// Relative multiplicative noise on attention entries.
    pub attention_noise: f64,
    /// Spread of the attention logits; larger means more peaked rows.
    pub attention_sharpness: f64,
    pub seed: u64,
}

impl Default for OrderFlipConfig {
    fn default() -> Self {
        OrderFlipConfig {
            pairs: 200,
            vocabulary: 80,
            dim: 16,
            min_len: 5,
            max_len: 8,
            embedding_noise: 0.05,
            attention_noise: 0.05,
            attention_sharpness: 2.0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub bundles: BundleFile,
    pub pairs: PairsFile,
}

/// Builds `cfg.pairs` pairs, alternating positive (even index) and negative.
pub fn order_flip_dataset(cfg: &OrderFlipConfig) -> Result<SyntheticDataset> {
    assert!(cfg.min_len >= 2 && cfg.min_len <= cfg.max_len && cfg.max_len <= cfg.vocabulary);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocab = Array2::from_shape_fn((cfg.vocabulary, cfg.dim), |_| rng.random_range(-1.0..1.0));

    let mut bundles = Vec::with_capacity(2 * cfg.pairs);
    let mut pairs = Vec::with_capacity(cfg.pairs);
    for k in 0..cfg.pairs {
        let positive = k % 2 == 0;
        let n = rng.random_range(cfg.min_len..=cfg.max_len);
        let mut words: Vec<usize> = (0..cfg.vocabulary).collect();
        words.shuffle(&mut rng);
        words.truncate(n);

        let logits = Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0) * cfg.attention_sharpness);
        let attention = softmax_rows(&logits);

        // Position p of the second sentence holds word order[p] of the first.
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut roles = order.clone();
        if !positive {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            roles.swap(i, j);
        }

        let id_a = format!("p{k:03}a");
        let id_b = format!("p{k:03}b");
        let a_words = words.clone();
        let b_words: Vec<usize> = order.iter().map(|&p| words[p]).collect();
        let b_attention = Array2::from_shape_fn((n, n), |(p, q)| attention[[roles[p], roles[q]]]);

        bundles.push(sentence(&id_a, &a_words, &vocab, attention, cfg, &mut rng)?);
        bundles.push(sentence(&id_b, &b_words, &vocab, b_attention, cfg, &mut rng)?);
        pairs.push(DatasetPair {
            id_a,
            id_b,
            gold: Gold::Binary(positive),
        });
    }
    Ok(SyntheticDataset {
        bundles: BundleFile::new(bundles)?,
        pairs: PairsFile {
            mode: PairMode::Binary,
            pairs,
        },
    })
}

fn sentence(
    id: &str,
    words: &[usize],
    vocab: &Array2<f64>,
    attention: Array2<f64>,
    cfg: &OrderFlipConfig,
    rng: &mut impl Rng,
) -> Result<SentenceBundle> {
    let n = words.len();
    let embeddings = Array2::from_shape_fn((n, cfg.dim), |(i, d)| {
        vocab[[words[i], d]] + rng.random_range(-1.0..=1.0) * cfg.embedding_noise
    });
    let noisy = attention.mapv(|x| x * (1.0 + rng.random_range(-1.0..=1.0) * cfg.attention_noise));
    let tokens = words.iter().map(|w| format!("w{w}")).collect();
    Ok(SentenceBundle::from_raw(id, tokens, embeddings, noisy)?.0)
}

fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, x| m.max(*x));
        row.mapv_inplace(|x| (x - max).exp());
        let total: f64 = row.sum();
        row.mapv_inplace(|x| x / total);
    }
    out
}

/// Token multiset check used by tests and examples: both sentences of every
/// pair use the same words.
pub fn same_multiset(a: &SentenceBundle, b: &SentenceBundle) -> bool {
    let mut x: Vec<&String> = a.tokens().iter().collect();
    let mut y: Vec<&String> = b.tokens().iter().collect();
    x.sort();
    y.sort();
    x == y
}
