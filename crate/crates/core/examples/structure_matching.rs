//! Matching two sentences by attention structure alone.
//!
//! The second sentence is the first with its words shuffled and its
//! attention permuted accordingly. The structure distance finds the
//! alignment without looking at the embeddings.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsmd::measures::{smd, SentenceBundle, WeightScheme};
use wsmd::ot::StructureMatrix;

fn main() -> wsmd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 6;
    let raw = Array2::from_shape_fn((n, n), |_| rng.random_range(0.0..1.0f64).powi(4));
    let (sam, _) = StructureMatrix::renormalized(raw)?;

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let tokens: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let embeddings = Array2::zeros((n, 2));

    let a = SentenceBundle::new("a", tokens.clone(), embeddings.clone(), sam.clone())?;
    let b = SentenceBundle::new(
        "b",
        perm.iter().map(|&p| tokens[p].clone()).collect(),
        embeddings,
        sam.permuted(&perm)?,
    )?;

    let result = smd(&a, &b, &WeightScheme::Uniform)?;
    println!("smd = {:.3e} after {} iterations", result.distance, result.iterations);
    for (j, &i) in perm.iter().enumerate() {
        let col = result.plan.view().column(j).to_owned();
        let matched = col
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(k, _)| k)
            .unwrap();
        println!("b[{j}] <- a[{matched}]   (true source a[{i}])");
    }
    Ok(())
}
