//! Whitening anisotropic embeddings so that cosine and Euclidean costs are
//! not dominated by one shared direction.

use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsmd::measures::fit_whitening;

fn covariance(rows: &Array2<f64>) -> Array2<f64> {
    let mean = rows.mean_axis(Axis(0)).unwrap();
    let centred = rows - &mean.insert_axis(Axis(0));
    centred.t().dot(&centred) / (rows.nrows() as f64 - 1.0)
}

fn mean_cosine(rows: &Array2<f64>) -> f64 {
    let n = rows.nrows();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (rows.row(i), rows.row(j));
            total += a.dot(&b) / (a.dot(&a).sqrt() * b.dot(&b).sqrt());
        }
    }
    total / (n * (n - 1) / 2) as f64
}

fn main() -> wsmd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Every vector shares a large common offset, as contextual embeddings do.
    let rows = Array2::from_shape_fn((200, 3), |(_, d)| {
        [5.0, 2.0, 0.0][d] + rng.random_range(-1.0..1.0) * [3.0, 0.5, 0.1][d]
    });
    let transform = fit_whitening(rows.view())?;
    let white = transform.apply_rows(rows.view())?;

    println!("covariance before:\n{:.3}", covariance(&rows));
    println!("covariance after:\n{:.3}", covariance(&white));
    println!("mean pairwise cosine before: {:.3}", mean_cosine(&rows));
    println!("mean pairwise cosine after:  {:.3}", mean_cosine(&white));
    println!("regularized: {}", transform.is_regularized());
    Ok(())
}
