//! Writing a dataset to disk in the bundle and pairs formats, reading it
//! back, and running the command-line pipeline on it.

use wsmd::cli::{cmd_compute, cmd_evaluate, RunConfig};
use wsmd::io::{compute_idf, read_bundles, read_pairs, write_bundles, write_pairs};
use wsmd::measures::{Measure, WeightKind};
use wsmd::synthetic::{order_flip_dataset, OrderFlipConfig};

fn main() -> wsmd::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    let data = order_flip_dataset(&OrderFlipConfig {
        pairs: 20,
        ..Default::default()
    })?;
    let bundles_path = dir.path().join("dev.jsonl");
    let pairs_path = dir.path().join("dev.tsv");
    write_bundles(&data.bundles, &bundles_path)?;
    write_pairs(&data.pairs, &pairs_path)?;

    let (bundles, warnings) = read_bundles(&bundles_path)?;
    let pairs = read_pairs(&pairs_path)?;
    assert_eq!(bundles.records(), data.bundles.records());
    println!(
        "read {} sentences and {} pairs ({} attention warnings)",
        bundles.len(),
        pairs.len(),
        warnings.len()
    );

    let idf = compute_idf(bundles.iter());
    let mut rarest: Vec<(&str, f64)> = idf.iter().collect();
    rarest.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
    println!("highest idf: {:?}", &rarest[..3]);

    let config = RunConfig {
        bundles: Some(bundles_path),
        pairs: Some(pairs_path),
        measure: Some(Measure::Wsmd),
        weights: Some(WeightKind::Idf),
        lambda: Some(0.5),
        ..Default::default()
    };
    let table = cmd_compute(&config)?;
    print!("{}", table.to_display().lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    let report = cmd_evaluate(&config)?;
    println!("{} = {:.4} over {} pairs", report.metric, report.value, report.n_pairs);
    Ok(())
}
