//! Choosing the attention source and mixing ratio on a dev set.
//!
//! Two candidate attention exports are offered: one that follows the
//! sentence structure and one that attends uniformly. The search should
//! pick the informative one with a positive mixing ratio.

use ndarray::Array2;
use wsmd::eval::{default_lambda_grid, grid_search, report_table, SamSource};
use wsmd::measures::{CostKind, Measure, MeasureConfig, WeightScheme};
use wsmd::ot::StructureMatrix;
use wsmd::synthetic::{order_flip_dataset, OrderFlipConfig};

fn main() -> wsmd::Result<()> {
    let dev = order_flip_dataset(&OrderFlipConfig {
        pairs: 60,
        ..Default::default()
    })?;
    let flat = dev.bundles.map(|b| {
        let n = b.len();
        b.with_sam(StructureMatrix::row_stochastic(Array2::from_elem((n, n), 1.0 / n as f64))?)
    })?;
    let sources = [
        SamSource {
            id: "L0H0".into(),
            bundles: flat,
        },
        SamSource {
            id: "L7H2".into(),
            bundles: dev.bundles.clone(),
        },
    ];
    let base = MeasureConfig::new(Measure::Wsmd, WeightScheme::Uniform, CostKind::Euclidean, 0.0);
    let outcome = grid_search(&dev.pairs, &dev.bundles, &sources, &default_lambda_grid(), &base)?;

    print!("{}", report_table(&outcome.evaluated));
    println!("\nselected:");
    print!("{}", report_table(std::slice::from_ref(&outcome.best)));
    Ok(())
}
