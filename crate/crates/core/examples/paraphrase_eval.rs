//! Paraphrase identification on data where only word order separates the
//! classes: every measure on the same pairs, scored by AUC.

use wsmd::eval::{evaluate, report_table};
use wsmd::measures::{CostKind, Measure, MeasureConfig, WeightScheme};
use wsmd::synthetic::{order_flip_dataset, OrderFlipConfig};

fn main() -> wsmd::Result<()> {
    let data = order_flip_dataset(&OrderFlipConfig::default())?;
    let configs = [
        MeasureConfig::new(Measure::Bow, WeightScheme::Uniform, CostKind::Euclidean, 0.0),
        MeasureConfig::new(Measure::SentEmb, WeightScheme::Uniform, CostKind::Euclidean, 0.0),
        MeasureConfig::new(Measure::Wmd, WeightScheme::Uniform, CostKind::Euclidean, 0.0),
        MeasureConfig::new(Measure::Wrd, WeightScheme::Norm, CostKind::Cosine, 0.0),
        MeasureConfig::new(Measure::Smd, WeightScheme::Uniform, CostKind::Euclidean, 1.0),
        MeasureConfig::new(Measure::Wsmd, WeightScheme::Uniform, CostKind::Euclidean, 0.5),
    ];
    let reports = configs
        .iter()
        .map(|c| evaluate(&data.pairs, &data.bundles, c, None))
        .collect::<wsmd::Result<Vec<_>>>()?;
    print!("{}", report_table(&reports));
    Ok(())
}
