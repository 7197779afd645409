use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{auc, spearman};
use crate::error::Result;
use crate::io::{BundleFile, Gold, PairMode, PairsFile};
use crate::measures::{score_pair, CostKind, Measure, MeasureConfig, PairScore, WeightKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Auc,
    Spearman,
}

impl MetricKind {
    pub fn for_mode(mode: PairMode) -> Self {
        match mode {
            PairMode::Binary => MetricKind::Auc,
            PairMode::Score => MetricKind::Spearman,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Auc => "auc",
            MetricKind::Spearman => "spearman",
        })
    }
}

/// Identifies one evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub measure: Measure,
    pub weights: WeightKind,
    pub cost: CostKind,
    pub lambda: f64,
    /// Attention source, when the measure uses structure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sam: Option<String>,
}

impl EvalConfig {
    pub fn describe(config: &MeasureConfig, sam: Option<String>) -> Self {
        EvalConfig {
            measure: config.measure,
            weights: config.weights.kind(),
            cost: config.cost,
            lambda: config.lambda,
            sam,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metric: MetricKind,
    pub value: f64,
    pub n_pairs: usize,
    pub config: EvalConfig,
}

/// Distances for every pair, in input order. Pairs are scored in parallel on
/// the current rayon pool.
pub fn score_pairs(
    pairs: &PairsFile,
    bundles: &BundleFile,
    config: &MeasureConfig,
) -> Result<Vec<PairScore>> {
    pairs.check_ids(bundles)?;
    pairs
        .pairs
        .par_iter()
        .map(|p| score_pair(bundles.require(&p.id_a)?, bundles.require(&p.id_b)?, config))
        .collect()
}

/// AUC for binary pairs files, Spearman for scored ones.
pub fn metric_for(pairs: &PairsFile, distances: &[f64]) -> Result<(MetricKind, f64)> {
    let metric = MetricKind::for_mode(pairs.mode);
    let value = match metric {
        MetricKind::Auc => {
            let s: Vec<(f64, bool)> = distances
                .iter()
                .zip(&pairs.pairs)
                .map(|(d, p)| (*d, matches!(p.gold, Gold::Binary(true))))
                .collect();
            auc(&s)?
        }
        MetricKind::Spearman => {
            let s: Vec<(f64, f64)> = distances
                .iter()
                .zip(&pairs.pairs)
                .map(|(d, p)| (*d, p.gold.value()))
                .collect();
            spearman(&s)?
        }
    };
    Ok((metric, value))
}

pub fn evaluate(
    pairs: &PairsFile,
    bundles: &BundleFile,
    config: &MeasureConfig,
    sam: Option<String>,
) -> Result<EvalReport> {
    let scores = score_pairs(pairs, bundles, config)?;
    let distances: Vec<f64> = scores.iter().map(|s| s.distance).collect();
    let (metric, value) = metric_for(pairs, &distances)?;
    Ok(EvalReport {
        metric,
        value,
        n_pairs: pairs.len(),
        config: EvalConfig::describe(config, sam),
    })
}

/// Fixed-width table of reports, one row per configuration.
pub fn report_table(reports: &[EvalReport]) -> String {
    let mut out = format!(
        "{:<8} {:<8} {:<10} {:>6} {:<12} {:<9} {:>8} {:>7}\n",
        "measure", "weights", "cost", "lambda", "sam", "metric", "value", "pairs"
    );
    for r in reports {
        let c = &r.config;
        writeln!(
            out,
            "{:<8} {:<8} {:<10} {:>6.2} {:<12} {:<9} {:>8.2} {:>7}",
            c.measure.to_string(),
            c.weights.to_string(),
            c.cost.to_string(),
            c.lambda,
            c.sam.as_deref().unwrap_or("-"),
            r.metric.to_string(),
            100.0 * r.value,
            r.n_pairs
        )
        .expect("write to String");
    }
    out
}
