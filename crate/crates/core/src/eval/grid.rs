use std::cmp::Ordering;

use rayon::prelude::*;

use super::{evaluate, EvalReport};
use crate::error::{Error, Result};
use crate::io::{BundleFile, PairsFile};
use crate::measures::{Measure, MeasureConfig};

/// `0.0, 0.1, …, 1.0`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

/// An attention export for one (layer, head), keyed by a label such as `L7H2`.
#[derive(Debug, Clone)]
pub struct SamSource {
    pub id: String,
    pub bundles: BundleFile,
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best: EvalReport,
    /// Every evaluated configuration, ordered by attention id then lambda.
    pub evaluated: Vec<EvalReport>,
}

/// Evaluates `base` on the dev pairs for every attention source and every
/// lambda in `lambdas`, and returns the configuration with the best dev
/// metric. Ties go to the smaller lambda, then to the lexicographically
/// smaller attention id.
///
/// Measures without a structure term ignore `sources`; measures other than
/// WSMD ignore `lambdas`. With no sources, the bundles' own attention is used.
pub fn grid_search(
    dev: &PairsFile,
    embeddings: &BundleFile,
    sources: &[SamSource],
    lambdas: &[f64],
    base: &MeasureConfig,
) -> Result<GridOutcome> {
    if dev.is_empty() {
        return Err(Error::Config("grid search needs at least one dev pair".into()));
    }
    let mut sams: Vec<Option<&SamSource>> = if base.measure.uses_structure() && !sources.is_empty() {
        sources.iter().map(Some).collect()
    } else {
        vec![None]
    };
    sams.sort_by(|a, b| a.map(|s| &s.id).cmp(&b.map(|s| &s.id)));

    let mut grid: Vec<f64> = if base.measure == Measure::Wsmd {
        lambdas.to_vec()
    } else {
        vec![base.lambda]
    };
    if grid.is_empty() {
        return Err(Error::Config("empty lambda grid".into()));
    }
    if let Some(l) = grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidLambda(*l));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut evaluated = Vec::with_capacity(sams.len() * grid.len());
    for sam in sams {
        let bundles = match sam {
            Some(s) => embeddings.with_structure_from(&s.bundles)?,
            None => embeddings.clone(),
        };
        let label = sam.map(|s| s.id.clone());
        let reports: Vec<EvalReport> = grid
            .par_iter()
            .map(|&lambda| {
                let config = MeasureConfig {
                    lambda,
                    ..base.clone()
                };
                evaluate(dev, &bundles, &config, label.clone())
            })
            .collect::<Result<_>>()?;
        evaluated.extend(reports);
    }

    let best = evaluated
        .iter()
        .max_by(|a, b| preference(a, b))
        .expect("at least one configuration")
        .clone();
    Ok(GridOutcome { best, evaluated })
}

/// Orders reports so that the preferred one is the maximum.
fn preference(a: &EvalReport, b: &EvalReport) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then_with(|| b.config.lambda.total_cmp(&a.config.lambda))
        .then_with(|| b.config.sam.cmp(&a.config.sam))
}
