//! Scoring distances against gold labels and tuning on dev sets.

mod evaluate;
mod grid;
mod metrics;

pub use evaluate::{
    evaluate, metric_for, report_table, score_pairs, EvalConfig, EvalReport, MetricKind,
};
pub use grid::{default_lambda_grid, grid_search, GridOutcome, SamSource};
pub use metrics::{auc, midranks, spearman};
