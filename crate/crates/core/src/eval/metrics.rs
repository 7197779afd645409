//! Rank metrics. Both consume distances and orient them as
//! `similarity = −distance`, so a higher value is always better.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// 1-based ranks with ties replaced by their average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]].partial_cmp(&values[order[start]]) == Some(Ordering::Equal) {
            end += 1;
        }
        // positions start..end (0-based) share the mean of ranks start+1..=end
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

fn check_finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().any(|v| !v.is_finite()) {
        return Err(Error::MetricUndefined("non-finite input".into()));
    }
    Ok(())
}

/// Area under the ROC curve of `−distance` against `label` (true = paraphrase).
///
/// Equals the probability that a random positive pair has a smaller distance
/// than a random negative pair, counting ties as one half.
pub fn auc(scores: &[(f64, bool)]) -> Result<f64> {
    check_finite(scores.iter().map(|s| s.0))?;
    let positives = scores.iter().filter(|s| s.1).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::MetricUndefined(
            "AUC needs both positive and negative pairs".into(),
        ));
    }
    let similarity: Vec<f64> = scores.iter().map(|s| -s.0).collect();
    let ranks = midranks(&similarity);
    let positive_rank_sum: f64 = ranks
        .iter()
        .zip(scores)
        .filter(|(_, s)| s.1)
        .map(|(r, _)| r)
        .sum();
    let (p, n) = (positives as f64, negatives as f64);
    Ok((positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Spearman rank correlation between `−distance` and the gold score.
pub fn spearman(scores: &[(f64, f64)]) -> Result<f64> {
    if scores.len() < 3 {
        return Err(Error::MetricUndefined(format!(
            "Spearman needs at least 3 pairs, got {}",
            scores.len()
        )));
    }
    check_finite(scores.iter().flat_map(|s| [s.0, s.1]))?;
    let x = midranks(&scores.iter().map(|s| -s.0).collect::<Vec<_>>());
    let y = midranks(&scores.iter().map(|s| s.1).collect::<Vec<_>>());
    pearson(&x, &y)
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::MetricUndefined("constant input vector".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn perfect_separation() {
        let s = [(1.0, true), (2.0, true), (3.0, false), (4.0, false)];
        assert_eq!(auc(&s).unwrap(), 1.0);
    }

    #[test]
    fn all_ties() {
        let s = [(2.0, true), (2.0, false), (2.0, true), (2.0, false), (2.0, false)];
        assert_eq!(auc(&s).unwrap(), 0.5);
    }

    #[test]
    fn single_class_rejected() {
        assert!(auc(&[(1.0, true), (2.0, true)]).is_err());
    }

    #[test]
    fn spearman_monotone() {
        let s: Vec<(f64, f64)> = (0..6).map(|k| (10.0 - k as f64, k as f64 * 0.8)).collect();
        assert_eq!(spearman(&s).unwrap(), 1.0);
        let r: Vec<(f64, f64)> = s.iter().map(|(d, g)| (-d, *g)).collect();
        assert_eq!(spearman(&r).unwrap(), -1.0);
    }

    #[test]
    fn spearman_rejects_degenerate() {
        assert!(spearman(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(spearman(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
    }
}
