//! Sentence distances built on linear and fused optimal transport.

use super::{build_cost, build_weights, CostKind, SentenceBundle, WeightScheme};
use crate::error::{Error, Result};
use crate::ot::{
    solve_exact_ot, solve_fgw, solve_fgw_multistart, CostMatrix, FgwResult, OtSolution,
    SolverOptions, StructureMatrix, TransportPlan,
};

/// Below this the two structures are treated as indistinguishable.
pub const DEGENERATE_STRUCTURE_TOL: f64 = 1e-15;

/// Word mover's distance. `Uniform` weights with `Euclidean` cost is the
/// classic WMD; `Norm` weights with `Cosine` cost is the word rotator's
/// distance.
pub fn wmd(
    a: &SentenceBundle,
    b: &SentenceBundle,
    scheme: &WeightScheme,
    kind: CostKind,
) -> Result<OtSolution> {
    let cost = build_cost(a, b, kind)?;
    let u = build_weights(a, scheme)?;
    let v = build_weights(b, scheme)?;
    solve_exact_ot(&cost, &u, &v)
}

/// Structure mover's distance between the attention matrices of two
/// sentences, started from the product coupling.
pub fn smd(a: &SentenceBundle, b: &SentenceBundle, scheme: &WeightScheme) -> Result<FgwResult> {
    smd_with(a, b, scheme, &SolverOptions::default(), &[])
}

/// [`smd`] with explicit solver options and extra starting plans; the best
/// stationary point over all starts is returned.
pub fn smd_with(
    a: &SentenceBundle,
    b: &SentenceBundle,
    scheme: &WeightScheme,
    opts: &SolverOptions,
    starts: &[TransportPlan],
) -> Result<FgwResult> {
    let u = build_weights(a, scheme)?;
    let v = build_weights(b, scheme)?;
    let cost = CostMatrix::zeros(a.len(), b.len());
    solve_fgw_multistart(&cost, a.sam(), b.sam(), &u, &v, 1.0, 1.0, opts, starts)
}

/// Scale that puts the structure term on the cost scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationFactor {
    /// Mean ground cost over all token pairs.
    pub cost_mean: f64,
    /// Mean squared structure difference over all index quadruples.
    pub structure_mse: f64,
    /// `cost_mean / structure_mse`.
    pub k: f64,
}

pub fn normalization_factor(
    cost: &CostMatrix,
    a: &StructureMatrix,
    b: &StructureMatrix,
) -> Result<NormalizationFactor> {
    let (n, m) = cost.shape();
    if a.dim() != n || b.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "cost is {n}x{m}, structures are {0}x{0} and {1}x{1}",
            a.dim(),
            b.dim()
        )));
    }
    // Σ (a - b)² / (n²m²) = E[a²] + E[b²] - 2 E[a] E[b]
    let mean = |s: &StructureMatrix| s.view().mean().unwrap_or(0.0);
    let mean_sq = |s: &StructureMatrix| s.view().mapv(|x| x * x).mean().unwrap_or(0.0);
    let structure_mse = (mean_sq(a) + mean_sq(b) - 2.0 * mean(a) * mean(b)).max(0.0);
    if structure_mse < DEGENERATE_STRUCTURE_TOL {
        return Err(Error::DegenerateStructure(structure_mse));
    }
    let cost_mean = cost.mean();
    Ok(NormalizationFactor {
        cost_mean,
        structure_mse,
        k: cost_mean / structure_mse,
    })
}

/// Word and sentence-structure mover's distance with mixing ratio `lambda`.
pub fn wsmd(
    a: &SentenceBundle,
    b: &SentenceBundle,
    scheme: &WeightScheme,
    kind: CostKind,
    lambda: f64,
) -> Result<FgwResult> {
    wsmd_with(a, b, scheme, kind, lambda, &SolverOptions::default())
}

/// [`wsmd`] with explicit solver options.
///
/// When both attention matrices are indistinguishable (for instance two
/// one-token sentences, whose attention is forced to `[[1]]`) the structure
/// term carries no information and `k` is undefined; the result is then the
/// plain linear transport with `structure_fallback` set and an effective
/// `lambda` of zero.
pub fn wsmd_with(
    a: &SentenceBundle,
    b: &SentenceBundle,
    scheme: &WeightScheme,
    kind: CostKind,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<FgwResult> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidLambda(lambda));
    }
    let cost = build_cost(a, b, kind)?;
    let u = build_weights(a, scheme)?;
    let v = build_weights(b, scheme)?;
    match normalization_factor(&cost, a.sam(), b.sam()) {
        Ok(factor) => solve_fgw(&cost, a.sam(), b.sam(), &u, &v, lambda, factor.k, opts),
        Err(Error::DegenerateStructure(mse)) => {
            log::warn!(
                "structures of `{}` and `{}` are indistinguishable (mse {mse:e}); using linear transport only",
                a.id(),
                b.id()
            );
            let mut result = solve_fgw(&cost, a.sam(), b.sam(), &u, &v, 0.0, 0.0, opts)?;
            result.structure_fallback = true;
            Ok(result)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use ndarray::{array, Array2};

    use super::*;

    fn single(id: &str, emb: [f64; 2]) -> SentenceBundle {
        SentenceBundle::new(
            id,
            vec![id.to_string()],
            Array2::from_shape_vec((1, 2), emb.to_vec()).unwrap(),
            StructureMatrix::row_stochastic(array![[1.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn one_token_wmd_is_ground_cost() {
        let a = single("a", [0.0, 0.0]);
        let b = single("b", [3.0, 4.0]);
        let d = wmd(&a, &b, &WeightScheme::Uniform, CostKind::Euclidean).unwrap();
        assert_eq!(d.cost, 5.0);
    }

    #[test]
    fn one_token_smd_is_zero() {
        let a = single("a", [0.0, 0.0]);
        let b = single("b", [3.0, 4.0]);
        assert_eq!(smd(&a, &b, &WeightScheme::Uniform).unwrap().distance, 0.0);
    }

    #[test]
    fn one_token_wsmd_falls_back() {
        let a = single("a", [0.0, 0.0]);
        let b = single("b", [3.0, 4.0]);
        let r = wsmd(&a, &b, &WeightScheme::Uniform, CostKind::Euclidean, 0.5).unwrap();
        assert!(r.structure_fallback);
        assert_eq!(r.distance, 5.0);
    }

    #[test]
    fn k_from_direct_sum() {
        let c = CostMatrix::new(Array2::ones((2, 2))).unwrap();
        let a = StructureMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let b = StructureMatrix::new(array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let f = normalization_factor(&c, &a, &b).unwrap();
        assert_eq!(f.cost_mean, 1.0);
        assert_eq!(f.structure_mse, 0.5);
        assert_eq!(f.k, 2.0);
    }

    #[test]
    fn identical_constant_structures_are_degenerate() {
        let c = CostMatrix::new(Array2::ones((3, 3))).unwrap();
        let s = StructureMatrix::new(Array2::from_elem((3, 3), 1.0 / 3.0)).unwrap();
        assert!(matches!(
            normalization_factor(&c, &s, &s),
            Err(Error::DegenerateStructure(_))
        ));
    }

    #[test]
    fn k_scales_with_cost() {
        let c = CostMatrix::new(array![[0.3, 1.2, 0.7], [2.0, 0.1, 0.4]]).unwrap();
        let a = StructureMatrix::new(array![[0.2, 0.8], [0.6, 0.4]]).unwrap();
        let b = StructureMatrix::new(array![[0.1, 0.3, 0.6], [0.5, 0.5, 0.0], [0.3, 0.3, 0.4]])
            .unwrap();
        let base = normalization_factor(&c, &a, &b).unwrap().k;
        let scaled = normalization_factor(&c.scaled(4.0).unwrap(), &a, &b).unwrap().k;
        assert_eq!(scaled, 4.0 * base);
    }

    #[test]
    fn invalid_lambda() {
        let a = single("a", [0.0, 1.0]);
        assert!(matches!(
            wsmd(&a, &a, &WeightScheme::Uniform, CostKind::Euclidean, -0.1),
            Err(Error::InvalidLambda(_))
        ));
    }
}
