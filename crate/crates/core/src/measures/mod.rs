//! Text-level distances on top of [`crate::ot`]: ground costs and token
//! weights from sentence bundles, WMD/WRD, SMD and the fused WSMD, plus
//! whitening and the non-transport baselines.

mod baselines;
mod bundle;
mod cost;
mod distances;
mod score;
mod weights;
mod whitening;

pub use baselines::{bow_similarity, sent_emb_similarity, CosineScore};
pub use bundle::{SentenceBundle, SAM_INPUT_TOL};
pub use cost::{build_cost, CostKind};
pub use distances::{
    normalization_factor, smd, smd_with, wmd, wsmd, wsmd_with, NormalizationFactor,
    DEGENERATE_STRUCTURE_TOL,
};
pub use score::{score_pair, Measure, MeasureConfig, PairScore};
pub use weights::{build_weights, IdfTable, WeightKind, WeightScheme};
pub use whitening::{
    apply_whitening, fit_whitening, fit_whitening_on, WhiteningTransform, WHITENING_EPS,
};
