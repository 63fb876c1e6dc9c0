//! Long-short and long-only weight construction.

use std::collections::BTreeMap;

use crate::panel::{AssetId, MonthId};
use crate::scalar::Real;

use super::{assign_deciles, MonthWeights, PortfolioError, ScoreKind};

/// Which scores drive the decile sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortMode {
    /// Both legs ranked by the point prediction.
    Point,
    /// Long leg ranked by upper bounds, short leg by lower bounds.
    Ua,
}

impl std::fmt::Display for SortMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SortMode::Point => "point",
            SortMode::Ua => "ua",
        })
    }
}

/// Equal-weight long decile 10 of `long_scores`, short decile 1 of
/// `short_scores`; an asset landing in both legs has its weights netted,
/// so the spread always sums to zero.
fn spread_weights<F: Real>(
    long_scores: &BTreeMap<AssetId, F>,
    short_scores: &BTreeMap<AssetId, F>,
    month: MonthId,
    long_kind: ScoreKind,
    short_kind: ScoreKind,
) -> Result<MonthWeights<F>, PortfolioError> {
    let long = assign_deciles(long_scores, month, long_kind)?;
    let short = assign_deciles(short_scores, month, short_kind)?;
    let long_leg: Vec<&AssetId> = long.members(10);
    let short_leg: Vec<&AssetId> = short.members(1);
    let long_w = F::one() / F::from_usize(long_leg.len());
    let short_w = -F::one() / F::from_usize(short_leg.len());

    let mut weights: MonthWeights<F> = BTreeMap::new();
    for asset in long_leg {
        *weights.entry(asset.clone()).or_insert_with(F::zero) += long_w;
    }
    for asset in short_leg {
        *weights.entry(asset.clone()).or_insert_with(F::zero) += short_w;
    }
    Ok(weights)
}

/// Point-prediction benchmark spread: both legs sorted by `mu_hat`.
pub fn point_long_short<F: Real>(
    point_scores: &BTreeMap<AssetId, F>,
    month: MonthId,
) -> Result<MonthWeights<F>, PortfolioError> {
    spread_weights(point_scores, point_scores, month, ScoreKind::Point, ScoreKind::Point)
}

/// Uncertainty-adjusted spread: long leg from the upper-bound sort, short
/// leg from the lower-bound sort.
pub fn ua_long_short<F: Real>(
    upper_scores: &BTreeMap<AssetId, F>,
    lower_scores: &BTreeMap<AssetId, F>,
    month: MonthId,
) -> Result<MonthWeights<F>, PortfolioError> {
    spread_weights(upper_scores, lower_scores, month, ScoreKind::Upper, ScoreKind::Lower)
}

/// Mode dispatch used by the pipeline: `Point` ignores the bound scores.
pub fn build_long_short<F: Real>(
    point_scores: &BTreeMap<AssetId, F>,
    upper_scores: &BTreeMap<AssetId, F>,
    lower_scores: &BTreeMap<AssetId, F>,
    mode: SortMode,
    month: MonthId,
) -> Result<MonthWeights<F>, PortfolioError> {
    match mode {
        SortMode::Point => point_long_short(point_scores, month),
        SortMode::Ua => ua_long_short(upper_scores, lower_scores, month),
    }
}

/// Equal-weight top decile of `scores`. The realized return of a long-only
/// leg is recorded relative to a benchmark (see [`super::realize`]).
pub fn build_long_only<F: Real>(
    scores: &BTreeMap<AssetId, F>,
    month: MonthId,
    score_kind: ScoreKind,
) -> Result<MonthWeights<F>, PortfolioError> {
    let deciles = assign_deciles(scores, month, score_kind)?;
    let members = deciles.members(10);
    let w = F::one() / F::from_usize(members.len());
    Ok(members.into_iter().map(|a| (a.clone(), w)).collect())
}
