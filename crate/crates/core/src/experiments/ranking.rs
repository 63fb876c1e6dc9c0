//! Ranking improvements from point to uncertainty-adjusted sorting.
//!
//! Ranks are ascending in score with mean tied ranks, so a higher rank is a
//! more favorable position. The long-leg improvement is
//! `rank_upper - rank_point`; the short-leg improvement is
//! `rank_point - rank_lower` (a positive value means the lower-bound sort
//! pushes the asset toward the short leg less aggressively than the point
//! sort did).

use std::collections::BTreeMap;

use crate::panel::{mean_tied_ranks, AssetId, MonthId};
use crate::scalar::Real;

use super::ExperimentsError;

#[derive(Debug, Clone, PartialEq)]
pub struct RankImprovementRow {
    pub asset: AssetId,
    pub month: MonthId,
    pub delta_rank_upper: f64,
    pub delta_rank_lower: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankImprovementPanel {
    pub rows: Vec<RankImprovementRow>,
}

impl RankImprovementPanel {
    pub fn extend(&mut self, other: RankImprovementPanel) {
        self.rows.extend(other.rows);
    }
}

fn check_universe<F: Real>(
    a: &BTreeMap<AssetId, F>,
    b: &BTreeMap<AssetId, F>,
) -> Result<(), ExperimentsError> {
    if a.len() == b.len() && a.keys().zip(b.keys()).all(|(x, y)| x == y) {
        return Ok(());
    }
    let only_left: Vec<AssetId> = a.keys().filter(|k| !b.contains_key(*k)).cloned().collect();
    let only_right: Vec<AssetId> = b.keys().filter(|k| !a.contains_key(*k)).cloned().collect();
    Err(ExperimentsError::UniverseMismatch { only_left, only_right })
}

fn ranks_of<F: Real>(scores: &BTreeMap<AssetId, F>) -> BTreeMap<AssetId, f64> {
    let assets: Vec<&AssetId> = scores.keys().collect();
    let values: Vec<F> = scores.values().copied().collect();
    let ranks = mean_tied_ranks(&values);
    assets.into_iter().cloned().zip(ranks).collect()
}

/// Rank deltas for one month. The three score maps must cover the identical
/// universe.
pub fn ranking_improvements<F: Real>(
    point_scores: &BTreeMap<AssetId, F>,
    upper_scores: &BTreeMap<AssetId, F>,
    lower_scores: &BTreeMap<AssetId, F>,
    month: MonthId,
) -> Result<RankImprovementPanel, ExperimentsError> {
    check_universe(point_scores, upper_scores)?;
    check_universe(point_scores, lower_scores)?;

    let rank_point = ranks_of(point_scores);
    let rank_upper = ranks_of(upper_scores);
    let rank_lower = ranks_of(lower_scores);

    let rows = point_scores
        .keys()
        .map(|asset| RankImprovementRow {
            asset: asset.clone(),
            month,
            delta_rank_upper: rank_upper[asset] - rank_point[asset],
            delta_rank_lower: rank_point[asset] - rank_lower[asset],
        })
        .collect();
    Ok(RankImprovementPanel { rows })
}
