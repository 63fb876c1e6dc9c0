//! Cross-sectional decile assignment.

use std::collections::BTreeMap;

use crate::panel::{AssetId, MonthId};
use crate::scalar::Real;

use super::{DecileAssignment, PortfolioError, ScoreKind};

/// Sort one month's scores ascending and assign the asset at 1-based rank
/// `r` (of `N`) to decile `ceil(10 r / N)`. Ties break by ascending asset id.
/// Non-finite scores are excluded and counted; fewer than 10 finite scores
/// is an error.
pub fn assign_deciles<F: Real>(
    scores: &BTreeMap<AssetId, F>,
    month: MonthId,
    score_name: ScoreKind,
) -> Result<DecileAssignment, PortfolioError> {
    let mut finite: Vec<(&AssetId, F)> = scores
        .iter()
        .filter(|(_, s)| s.is_finite())
        .map(|(a, &s)| (a, s))
        .collect();
    let n_nonfinite_excluded = scores.len() - finite.len();
    let n = finite.len();
    if n < 10 {
        return Err(PortfolioError::TooFewAssets { n });
    }
    finite.sort_by(|(a_id, a_s), (b_id, b_s)| {
        a_s.partial_cmp(b_s).expect("finite scores").then_with(|| a_id.cmp(b_id))
    });

    let mapping: BTreeMap<AssetId, u8> = finite
        .into_iter()
        .enumerate()
        .map(|(i, (asset, _))| {
            let rank = i + 1;
            let decile = (10 * rank).div_ceil(n) as u8;
            (asset.clone(), decile)
        })
        .collect();

    Ok(DecileAssignment { month, score_name, mapping, n_nonfinite_excluded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(pairs: &[(&str, f64)]) -> BTreeMap<AssetId, f64> {
        pairs.iter().map(|(a, s)| (a.to_string(), *s)).collect()
    }

    fn decile_sizes(assignment: &DecileAssignment) -> Vec<usize> {
        (1..=10).map(|d| assignment.members(d).len()).collect()
    }

    #[test]
    fn twenty_distinct_scores_split_evenly() {
        let s: BTreeMap<AssetId, f64> =
            (0..20).map(|i| (format!("A{i:02}"), i as f64 * 0.01)).collect();
        let a = assign_deciles(&s, MonthId(1), ScoreKind::Point).unwrap();
        assert_eq!(decile_sizes(&a), vec![2; 10]);
        // top scores land in decile 10
        assert_eq!(a.mapping["A19"], 10);
        assert_eq!(a.mapping["A00"], 1);
    }

    #[test]
    fn twenty_five_assets_follow_ceiling_pattern() {
        let s: BTreeMap<AssetId, f64> =
            (0..25).map(|i| (format!("A{i:02}"), i as f64)).collect();
        let a = assign_deciles(&s, MonthId(1), ScoreKind::Point).unwrap();
        assert_eq!(decile_sizes(&a), vec![2, 3, 2, 3, 2, 3, 2, 3, 2, 3]);
    }

    #[test]
    fn all_equal_scores_rank_by_asset_id() {
        let s: BTreeMap<AssetId, f64> = (0..20).map(|i| (format!("A{i:02}"), 0.5)).collect();
        let a = assign_deciles(&s, MonthId(1), ScoreKind::Point).unwrap();
        // ids sort ascending, so A00/A01 sit in decile 1 and A18/A19 in 10
        assert_eq!(a.mapping["A00"], 1);
        assert_eq!(a.mapping["A01"], 1);
        assert_eq!(a.mapping["A18"], 10);
        assert_eq!(a.mapping["A19"], 10);
    }

    #[test]
    fn non_finite_scores_are_excluded_and_counted() {
        let mut s: BTreeMap<AssetId, f64> =
            (0..12).map(|i| (format!("A{i:02}"), i as f64)).collect();
        s.insert("BAD".to_string(), f64::NAN);
        let a = assign_deciles(&s, MonthId(1), ScoreKind::Upper).unwrap();
        assert_eq!(a.n_nonfinite_excluded, 1);
        assert!(!a.mapping.contains_key("BAD"));
        assert_eq!(a.mapping.len(), 12);
    }

    #[test]
    fn fewer_than_ten_is_an_error() {
        let s = scores(&[("A", 1.0), ("B", 2.0)]);
        assert!(matches!(
            assign_deciles(&s, MonthId(1), ScoreKind::Point),
            Err(PortfolioError::TooFewAssets { n: 2 })
        ));
    }

    #[test]
    fn partition_is_monotone_in_score() {
        let s: BTreeMap<AssetId, f64> =
            (0..37).map(|i| (format!("A{i:02}"), (i as f64 * 17.0) % 7.0)).collect();
        let a = assign_deciles(&s, MonthId(3), ScoreKind::Lower).unwrap();
        let mut pairs: Vec<(f64, u8)> = s.iter().map(|(id, &sc)| (sc, a.mapping[id])).collect();
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for w in pairs.windows(2) {
            if w[0].0 < w[1].0 {
                assert!(w[0].1 <= w[1].1, "higher score fell to a lower decile");
            }
        }
        let sizes = decile_sizes(&a);
        let (min, max) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        assert!(max - min <= 1);
        assert_eq!(sizes.iter().sum::<usize>(), 37);
    }
}
