//! Bound construction for one test year from the window's residual pools.

use std::collections::BTreeMap;

use crate::panel::{AssetId, MonthId};
use crate::predictors::{PredictionRecord, RollingSplit};
use crate::scalar::Real;

use super::{
    empirical_halfwidth, normal_halfwidth, BoundRecord, CalibrationError, HalfWidthMethod,
    ResidualPool,
};

/// What happened while building bounds: how many fell back to the pooled
/// half-width and which predictions had to be excluded outright.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundCoverage {
    pub n_bounds: usize,
    pub n_fallback: usize,
    pub excluded: Vec<(AssetId, MonthId)>,
}

/// Turn one test year's point predictions into [`BoundRecord`]s.
///
/// Each asset uses the half-width from its own pool; assets whose pools are
/// smaller than `n_min` fall back to the same-method half-width computed on
/// the pooled residuals of every asset in the window (flagged `fallback`).
/// Predictions with neither basis are excluded and reported.
pub fn build_bounds<F: Real>(
    predictions: &[PredictionRecord<F>],
    pools: &BTreeMap<AssetId, ResidualPool<F>>,
    split: &RollingSplit,
    alpha: f64,
    method: HalfWidthMethod,
    n_min: usize,
) -> Result<(Vec<BoundRecord<F>>, BoundCoverage), CalibrationError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CalibrationError::AlphaOutOfRange { alpha });
    }
    for p in predictions {
        if p.month < split.test.0 || p.month > split.test.1 {
            return Err(CalibrationError::PredictionOutsideTest {
                asset: p.asset.clone(),
                month: p.month,
            });
        }
    }

    // Cross-sectional fallback pool: all residuals of the window.
    let mut pooled = ResidualPool::new("<pooled>".to_string(), split.id.clone());
    for pool in pools.values() {
        pooled.entries.extend(pool.entries.iter().copied());
    }
    let fallback_halfwidth: Option<F> = match method {
        HalfWidthMethod::Empirical => empirical_halfwidth(&pooled, alpha, 1).ok(),
        HalfWidthMethod::Normal => normal_halfwidth(&pooled, alpha, 2).ok(),
    };

    let own_halfwidth = |pool: &ResidualPool<F>| -> Result<F, CalibrationError> {
        match method {
            HalfWidthMethod::Empirical => empirical_halfwidth(pool, alpha, n_min),
            HalfWidthMethod::Normal => normal_halfwidth(pool, alpha, n_min),
        }
    };

    let mut records = Vec::with_capacity(predictions.len());
    let mut coverage = BoundCoverage::default();
    for p in predictions {
        let own = pools.get(&p.asset).map(own_halfwidth);
        let (half_width, fallback) = match own {
            Some(Ok(hw)) => (hw, false),
            Some(Err(CalibrationError::PoolTooSmall { .. })) | None => match fallback_halfwidth {
                Some(hw) => (hw, true),
                None => {
                    coverage.excluded.push((p.asset.clone(), p.month));
                    continue;
                }
            },
            Some(Err(e)) => return Err(e),
        };
        if fallback {
            coverage.n_fallback += 1;
        }
        records.push(BoundRecord::new(
            p.asset.clone(),
            p.month,
            p.model.clone(),
            alpha,
            p.mu_hat,
            half_width,
            method,
            fallback,
        ));
    }
    coverage.n_bounds = records.len();
    Ok((records, coverage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::ResidualEntry;
    use crate::panel::MonthId;
    use crate::predictors::{PredictionRecord, PredictionSource};

    fn split() -> RollingSplit {
        RollingSplit {
            id: "w61".to_string(),
            train: (MonthId(1), MonthId(36)),
            validation: (MonthId(37), MonthId(60)),
            test: (MonthId(61), MonthId(72)),
        }
    }

    fn pool(asset: &str, values: &[f64]) -> (AssetId, ResidualPool<f64>) {
        let mut p = ResidualPool::new(asset.to_string(), "w61".to_string());
        for (i, &v) in values.iter().enumerate() {
            p.entries.push(ResidualEntry { abs: v.abs(), signed: v, fold: 1, month: MonthId(i as i32 + 2) });
        }
        (asset.to_string(), p)
    }

    fn prediction(asset: &str, month: i32, mu: f64) -> PredictionRecord<f64> {
        PredictionRecord {
            asset: asset.to_string(),
            month: MonthId(month),
            model: "enet".to_string(),
            mu_hat: mu,
            source: PredictionSource::Builtin,
        }
    }

    #[test]
    fn upper_and_lower_are_exact_offsets() {
        let pools: BTreeMap<_, _> = [pool("A", &[0.05; 20]), pool("B", &[0.01; 20])].into();
        let preds = vec![prediction("A", 61, 0.01), prediction("B", 61, 0.02)];
        let (records, cov) =
            build_bounds(&preds, &pools, &split(), 0.05, HalfWidthMethod::Empirical, 12).unwrap();
        assert_eq!(cov.n_bounds, 2);
        assert_eq!(cov.n_fallback, 0);
        let a = &records[0];
        assert_eq!(a.upper, a.mu_hat + a.half_width);
        assert_eq!(a.lower, a.mu_hat - a.half_width);
        assert!(a.upper >= a.mu_hat && a.mu_hat >= a.lower);
        // mu (0.01, 0.02), half-widths (0.05, 0.01): upper order flips
        assert!((records[0].upper - 0.06).abs() < 1e-15);
        assert!((records[1].upper - 0.03).abs() < 1e-15);
        assert!(records[0].upper > records[1].upper);
    }

    #[test]
    fn zero_halfwidth_collapses_to_mu() {
        let pools: BTreeMap<_, _> = [pool("A", &[0.0; 20])].into();
        let preds = vec![prediction("A", 65, 0.015)];
        let (records, _) =
            build_bounds(&preds, &pools, &split(), 0.10, HalfWidthMethod::Empirical, 12).unwrap();
        assert_eq!(records[0].upper, 0.015);
        assert_eq!(records[0].lower, 0.015);
    }

    #[test]
    fn thin_pool_falls_back_to_pooled_residuals() {
        let pools: BTreeMap<_, _> = [pool("A", &[0.4; 24]), pool("B", &[0.1, 0.2])].into();
        let preds = vec![prediction("A", 61, 0.0), prediction("B", 61, 0.0)];
        let (records, cov) =
            build_bounds(&preds, &pools, &split(), 0.5, HalfWidthMethod::Empirical, 12).unwrap();
        assert_eq!(cov.n_fallback, 1);
        let b = records.iter().find(|r| r.asset == "B").unwrap();
        assert!(b.fallback);
        // pooled: 24 values of 0.4 plus {0.1, 0.2}; ceil(0.5*26)=13th smallest = 0.4
        assert!((b.half_width - 0.4).abs() < 1e-15);
        let a = records.iter().find(|r| r.asset == "A").unwrap();
        assert!(!a.fallback);
    }

    #[test]
    fn missing_pool_with_empty_window_is_excluded() {
        let pools: BTreeMap<AssetId, ResidualPool<f64>> = BTreeMap::new();
        let preds = vec![prediction("A", 61, 0.0)];
        let (records, cov) =
            build_bounds(&preds, &pools, &split(), 0.05, HalfWidthMethod::Empirical, 12).unwrap();
        assert!(records.is_empty());
        assert_eq!(cov.excluded, vec![("A".to_string(), MonthId(61))]);
    }

    #[test]
    fn prediction_outside_test_year_is_rejected() {
        let pools: BTreeMap<_, _> = [pool("A", &[0.1; 20])].into();
        let preds = vec![prediction("A", 60, 0.0)];
        let err = build_bounds(&preds, &pools, &split(), 0.05, HalfWidthMethod::Empirical, 12)
            .unwrap_err();
        assert!(matches!(err, CalibrationError::PredictionOutsideTest { .. }));
    }

    #[test]
    fn equal_halfwidths_preserve_point_ranking() {
        let pools: BTreeMap<_, _> = [pool("A", &[0.3; 20]), pool("B", &[0.3; 20]), pool("C", &[0.3; 20])].into();
        let preds = vec![
            prediction("A", 61, 0.01),
            prediction("B", 61, 0.03),
            prediction("C", 61, 0.02),
        ];
        let (records, _) =
            build_bounds(&preds, &pools, &split(), 0.05, HalfWidthMethod::Empirical, 12).unwrap();
        let mut by_upper: Vec<&str> = {
            let mut v: Vec<&BoundRecord<f64>> = records.iter().collect();
            v.sort_by(|x, y| x.upper.partial_cmp(&y.upper).unwrap());
            v.iter().map(|r| r.asset.as_str()).collect()
        };
        let by_mu: Vec<&str> = {
            let mut v: Vec<&BoundRecord<f64>> = records.iter().collect();
            v.sort_by(|x, y| x.mu_hat.partial_cmp(&y.mu_hat).unwrap());
            v.iter().map(|r| r.asset.as_str()).collect()
        };
        assert_eq!(by_upper, by_mu);
        by_upper.reverse();
        assert_eq!(by_upper, vec!["B", "C", "A"]);
    }
}
