//! Empirical-quantile versus normal-approximation bounds, one row per
//! (model, alpha): the Sharpe ratio of the uncertainty-adjusted spread under
//! each half-width method next to the point-prediction benchmark, plus the
//! median half-widths the two methods produced.

use crate::calibration::BoundRecord;
use crate::evaluation::sharpe;
use crate::panel::PanelDataset;
use crate::portfolio::{point_spread_series, ua_spread_series};
use crate::predictors::PredictionRecord;
use crate::scalar::Real;

use super::ExperimentsError;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalVsEmpiricalRow<F> {
    pub model: String,
    pub alpha: f64,
    pub sharpe_point: F,
    pub sharpe_empirical: F,
    pub sharpe_normal: F,
    pub median_halfwidth_empirical: F,
    pub median_halfwidth_normal: F,
}

fn median<F: Real>(values: &mut Vec<F>) -> F {
    if values.is_empty() {
        return F::zero();
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite half-widths"));
    values[values.len() / 2]
}

/// Compare the two half-width methods at one alpha. `empirical_bounds` and
/// `normal_bounds` must come from the same predictions and pools.
pub fn normal_vs_empirical<F: Real>(
    model: &str,
    predictions: &[PredictionRecord<F>],
    empirical_bounds: &[BoundRecord<F>],
    normal_bounds: &[BoundRecord<F>],
    panel: &PanelDataset<F>,
    cost_rate: f64,
) -> Result<NormalVsEmpiricalRow<F>, ExperimentsError> {
    let alpha = empirical_bounds.first().map_or(0.0, |b| b.alpha);
    let point = point_spread_series(&format!("{model}_point"), predictions, panel, cost_rate)?;
    let emp = ua_spread_series(&format!("{model}_emp"), empirical_bounds, panel, cost_rate)?;
    let norm = ua_spread_series(&format!("{model}_norm"), normal_bounds, panel, cost_rate)?;

    Ok(NormalVsEmpiricalRow {
        model: model.to_string(),
        alpha,
        sharpe_point: sharpe(&point.net_returns).unwrap_or_else(F::zero),
        sharpe_empirical: sharpe(&emp.net_returns).unwrap_or_else(F::zero),
        sharpe_normal: sharpe(&norm.net_returns).unwrap_or_else(F::zero),
        median_halfwidth_empirical: median(&mut empirical_bounds.iter().map(|b| b.half_width).collect()),
        median_halfwidth_normal: median(&mut normal_bounds.iter().map(|b| b.half_width).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::HalfWidthMethod;
    use crate::panel::{MonthId, PanelDataset, PanelObservation};
    use crate::predictors::PredictionSource;

    #[test]
    fn zero_halfwidths_make_all_sharpes_equal() {
        let n_assets = 20;
        let mut rows = Vec::new();
        let mut preds = Vec::new();
        let mut bounds = Vec::new();
        for m in 1..=26 {
            for i in 0..n_assets {
                let asset = format!("A{i:02}");
                let mu = ((i * 3 + m as usize) % 9) as f64 * 0.002;
                rows.push(PanelObservation {
                    asset: asset.clone(),
                    month: MonthId(m),
                    features: vec![0.0],
                    macro_vars: vec![],
                    next_excess_return: mu + ((m as usize * i) % 5) as f64 * 1e-4,
                });
                preds.push(PredictionRecord {
                    asset: asset.clone(),
                    month: MonthId(m),
                    model: "m".into(),
                    mu_hat: mu,
                    source: PredictionSource::Builtin,
                });
                bounds.push(BoundRecord::new(
                    asset,
                    MonthId(m),
                    "m".into(),
                    0.05,
                    mu,
                    0.0,
                    HalfWidthMethod::Empirical,
                    false,
                ));
            }
        }
        let panel = PanelDataset::new(rows, vec!["f1".into()], vec![]).unwrap();
        let row = normal_vs_empirical("m", &preds, &bounds, &bounds, &panel, 0.0).unwrap();
        assert!((row.sharpe_point - row.sharpe_empirical).abs() < 1e-12);
        assert!((row.sharpe_point - row.sharpe_normal).abs() < 1e-12);
        assert_eq!(row.median_halfwidth_empirical, 0.0);
    }
}
