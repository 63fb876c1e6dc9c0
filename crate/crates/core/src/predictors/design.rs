//! Design-matrix assembly from the panel.
//!
//! A design row is the observation's features, optionally followed by the
//! month's macro vector. Rows are ordered by (month, asset), which keeps
//! every fit deterministic for a given panel.

use crate::linalg::Mat;
use crate::panel::{AssetId, MonthId, PanelDataset};
use crate::scalar::Real;

use super::{LinearModel, PredictorError};

/// Width of the design: features plus macro columns when included.
pub fn design_width<F: Real>(panel: &PanelDataset<F>, include_macro: bool) -> usize {
    panel.feature_names().len()
        + if include_macro { panel.macro_names().len() } else { 0 }
}

/// Stack design rows and targets for all observations in `[start, end]`.
///
/// Returns the design matrix, target vector, and the (asset, month) key of
/// each row in matrix order.
pub fn assemble_design<F: Real>(
    panel: &PanelDataset<F>,
    start: MonthId,
    end: MonthId,
    include_macro: bool,
) -> Result<(Mat<F>, Vec<F>, Vec<(AssetId, MonthId)>), PredictorError> {
    let mut rows: Vec<Vec<F>> = Vec::new();
    let mut y: Vec<F> = Vec::new();
    let mut keys: Vec<(AssetId, MonthId)> = Vec::new();
    for month in start.range_to(end) {
        for obs in panel.month_slice(month) {
            let mut row = obs.features.clone();
            if include_macro {
                row.extend_from_slice(&obs.macro_vars);
            }
            rows.push(row);
            y.push(obs.next_excess_return);
            keys.push((obs.asset.clone(), obs.month));
        }
    }
    if rows.is_empty() {
        return Err(PredictorError::EmptyDesign);
    }
    Ok((Mat::from_rows(&rows), y, keys))
}

/// Like [`assemble_design`], but over several disjoint month ranges
/// (the non-contiguous training folds of the calibration cross-fit).
pub fn assemble_design_multi<F: Real>(
    panel: &PanelDataset<F>,
    ranges: &[(MonthId, MonthId)],
    include_macro: bool,
) -> Result<(Mat<F>, Vec<F>, Vec<(AssetId, MonthId)>), PredictorError> {
    let mut rows: Vec<Vec<F>> = Vec::new();
    let mut y: Vec<F> = Vec::new();
    let mut keys: Vec<(AssetId, MonthId)> = Vec::new();
    for &(start, end) in ranges {
        for month in start.range_to(end) {
            for obs in panel.month_slice(month) {
                let mut row = obs.features.clone();
                if include_macro {
                    row.extend_from_slice(&obs.macro_vars);
                }
                rows.push(row);
                y.push(obs.next_excess_return);
                keys.push((obs.asset.clone(), obs.month));
            }
        }
    }
    if rows.is_empty() {
        return Err(PredictorError::EmptyDesign);
    }
    Ok((Mat::from_rows(&rows), y, keys))
}

/// Predict every asset present in `month`, sorted by asset id.
pub fn predict_month<F: Real>(
    panel: &PanelDataset<F>,
    model: &LinearModel<F>,
    month: MonthId,
    include_macro: bool,
) -> Vec<(AssetId, F)> {
    panel
        .month_slice(month)
        .iter()
        .map(|obs| {
            let mut row = obs.features.clone();
            if include_macro {
                row.extend_from_slice(&obs.macro_vars);
            }
            (obs.asset.clone(), model.predict(&row))
        })
        .collect()
}
