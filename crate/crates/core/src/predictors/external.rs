//! Ingestion of externally produced point predictions.
//!
//! File layout: comma-separated with header `asset,month,model,mu_hat`
//! (the `model` column is optional; when present, only rows matching the
//! requested model id are kept). This is the path by which predictions from
//! models trained outside the artifact enter the uncertainty-adjusted
//! pipeline.

use std::collections::BTreeSet;
use std::path::Path;

use crate::panel::MonthId;
use crate::scalar::Real;

use super::{PredictionRecord, PredictionSource, PredictorError};

pub fn load_external_predictions<F: Real>(
    path: &Path,
    model_id: &str,
) -> Result<Vec<PredictionRecord<F>>, PredictorError> {
    let text = std::fs::read_to_string(path).map_err(|source| PredictorError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(PredictorError::MissingColumn {
        column: "asset".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| -> Result<usize, PredictorError> {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| PredictorError::MissingColumn { column: name.to_string() })
    };
    let asset_pos = find("asset")?;
    let month_pos = find("month")?;
    let mu_pos = find("mu_hat")?;
    let model_pos = cols.iter().position(|c| *c == "model");

    let mut seen: BTreeSet<(MonthId, String)> = BTreeSet::new();
    let mut records = Vec::new();
    for (line_idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row_no = line_idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if let Some(mp) = model_pos {
            if cells.get(mp).copied().unwrap_or("") != model_id {
                continue;
            }
        }
        let asset = cells.get(asset_pos).copied().unwrap_or("").to_string();
        if asset.is_empty() {
            return Err(PredictorError::ParseRow {
                row: row_no,
                column: "asset".into(),
                value: String::new(),
            });
        }
        let month = cells
            .get(month_pos)
            .and_then(|c| c.parse::<i32>().ok())
            .map(MonthId)
            .ok_or_else(|| PredictorError::ParseRow {
                row: row_no,
                column: "month".into(),
                value: cells.get(month_pos).copied().unwrap_or("").to_string(),
            })?;
        let mu_raw = cells.get(mu_pos).copied().unwrap_or("");
        let mu = mu_raw
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| PredictorError::ParseRow {
                row: row_no,
                column: "mu_hat".into(),
                value: mu_raw.to_string(),
            })?;
        if !seen.insert((month, asset.clone())) {
            return Err(PredictorError::DuplicatePrediction { asset, month });
        }
        records.push(PredictionRecord {
            asset,
            month,
            model: model_id.to_string(),
            mu_hat: F::from_f64(mu),
            source: PredictionSource::External,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn valid_file_loads_all_rows() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("pred.csv");
        std::fs::write(&p, "asset,month,model,mu_hat\nA,1,nn1,0.01\nB,1,nn1,0.02\nA,2,nn1,0.03\n")
            .unwrap();
        let recs = load_external_predictions::<f64>(&p, "nn1").unwrap();
        assert_eq!(recs.len(), 3);
        assert!(recs.iter().all(|r| r.source == PredictionSource::External));
        assert_eq!(recs[2].mu_hat, 0.03);
    }

    #[test]
    fn other_models_are_filtered_out() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("pred.csv");
        std::fs::write(&p, "asset,month,model,mu_hat\nA,1,nn1,0.01\nA,1,nn2,0.05\n").unwrap();
        let recs = load_external_predictions::<f64>(&p, "nn2").unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].mu_hat, 0.05);
    }

    #[test]
    fn duplicate_key_names_the_pair() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("pred.csv");
        std::fs::write(&p, "asset,month,mu_hat\nA,1,0.01\nA,1,0.02\n").unwrap();
        let err = load_external_predictions::<f64>(&p, "m").unwrap_err();
        assert!(err.to_string().contains("(A, 1)"), "{err}");
    }

    #[test]
    fn nan_mu_hat_is_a_parse_error_with_row() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("pred.csv");
        std::fs::write(&p, "asset,month,mu_hat\nA,1,0.01\nB,1,NaN\n").unwrap();
        let err = load_external_predictions::<f64>(&p, "m").unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
    }
}
