//! Studies over backtest artifacts: the placebo permutation table, the
//! ranking-improvement driver regressions, the empirical-vs-normal bound
//! comparison, and scaled net-value pairs for plotting.

use std::collections::BTreeMap;

use crate::calibration::{build_bounds, BoundRecord, HalfWidthMethod};
use crate::experiments::{
    fe_regression, normal_vs_empirical, placebo_suite, ranking_improvements, FeTerm,
    NormalVsEmpiricalRow, PlaceboInputs, PlaceboRow, RankImprovementPanel,
};
use crate::panel::{AssetId, MonthId, PanelDataset};
use crate::portfolio::scale_path;
use crate::scalar::Real;

use super::{ModelArtifacts, PipelineError, RunConfig, StrategyKey};

/// The (method, alpha) a study runs at: empirical at 0.05 when configured,
/// otherwise the first configured combination.
pub fn preferred_bound_key<F: Real>(
    artifacts: &ModelArtifacts<F>,
) -> Option<(HalfWidthMethod, String)> {
    let preferred = (HalfWidthMethod::Empirical, "0.05".to_string());
    if artifacts.bounds.contains_key(&preferred) {
        return Some(preferred);
    }
    artifacts
        .bounds
        .keys()
        .find(|(m, _)| *m == HalfWidthMethod::Empirical)
        .or_else(|| artifacts.bounds.keys().next())
        .cloned()
}

/// One placebo row per model at its preferred (method, alpha).
pub fn placebo_study<F: Real>(
    artifacts: &[ModelArtifacts<F>],
    panel: &PanelDataset<F>,
    config: &RunConfig,
) -> Result<Vec<PlaceboRow<F>>, PipelineError> {
    let mut rows = Vec::new();
    for model_artifacts in artifacts {
        let key = preferred_bound_key(model_artifacts).ok_or_else(|| {
            PipelineError::Validation {
                message: format!("model {} has no bounds", model_artifacts.model_id),
            }
        })?;
        let inputs = PlaceboInputs {
            model: &model_artifacts.model_id,
            predictions: &model_artifacts.predictions,
            bounds: &model_artifacts.bounds[&key],
            panel,
            cost_rate: config.cost_rate,
            year_block: config.year_block_time_shuffle,
        };
        rows.push(
            placebo_suite(&inputs, &config.seeds)
                .map_err(|e| PipelineError::stage("placebo_suite", e))?,
        );
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriverTermRow<F> {
    pub term: String,
    pub coef_upper: F,
    pub z_upper: F,
    pub coef_lower: F,
    pub z_lower: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriverStudyResult<F> {
    pub model: String,
    pub n_obs: usize,
    pub n_firms: usize,
    pub rows: Vec<DriverTermRow<F>>,
}

/// Rank-improvement panel for one model at its preferred (method, alpha).
/// Point, upper, and lower scores all come from the bound records, so the
/// three sorts cover the identical universe by construction.
pub fn rank_improvement_panel<F: Real>(
    bounds: &[BoundRecord<F>],
) -> Result<RankImprovementPanel, PipelineError> {
    let mut by_month: BTreeMap<MonthId, (BTreeMap<AssetId, F>, BTreeMap<AssetId, F>, BTreeMap<AssetId, F>)> =
        BTreeMap::new();
    for b in bounds {
        let entry = by_month.entry(b.month).or_default();
        entry.0.insert(b.asset.clone(), b.mu_hat);
        entry.1.insert(b.asset.clone(), b.upper);
        entry.2.insert(b.asset.clone(), b.lower);
    }
    let mut panel = RankImprovementPanel::default();
    for (month, (point, upper, lower)) in by_month {
        panel.extend(
            ranking_improvements(&point, &upper, &lower, month)
                .map_err(|e| PipelineError::stage("ranking_improvements", e))?,
        );
    }
    Ok(panel)
}

/// Driver regressions for one model's bound records.
pub fn drivers_for_bounds<F: Real>(
    model_id: &str,
    bounds: &[BoundRecord<F>],
    panel: &PanelDataset<F>,
    config: &RunConfig,
) -> Result<DriverStudyResult<F>, PipelineError> {
    let feature_names: Vec<String> = if config.drivers.x_features.is_empty() {
        panel.feature_names().to_vec()
    } else {
        config.drivers.x_features.clone()
    };
    let macro_names: Vec<String> = if config.drivers.z_macros.is_empty() {
        panel.macro_names().to_vec()
    } else {
        config.drivers.z_macros.clone()
    };
    let feature_idx: Vec<usize> = feature_names
        .iter()
        .map(|n| {
            panel.feature_names().iter().position(|f| f == n).ok_or_else(|| {
                PipelineError::Validation { message: format!("unknown feature column {n:?}") }
            })
        })
        .collect::<Result<_, _>>()?;
    let macro_idx: Vec<usize> = macro_names
        .iter()
        .map(|n| {
            panel.macro_names().iter().position(|m| m == n).ok_or_else(|| {
                PipelineError::Validation { message: format!("unknown macro column {n:?}") }
            })
        })
        .collect::<Result<_, _>>()?;

    let rank_panel = rank_improvement_panel(bounds)?;

    // Assemble the regression sample: one row per (asset, month) with
    // formation-month characteristics and that month's macro state.
    let mut firms: Vec<AssetId> = Vec::new();
    let mut y_upper: Vec<F> = Vec::new();
    let mut y_lower: Vec<F> = Vec::new();
    let mut x_cols: Vec<Vec<F>> = vec![Vec::new(); feature_idx.len()];
    let mut z_cols: Vec<Vec<F>> = vec![Vec::new(); macro_idx.len()];
    for row in &rank_panel.rows {
        let obs = panel.get(&row.asset, row.month).ok_or_else(|| {
            PipelineError::Validation {
                message: format!(
                    "bound record for ({}, {}) has no panel observation",
                    row.asset, row.month
                ),
            }
        })?;
        firms.push(row.asset.clone());
        y_upper.push(F::from_f64(row.delta_rank_upper));
        y_lower.push(F::from_f64(row.delta_rank_lower));
        for (c, &j) in x_cols.iter_mut().zip(&feature_idx) {
            c.push(obs.features[j]);
        }
        for (c, &j) in z_cols.iter_mut().zip(&macro_idx) {
            c.push(obs.macro_vars[j]);
        }
    }

    let mut terms: Vec<FeTerm<F>> = Vec::new();
    for (name, values) in feature_names.iter().zip(x_cols) {
        terms.push(FeTerm::new(name.clone(), values));
    }
    for (name, values) in macro_names.iter().zip(z_cols) {
        terms.push(FeTerm::new(name.clone(), values));
    }
    if config.drivers.interactions {
        let n_x = feature_names.len();
        let n_z = macro_names.len();
        let mut interactions = Vec::with_capacity(n_x * n_z);
        for xi in 0..n_x {
            for zi in 0..n_z {
                interactions.push(terms[xi].interact(&terms[n_x + zi]));
            }
        }
        terms.extend(interactions);
    }

    let upper = fe_regression(&firms, &y_upper, &terms)
        .map_err(|e| PipelineError::stage("fe_regression_upper", e))?;
    let lower = fe_regression(&firms, &y_lower, &terms)
        .map_err(|e| PipelineError::stage("fe_regression_lower", e))?;

    let rows = upper
        .terms
        .iter()
        .map(|t| DriverTermRow {
            term: t.clone(),
            coef_upper: upper.coefficients[t],
            z_upper: upper.z_stats[t],
            coef_lower: lower.coefficients[t],
            z_lower: lower.z_stats[t],
        })
        .collect();
    Ok(DriverStudyResult {
        model: model_id.to_string(),
        n_obs: upper.n_obs,
        n_firms: upper.n_firms,
        rows,
    })
}

/// Fixed-effects driver regressions of the ranking improvements on firm
/// characteristics, macro variables, and their interactions, one result per
/// model at its preferred (method, alpha).
pub fn drivers_study<F: Real>(
    artifacts: &[ModelArtifacts<F>],
    panel: &PanelDataset<F>,
    config: &RunConfig,
) -> Result<Vec<DriverStudyResult<F>>, PipelineError> {
    let mut out = Vec::new();
    for model_artifacts in artifacts {
        let key = preferred_bound_key(model_artifacts).ok_or_else(|| {
            PipelineError::Validation {
                message: format!("model {} has no bounds", model_artifacts.model_id),
            }
        })?;
        out.push(drivers_for_bounds(
            &model_artifacts.model_id,
            &model_artifacts.bounds[&key],
            panel,
            config,
        )?);
    }
    Ok(out)
}

pub type NormalVsEmpiricalTable<F> = Vec<NormalVsEmpiricalRow<F>>;

/// Sharpe per (model, method, alpha) plus the point benchmark. Bounds for
/// both methods are rebuilt from the stored pools, so the comparison does
/// not depend on which methods the backtest itself was configured with.
pub fn normal_vs_empirical_study<F: Real>(
    artifacts: &[ModelArtifacts<F>],
    panel: &PanelDataset<F>,
    config: &RunConfig,
) -> Result<NormalVsEmpiricalTable<F>, PipelineError> {
    let mut table = Vec::new();
    for model_artifacts in artifacts {
        for &alpha in &config.alphas {
            let per_method = |method: HalfWidthMethod| -> Result<Vec<BoundRecord<F>>, PipelineError> {
                let mut all = Vec::new();
                for split in &model_artifacts.splits {
                    let split_predictions: Vec<_> = model_artifacts
                        .predictions
                        .iter()
                        .filter(|p| p.month >= split.test.0 && p.month <= split.test.1)
                        .cloned()
                        .collect();
                    if split_predictions.is_empty() {
                        continue;
                    }
                    let (mut records, _) = build_bounds(
                        &split_predictions,
                        &model_artifacts.pools[&split.id],
                        split,
                        alpha,
                        method,
                        config.n_min,
                    )
                    .map_err(|e| PipelineError::stage("build_bounds", e))?;
                    all.append(&mut records);
                }
                Ok(all)
            };
            let empirical = per_method(HalfWidthMethod::Empirical)?;
            let normal = per_method(HalfWidthMethod::Normal)?;
            table.push(
                normal_vs_empirical(
                    &model_artifacts.model_id,
                    &model_artifacts.predictions,
                    &empirical,
                    &normal,
                    panel,
                    config.cost_rate,
                )
                .map_err(|e| PipelineError::stage("normal_vs_empirical", e))?,
            );
        }
    }
    Ok(table)
}

/// Paired net-value paths for plotting: the point benchmark and the
/// uncertainty-adjusted path rescaled so terminal values match.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledNavPair {
    pub model: String,
    pub months: Vec<MonthId>,
    pub point_nav: Vec<f64>,
    pub ua_nav_scaled: Vec<f64>,
    pub ua_strategy: String,
}

/// Build pairs from a strategy nav map (as reloaded from `series.csv`).
/// For each model the point long-short path is paired with the first
/// uncertainty-adjusted long-short path (empirical at 0.05 preferred).
pub fn scaled_nav_pairs(
    nav_by_strategy: &BTreeMap<String, Vec<(MonthId, f64)>>,
    models: &[String],
) -> Result<Vec<ScaledNavPair>, PipelineError> {
    let mut pairs = Vec::new();
    for model in models {
        let point_id = StrategyKey::point(model, false).id();
        let point = nav_by_strategy.get(&point_id).ok_or_else(|| PipelineError::Validation {
            message: format!("series for strategy {point_id:?} not found"),
        })?;
        let preferred = format!("{model}_ua_empirical_a0.05_ls");
        let ua_id = if nav_by_strategy.contains_key(&preferred) {
            preferred
        } else {
            nav_by_strategy
                .keys()
                .find(|k| k.starts_with(&format!("{model}_ua_")) && k.ends_with("_ls"))
                .cloned()
                .ok_or_else(|| PipelineError::Validation {
                    message: format!("no uncertainty-adjusted series found for model {model:?}"),
                })?
        };
        let ua = &nav_by_strategy[&ua_id];
        if ua.len() != point.len() {
            return Err(PipelineError::Validation {
                message: format!(
                    "nav paths for {point_id} and {ua_id} have different lengths ({} vs {})",
                    point.len(),
                    ua.len()
                ),
            });
        }
        let months: Vec<MonthId> = point.iter().map(|(m, _)| *m).collect();
        let point_nav: Vec<f64> = point.iter().map(|(_, v)| *v).collect();
        let ua_nav: Vec<f64> = ua.iter().map(|(_, v)| *v).collect();
        let ua_nav_scaled = scale_path(&ua_nav, &point_nav)
            .map_err(|e| PipelineError::stage("scale_path", e))?;
        pairs.push(ScaledNavPair {
            model: model.clone(),
            months,
            point_nav,
            ua_nav_scaled,
            ua_strategy: ua_id,
        });
    }
    Ok(pairs)
}
