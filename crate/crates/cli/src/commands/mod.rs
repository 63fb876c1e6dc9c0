//! Subcommand implementations.

pub mod backtest;
pub mod drivers;
pub mod placebo;
pub mod report;
pub mod synth;

use std::collections::BTreeMap;
use std::path::Path;

use uasort_core::evaluation::{load_factor_table, FactorTable};
use uasort_core::panel::{load_macro_table, load_panel, merge_macro, quantile_transform, MonthId, PanelSchema};
use uasort_core::pipeline::{load_return_series, PipelineError, RunConfig};
use uasort_core::Panel;

/// Load the configured panel and apply the configured preprocessing.
pub fn load_input_panel(config: &RunConfig) -> Result<Panel, PipelineError> {
    let path = config.panel.as_ref().ok_or_else(|| PipelineError::Validation {
        message: "no panel path configured".into(),
    })?;
    let schema = PanelSchema {
        macro_cols: config.macro_cols.clone(),
        ..PanelSchema::default()
    };
    let (mut panel, report) =
        load_panel::<f64>(path, &schema).map_err(|e| PipelineError::stage("load_panel", e))?;
    if report.dropped_missing > 0 {
        eprintln!(
            "loaded {} observations ({} rows dropped for missing fields)",
            report.observations, report.dropped_missing
        );
    }
    if config.apply_quantile_transform {
        panel = quantile_transform(&panel);
    }
    if let Some(macro_path) = &config.macro_table {
        let (names, table) = load_macro_table::<f64>(macro_path)
            .map_err(|e| PipelineError::stage("load_macro_table", e))?;
        panel = merge_macro(&panel, &names, &table, config.standardize_macro)
            .map_err(|e| PipelineError::stage("merge_macro", e))?;
    }
    Ok(panel)
}

pub fn load_factors(config: &RunConfig) -> Result<Option<FactorTable<f64>>, PipelineError> {
    match &config.factors {
        None => Ok(None),
        Some(path) => Ok(Some(
            load_factor_table::<f64>(path).map_err(|e| PipelineError::stage("load_factors", e))?,
        )),
    }
}

pub fn load_benchmark(
    config: &RunConfig,
) -> Result<Option<BTreeMap<MonthId, f64>>, PipelineError> {
    match &config.benchmark {
        None => Ok(None),
        Some(path) => Ok(Some(load_return_series::<f64>(path)?)),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| PipelineError::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}
