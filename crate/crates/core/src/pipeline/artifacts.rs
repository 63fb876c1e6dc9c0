//! Artifact persistence. Every writer emits deterministic bytes (sorted
//! iteration, shortest round-trip float formatting) so a rerun from the same
//! manifest reproduces files exactly.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::{BoundRecord, HalfWidthMethod};
use crate::panel::{AssetId, MonthId};
use crate::predictors::{PredictionRecord, PredictionSource};
use crate::scalar::Real;

use super::{BacktestOutput, PipelineError, RunConfig};

/// FNV-1a over the canonical JSON encoding of the effective config.
pub fn config_hash(config: &RunConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in json.as_bytes() {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// Written next to every command's outputs; reruns from the same manifest
/// are byte-identical.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: RunConfig,
}

pub fn write_manifest(
    command: &str,
    config: &RunConfig,
    out_dir: &Path,
) -> Result<(), PipelineError> {
    let manifest = Manifest {
        command: command.to_string(),
        config_hash: config_hash(config),
        seed: config.seed,
        config: config.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_bytes(&out_dir.join(format!("manifest_{command}.json")), json.as_bytes())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| PipelineError::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_artifact(path: &Path) -> Result<String, PipelineError> {
    if !path.exists() {
        return Err(PipelineError::MissingArtifact { path: path.to_path_buf() });
    }
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn opt<F: Real>(v: Option<F>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

/// Write every backtest artifact below `out_dir`:
/// `predictions.csv`, `pools_<model>.csv`, `bounds.csv`, `series.csv`,
/// `nav_long.csv`, `report.csv`, and optionally per-strategy weights.
pub fn write_backtest_artifacts<F: Real>(
    output: &BacktestOutput<F>,
    config: &RunConfig,
    out_dir: &Path,
) -> Result<(), PipelineError> {
    // predictions
    let mut buf = Vec::new();
    writeln!(buf, "asset,month,model,mu_hat,source").unwrap();
    for artifacts in &output.artifacts {
        for p in &artifacts.predictions {
            writeln!(buf, "{},{},{},{},{}", p.asset, p.month, p.model, p.mu_hat, p.source).unwrap();
        }
    }
    write_bytes(&out_dir.join("predictions.csv"), &buf)?;

    // pools, one file per model, spec columns exactly
    for artifacts in &output.artifacts {
        let mut buf = Vec::new();
        writeln!(buf, "asset,window_id,month,residual_abs,residual_signed").unwrap();
        for pools in artifacts.pools.values() {
            for pool in pools.values() {
                for e in &pool.entries {
                    writeln!(
                        buf,
                        "{},{},{},{},{}",
                        pool.asset, pool.window_id, e.month, e.abs, e.signed
                    )
                    .unwrap();
                }
            }
        }
        write_bytes(&out_dir.join(format!("pools_{}.csv", artifacts.model_id)), &buf)?;
    }

    // bounds
    let mut buf = Vec::new();
    writeln!(buf, "asset,month,model,alpha,method,half_width,upper,lower,fallback").unwrap();
    for artifacts in &output.artifacts {
        for records in artifacts.bounds.values() {
            for b in records {
                writeln!(
                    buf,
                    "{},{},{},{},{},{},{},{},{}",
                    b.asset, b.month, b.model, b.alpha, b.method, b.half_width, b.upper, b.lower,
                    b.fallback
                )
                .unwrap();
            }
        }
    }
    write_bytes(&out_dir.join("bounds.csv"), &buf)?;

    // series and nav long format
    let mut series_buf = Vec::new();
    writeln!(series_buf, "month,strategy,gross,net,turnover,nav").unwrap();
    let mut nav_buf = Vec::new();
    writeln!(nav_buf, "month,strategy,nav").unwrap();
    for s in &output.strategies {
        let id = s.key.id();
        for (i, &month) in s.series.months.iter().enumerate() {
            writeln!(
                series_buf,
                "{},{},{},{},{},{}",
                month,
                id,
                s.series.gross_returns[i],
                s.series.net_returns[i],
                s.series.turnover[i],
                s.series.nav[i]
            )
            .unwrap();
            writeln!(nav_buf, "{},{},{}", month, id, s.series.nav[i]).unwrap();
        }
    }
    write_bytes(&out_dir.join("series.csv"), &series_buf)?;
    write_bytes(&out_dir.join("nav_long.csv"), &nav_buf)?;

    // report: one row per (model, strategy, alpha-level, method)
    let mut buf = Vec::new();
    writeln!(
        buf,
        "model,strategy,mode,method,alpha,leg,ann_return,ann_vol,sharpe,nw_tstat,nw_lags,alpha3,alpha3_t,alpha5,alpha5_t,n_months"
    )
    .unwrap();
    for s in &output.strategies {
        let r = &s.report;
        writeln!(
            buf,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.key.model,
            s.key.id(),
            s.key.mode,
            s.key.method.map_or_else(String::new, |m| m.to_string()),
            s.key.alpha.clone().unwrap_or_default(),
            if s.key.long_only { "lo" } else { "ls" },
            r.ann_return,
            r.ann_vol,
            opt(r.sharpe),
            opt(r.nw_tstat),
            r.nw_lags,
            opt(r.alpha3.map(|(a, _)| a)),
            opt(r.alpha3.map(|(_, t)| t)),
            opt(r.alpha5.map(|(a, _)| a)),
            opt(r.alpha5.map(|(_, t)| t)),
            r.n_months
        )
        .unwrap();
    }
    write_bytes(&out_dir.join("report.csv"), &buf)?;

    if config.emit_weights {
        for s in &output.strategies {
            let mut buf = Vec::new();
            writeln!(buf, "month,asset,weight").unwrap();
            for (i, &month) in s.series.months.iter().enumerate() {
                for (asset, w) in &s.series.weights[i] {
                    writeln!(buf, "{month},{asset},{w}").unwrap();
                }
            }
            write_bytes(&out_dir.join(format!("weights_{}.csv", s.key.id())), &buf)?;
        }
    }
    Ok(())
}

/// Reload `predictions.csv`, grouped by model id.
pub fn read_predictions<F: Real>(
    path: &Path,
) -> Result<BTreeMap<String, Vec<PredictionRecord<F>>>, PipelineError> {
    let text = read_artifact(path)?;
    let mut out: BTreeMap<String, Vec<PredictionRecord<F>>> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let parse_err = |what: &str| PipelineError::Validation {
            message: format!("{}: row {} bad {what}: {line}", path.display(), idx + 1),
        };
        let month = cells
            .get(1)
            .and_then(|c| c.parse::<i32>().ok())
            .map(MonthId)
            .ok_or_else(|| parse_err("month"))?;
        let mu = cells
            .get(3)
            .and_then(|c| c.parse::<f64>().ok())
            .ok_or_else(|| parse_err("mu_hat"))?;
        let source = match cells.get(4).copied() {
            Some("external") => PredictionSource::External,
            _ => PredictionSource::Builtin,
        };
        let model = cells.get(2).copied().unwrap_or("").to_string();
        out.entry(model.clone()).or_default().push(PredictionRecord {
            asset: cells.first().copied().unwrap_or("").to_string(),
            month,
            model,
            mu_hat: F::from_f64(mu),
            source,
        });
    }
    Ok(out)
}

/// Reload `bounds.csv`, grouped by (model, method, alpha string).
#[allow(clippy::type_complexity)]
pub fn read_bounds<F: Real>(
    path: &Path,
) -> Result<BTreeMap<(String, HalfWidthMethod, String), Vec<BoundRecord<F>>>, PipelineError> {
    let text = read_artifact(path)?;
    let mut out: BTreeMap<(String, HalfWidthMethod, String), Vec<BoundRecord<F>>> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let parse_err = |what: &str| PipelineError::Validation {
            message: format!("{}: row {} bad {what}: {line}", path.display(), idx + 1),
        };
        if cells.len() < 9 {
            return Err(parse_err("column count"));
        }
        let asset: AssetId = cells[0].to_string();
        let month = cells[1].parse::<i32>().map(MonthId).map_err(|_| parse_err("month"))?;
        let model = cells[2].to_string();
        let alpha: f64 = cells[3].parse().map_err(|_| parse_err("alpha"))?;
        let method = HalfWidthMethod::parse(cells[4]).ok_or_else(|| parse_err("method"))?;
        let half_width: f64 = cells[5].parse().map_err(|_| parse_err("half_width"))?;
        let mu: f64 = {
            let upper: f64 = cells[6].parse().map_err(|_| parse_err("upper"))?;
            upper - half_width
        };
        let fallback = cells[8] == "true";
        out.entry((model.clone(), method, cells[3].to_string())).or_default().push(
            BoundRecord::new(
                asset,
                month,
                model,
                alpha,
                F::from_f64(mu),
                F::from_f64(half_width),
                method,
                fallback,
            ),
        );
    }
    Ok(out)
}

/// Reload `series.csv` nav paths per strategy id.
pub fn read_nav_series(
    path: &Path,
) -> Result<BTreeMap<String, Vec<(MonthId, f64)>>, PipelineError> {
    let text = read_artifact(path)?;
    let mut out: BTreeMap<String, Vec<(MonthId, f64)>> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let parse_err = || PipelineError::Validation {
            message: format!("{}: row {} bad series row: {line}", path.display(), idx + 1),
        };
        if cells.len() < 6 {
            return Err(parse_err());
        }
        let month = cells[0].parse::<i32>().map(MonthId).map_err(|_| parse_err())?;
        let nav: f64 = cells[5].parse().map_err(|_| parse_err())?;
        out.entry(cells[1].to_string()).or_default().push((month, nav));
    }
    Ok(out)
}

/// Load a two-column `month,ret` series (benchmark returns).
pub fn load_return_series<F: Real>(
    path: &Path,
) -> Result<BTreeMap<MonthId, F>, PipelineError> {
    let text = read_artifact(path)?;
    let mut out = BTreeMap::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let parse_err = || PipelineError::Validation {
            message: format!("{}: row {} bad return row: {line}", path.display(), idx + 1),
        };
        let month = cells
            .first()
            .and_then(|c| c.trim().parse::<i32>().ok())
            .map(MonthId)
            .ok_or_else(parse_err)?;
        let ret: f64 = cells
            .get(1)
            .and_then(|c| c.trim().parse::<f64>().ok())
            .ok_or_else(parse_err)?;
        out.insert(month, F::from_f64(ret));
    }
    Ok(out)
}
