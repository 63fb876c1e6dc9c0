//! Delimited-text ingestion and emission for panels and macro tables.
//!
//! Panel files are comma-separated with a header row: `asset`, `month`,
//! `ret_next`, feature columns, and optional macro columns. Cells that are
//! empty or `NA`/`NaN` count as missing; rows with any missing required
//! field are dropped and tallied in the [`LoadReport`].

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::scalar::Real;

use super::{AssetId, MonthId, PanelDataset, PanelError, PanelObservation};

/// Column-name mapping for [`load_panel`].
#[derive(Debug, Clone)]
pub struct PanelSchema {
    pub asset_col: String,
    pub month_col: String,
    pub return_col: String,
    /// Explicit feature columns; `None` means every column not otherwise claimed.
    pub feature_cols: Option<Vec<String>>,
    /// Macro columns (shared per month); empty by default.
    pub macro_cols: Vec<String>,
}

impl Default for PanelSchema {
    fn default() -> Self {
        Self {
            asset_col: "asset".into(),
            month_col: "month".into(),
            return_col: "ret_next".into(),
            feature_cols: None,
            macro_cols: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub rows_read: usize,
    pub observations: usize,
    pub dropped_missing: usize,
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
}

fn read_lines(path: &Path) -> Result<Vec<String>, PanelError> {
    let text = std::fs::read_to_string(path).map_err(|source| PanelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text.lines().map(str::to_string).collect())
}

fn header_positions(header: &str, wanted: &[&str]) -> Result<Vec<usize>, PanelError> {
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    wanted
        .iter()
        .map(|w| {
            cols.iter()
                .position(|c| c == w)
                .ok_or_else(|| PanelError::MissingColumn { column: (*w).to_string() })
        })
        .collect()
}

/// Load a panel file. Returns the dataset plus a drop-count report.
pub fn load_panel<F: Real>(
    path: &Path,
    schema: &PanelSchema,
) -> Result<(PanelDataset<F>, LoadReport), PanelError> {
    let lines = read_lines(path)?;
    let header = lines.first().ok_or(PanelError::Empty)?;
    let header_cols: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();

    let required = [
        schema.asset_col.as_str(),
        schema.month_col.as_str(),
        schema.return_col.as_str(),
    ];
    let pos = header_positions(header, &required)?;
    let (asset_pos, month_pos, ret_pos) = (pos[0], pos[1], pos[2]);

    let feature_names: Vec<String> = match &schema.feature_cols {
        Some(cols) => cols.clone(),
        None => header_cols
            .iter()
            .filter(|c| {
                **c != schema.asset_col
                    && **c != schema.month_col
                    && **c != schema.return_col
                    && !schema.macro_cols.contains(c)
            })
            .cloned()
            .collect(),
    };
    let feature_pos: Vec<usize> = feature_names
        .iter()
        .map(|n| {
            header_cols
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| PanelError::MissingColumn { column: n.clone() })
        })
        .collect::<Result<_, _>>()?;
    let macro_pos: Vec<usize> = schema
        .macro_cols
        .iter()
        .map(|n| {
            header_cols
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| PanelError::MissingColumn { column: n.clone() })
        })
        .collect::<Result<_, _>>()?;

    let mut report = LoadReport::default();
    let mut observations: Vec<PanelObservation<F>> = Vec::new();
    let mut seen: BTreeMap<(MonthId, AssetId), ()> = BTreeMap::new();

    for (line_idx, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        report.rows_read += 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let row_no = line_idx + 1; // 1-based, counting the header

        let cell = |p: usize| -> &str { cells.get(p).copied().unwrap_or("") };

        let mut missing = is_missing(cell(asset_pos)) || is_missing(cell(month_pos));
        let all_numeric: Vec<(usize, &String)> = std::iter::once((ret_pos, &schema.return_col))
            .chain(feature_pos.iter().copied().zip(feature_names.iter()))
            .chain(macro_pos.iter().copied().zip(schema.macro_cols.iter()))
            .collect();
        for (p, _) in &all_numeric {
            if is_missing(cell(*p)) {
                missing = true;
            }
        }
        if missing {
            report.dropped_missing += 1;
            continue;
        }

        let parse_num = |p: usize, name: &String| -> Result<F, PanelError> {
            let raw = cell(p);
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(F::from_f64)
                .ok_or_else(|| PanelError::Parse {
                    row: row_no,
                    column: name.clone(),
                    value: raw.to_string(),
                })
        };

        let asset: AssetId = cell(asset_pos).to_string();
        let month = cell(month_pos)
            .parse::<i32>()
            .map(MonthId)
            .map_err(|_| PanelError::Parse {
                row: row_no,
                column: schema.month_col.clone(),
                value: cell(month_pos).to_string(),
            })?;

        if seen.insert((month, asset.clone()), ()).is_some() {
            return Err(PanelError::DuplicateKey { asset, month });
        }

        let next_excess_return = parse_num(ret_pos, &schema.return_col)?;
        let features = feature_pos
            .iter()
            .zip(&feature_names)
            .map(|(&p, n)| parse_num(p, n))
            .collect::<Result<Vec<F>, _>>()?;
        let macro_vars = macro_pos
            .iter()
            .zip(&schema.macro_cols)
            .map(|(&p, n)| parse_num(p, n))
            .collect::<Result<Vec<F>, _>>()?;

        observations.push(PanelObservation {
            asset,
            month,
            features,
            macro_vars,
            next_excess_return,
        });
    }

    report.observations = observations.len();
    let panel = PanelDataset::new(observations, feature_names, schema.macro_cols.clone())?;
    Ok((panel, report))
}

/// Load a macro table file: `month` plus one column per macro variable.
/// Returns the macro names (in file order) and the per-month vectors.
pub fn load_macro_table<F: Real>(
    path: &Path,
) -> Result<(Vec<String>, BTreeMap<MonthId, Vec<F>>), PanelError> {
    let lines = read_lines(path)?;
    let header = lines.first().ok_or(PanelError::Empty)?;
    let header_cols: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    let month_pos = header_cols
        .iter()
        .position(|c| c == "month")
        .ok_or_else(|| PanelError::MissingColumn { column: "month".into() })?;
    let names: Vec<String> = header_cols
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != month_pos)
        .map(|(_, c)| c.clone())
        .collect();

    let mut table = BTreeMap::new();
    for (line_idx, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let row_no = line_idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let month = cells
            .get(month_pos)
            .and_then(|c| c.parse::<i32>().ok())
            .map(MonthId)
            .ok_or_else(|| PanelError::Parse {
                row: row_no,
                column: "month".into(),
                value: cells.get(month_pos).copied().unwrap_or("").to_string(),
            })?;
        let mut values = Vec::with_capacity(names.len());
        for (i, cell) in cells.iter().enumerate() {
            if i == month_pos {
                continue;
            }
            let v = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                PanelError::Parse {
                    row: row_no,
                    column: header_cols[i].clone(),
                    value: (*cell).to_string(),
                }
            })?;
            values.push(F::from_f64(v));
        }
        table.insert(month, values);
    }
    Ok((names, table))
}

/// Write a panel in the same layout [`load_panel`] reads. Deterministic bytes.
pub fn write_panel<F: Real>(panel: &PanelDataset<F>, path: &Path) -> Result<(), PanelError> {
    let mut out = Vec::new();
    let mut header = vec!["asset".to_string(), "month".into(), "ret_next".into()];
    header.extend(panel.feature_names().iter().cloned());
    header.extend(panel.macro_names().iter().cloned());
    writeln!(out, "{}", header.join(",")).expect("vec write");

    for o in panel.observations() {
        let mut cells = vec![o.asset.clone(), o.month.to_string(), format!("{}", o.next_excess_return)];
        cells.extend(o.features.iter().map(|v| format!("{v}")));
        cells.extend(o.macro_vars.iter().map(|v| format!("{v}")));
        writeln!(out, "{}", cells.join(",")).expect("vec write");
    }
    std::fs::write(path, out).map_err(|source| PanelError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write a macro table in the layout [`load_macro_table`] reads.
pub fn write_macro_table<F: Real>(
    names: &[String],
    table: &BTreeMap<MonthId, Vec<F>>,
    path: &Path,
) -> Result<(), PanelError> {
    let mut out = Vec::new();
    writeln!(out, "month,{}", names.join(",")).expect("vec write");
    for (month, values) in table {
        let cells: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{month},{}", cells.join(",")).expect("vec write");
    }
    std::fs::write(path, out).map_err(|source| PanelError::Io {
        path: path.display().to_string(),
        source,
    })
}
