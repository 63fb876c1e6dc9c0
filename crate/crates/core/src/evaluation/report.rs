//! Report assembly: one performance row per strategy, and the factor-file
//! loader (`month,f1..f5` delimited text).

use std::collections::BTreeMap;
use std::path::Path;

use crate::panel::MonthId;
use crate::scalar::Real;

use super::{
    annualize, default_nw_lags, factor_alpha, newey_west_tstat, EvaluationError, FactorTable,
    PerformanceReport,
};

/// Build the report row for one strategy's monthly net returns.
///
/// Factor alphas are computed only for dollar-neutral strategies and only
/// when a factor table is supplied: a 3-factor table yields `alpha3`, a
/// 5-factor table yields both `alpha3` (first three factors) and `alpha5`.
pub fn build_report<F: Real>(
    strategy_id: &str,
    months: &[MonthId],
    net_returns: &[F],
    factors: Option<&FactorTable<F>>,
    nw_lags_override: Option<usize>,
    dollar_neutral: bool,
) -> Result<PerformanceReport<F>, EvaluationError> {
    let n = net_returns.len();
    let (ann_return, ann_vol) = annualize(net_returns)?;
    let sharpe = if ann_vol > F::zero() { Some(ann_return / ann_vol) } else { None };
    let nw_lags = nw_lags_override.unwrap_or_else(|| default_nw_lags(n));
    let nw_tstat = match newey_west_tstat(net_returns, nw_lags) {
        Ok(t) => Some(t),
        Err(EvaluationError::DegenerateVariance) => None,
        Err(e) => return Err(e),
    };

    let mut alpha3 = None;
    let mut alpha5 = None;
    if dollar_neutral {
        if let Some(table) = factors {
            match table.n_factors() {
                3 => {
                    let rows = table.aligned(months)?;
                    alpha3 = Some(factor_alpha(net_returns, &rows, nw_lags)?);
                }
                5 => {
                    let rows3 = table.truncated(3).aligned(months)?;
                    alpha3 = Some(factor_alpha(net_returns, &rows3, nw_lags)?);
                    let rows5 = table.aligned(months)?;
                    alpha5 = Some(factor_alpha(net_returns, &rows5, nw_lags)?);
                }
                n => return Err(EvaluationError::FactorCountUnsupported { n }),
            }
        }
    }

    Ok(PerformanceReport {
        strategy_id: strategy_id.to_string(),
        ann_return,
        ann_vol,
        sharpe,
        nw_tstat,
        nw_lags,
        alpha3,
        alpha5,
        n_months: n,
    })
}

/// Load a factor table: `month` column plus one column per factor.
pub fn load_factor_table<F: Real>(path: &Path) -> Result<FactorTable<F>, EvaluationError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvaluationError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(EvaluationError::Parse {
        row: 1,
        column: "month".into(),
        value: "<empty file>".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let month_pos = cols.iter().position(|c| *c == "month").ok_or(EvaluationError::Parse {
        row: 1,
        column: "month".into(),
        value: header.to_string(),
    })?;
    let factor_names: Vec<String> = cols
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != month_pos)
        .map(|(_, c)| c.to_string())
        .collect();

    let mut values: BTreeMap<MonthId, Vec<F>> = BTreeMap::new();
    for (line_idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row_no = line_idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let month = cells
            .get(month_pos)
            .and_then(|c| c.parse::<i32>().ok())
            .map(MonthId)
            .ok_or_else(|| EvaluationError::Parse {
                row: row_no,
                column: "month".into(),
                value: cells.get(month_pos).copied().unwrap_or("").to_string(),
            })?;
        let mut row = Vec::with_capacity(factor_names.len());
        for (i, cell) in cells.iter().enumerate() {
            if i == month_pos {
                continue;
            }
            let v = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                EvaluationError::Parse {
                    row: row_no,
                    column: cols[i].to_string(),
                    value: (*cell).to_string(),
                }
            })?;
            row.push(F::from_f64(v));
        }
        values.insert(month, row);
    }
    Ok(FactorTable { factor_names, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn months(n: usize) -> Vec<MonthId> {
        (1..=n as i32).map(MonthId).collect()
    }

    fn three_factor_table(n: usize) -> FactorTable<f64> {
        let values = (1..=n as i32)
            .map(|m| (MonthId(m), vec![0.001 * m as f64, -0.002 * ((m % 5) as f64), 0.0005 * ((m * m) % 7) as f64]))
            .collect();
        FactorTable { factor_names: vec!["f1".into(), "f2".into(), "f3".into()], values }
    }

    #[test]
    fn long_only_reports_never_carry_alphas() {
        let n = 30;
        let returns: Vec<f64> = (0..n).map(|i| 0.01 + (i as f64) * 1e-4).collect();
        let table = three_factor_table(n);
        let report =
            build_report("lo", &months(n), &returns, Some(&table), None, false).unwrap();
        assert!(report.alpha3.is_none());
        assert!(report.alpha5.is_none());
    }

    #[test]
    fn dollar_neutral_reports_carry_alpha3_for_a_3_factor_table() {
        let n = 30;
        let returns: Vec<f64> = (0..n).map(|i| 0.01 + (i as f64) * 1e-4).collect();
        let table = three_factor_table(n);
        let report = build_report("ls", &months(n), &returns, Some(&table), None, true).unwrap();
        assert!(report.alpha3.is_some());
        assert!(report.alpha5.is_none());
        assert_eq!(report.n_months, n);
        // invariant: sharpe = ann_return / ann_vol
        let s = report.sharpe.unwrap();
        assert_eq!(s, report.ann_return / report.ann_vol);
    }

    #[test]
    fn factor_gap_is_reported_with_the_month() {
        let n = 30;
        let returns: Vec<f64> = (0..n).map(|i| 0.01 + (i as f64) * 1e-4).collect();
        let mut table = three_factor_table(n);
        table.values.remove(&MonthId(17));
        let err = build_report("ls", &months(n), &returns, Some(&table), None, true).unwrap_err();
        assert!(matches!(err, EvaluationError::FactorCoverage { month: MonthId(17) }));
    }

    #[test]
    fn factor_file_roundtrip() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("factors.csv");
        std::fs::write(&p, "month,f1,f2,f3,f4,f5\n1,0.01,0.02,0.03,0.04,0.05\n2,-0.01,0.0,0.0,0.0,0.0\n")
            .unwrap();
        let table = load_factor_table::<f64>(&p).unwrap();
        assert_eq!(table.n_factors(), 5);
        assert_eq!(table.values[&MonthId(2)][0], -0.01);
        let t3 = table.truncated(3);
        assert_eq!(t3.n_factors(), 3);
        assert_eq!(t3.values[&MonthId(1)], vec![0.01, 0.02, 0.03]);
    }
}
