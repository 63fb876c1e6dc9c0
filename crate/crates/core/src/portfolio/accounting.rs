//! Turnover, transaction costs, realized returns, and net-value paths.

use std::collections::{BTreeMap, BTreeSet};

use crate::panel::{AssetId, MonthId, PanelDataset};
use crate::scalar::Real;

use super::{MonthWeights, PortfolioError, PortfolioSeries};

/// One-way notional traded between two target weight vectors:
/// `sum_i |w_{i,t} - w_{i,t-1}|` over the union of holdings. The first
/// month trades the full book (`prev` empty). Intra-month weight drift is
/// ignored; turnover compares target to target.
pub fn compute_turnover<F: Real>(prev: &MonthWeights<F>, cur: &MonthWeights<F>) -> F {
    let assets: BTreeSet<&AssetId> = prev.keys().chain(cur.keys()).collect();
    assets
        .into_iter()
        .map(|a| {
            let p = prev.get(a).copied().unwrap_or_else(F::zero);
            let c = cur.get(a).copied().unwrap_or_else(F::zero);
            (c - p).abs()
        })
        .sum()
}

/// Proportional cost model: `net = gross - cost_rate * turnover`.
pub fn apply_costs<F: Real>(gross_return: F, turnover: F, cost_rate: f64) -> F {
    gross_return - F::from_f64(cost_rate) * turnover
}

/// Realize a strategy: dot each month's weights with the held assets'
/// next-month excess returns, subtract the benchmark when given (long-only
/// accounting), apply costs, and compound the net-value path from 1.
pub fn realize<F: Real>(
    strategy_id: &str,
    weights_by_month: &BTreeMap<MonthId, MonthWeights<F>>,
    panel: &PanelDataset<F>,
    benchmark: Option<&BTreeMap<MonthId, F>>,
    cost_rate: f64,
) -> Result<PortfolioSeries<F>, PortfolioError> {
    if weights_by_month.is_empty() {
        return Err(PortfolioError::EmptyWeights);
    }
    let mut months = Vec::with_capacity(weights_by_month.len());
    let mut weights = Vec::with_capacity(weights_by_month.len());
    let mut gross_returns = Vec::with_capacity(weights_by_month.len());
    let mut turnover = Vec::with_capacity(weights_by_month.len());
    let mut net_returns = Vec::with_capacity(weights_by_month.len());
    let mut nav = Vec::with_capacity(weights_by_month.len());

    let empty: MonthWeights<F> = BTreeMap::new();
    let mut prev = &empty;
    let mut nav_level = F::one();
    for (&month, w) in weights_by_month {
        let mut gross = F::zero();
        for (asset, &weight) in w {
            let obs = panel
                .get(asset, month)
                .ok_or_else(|| PortfolioError::MissingReturn { asset: asset.clone(), month })?;
            gross += weight * obs.next_excess_return;
        }
        if let Some(bench) = benchmark {
            let b = bench
                .get(&month)
                .copied()
                .ok_or(PortfolioError::MissingBenchmark { month })?;
            gross -= b;
        }
        let to = compute_turnover(prev, w);
        let net = apply_costs(gross, to, cost_rate);
        nav_level *= F::one() + net;

        months.push(month);
        weights.push(w.clone());
        gross_returns.push(gross);
        turnover.push(to);
        net_returns.push(net);
        nav.push(nav_level);
        prev = &weights_by_month[&month];
    }

    Ok(PortfolioSeries {
        strategy_id: strategy_id.to_string(),
        months,
        weights,
        gross_returns,
        turnover,
        net_returns,
        nav,
    })
}

/// Rescale a net-value path by a constant so its terminal value matches the
/// benchmark path's terminal value. Monthly simple returns are unchanged.
pub fn scale_path<F: Real>(ua_nav: &[F], benchmark_nav: &[F]) -> Result<Vec<F>, PortfolioError> {
    if ua_nav.len() != benchmark_nav.len() {
        return Err(PortfolioError::PathLengthMismatch {
            left: ua_nav.len(),
            right: benchmark_nav.len(),
        });
    }
    let ua_terminal = ua_nav.last().copied().unwrap_or_else(F::one);
    let bench_terminal = benchmark_nav.last().copied().unwrap_or_else(F::one);
    if ua_terminal == F::zero() {
        return Err(PortfolioError::ZeroTerminal);
    }
    let factor = bench_terminal / ua_terminal;
    Ok(ua_nav.iter().map(|&v| v * factor).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::{PanelDataset, PanelObservation};

    fn weights(pairs: &[(&str, f64)]) -> MonthWeights<f64> {
        pairs.iter().map(|(a, w)| (a.to_string(), *w)).collect()
    }

    fn panel_with_returns(months: &[(i32, &[(&str, f64)])]) -> PanelDataset<f64> {
        let mut rows = Vec::new();
        for &(m, assets) in months {
            for &(a, r) in assets {
                rows.push(PanelObservation {
                    asset: a.to_string(),
                    month: MonthId(m),
                    features: vec![0.0],
                    macro_vars: vec![],
                    next_excess_return: r,
                });
            }
        }
        PanelDataset::new(rows, vec!["f1".into()], vec![]).unwrap()
    }

    #[test]
    fn identical_weights_have_zero_turnover() {
        let w = weights(&[("A", 0.5), ("B", -0.5)]);
        assert_eq!(compute_turnover(&w, &w), 0.0);
    }

    #[test]
    fn full_liquidation_of_unit_spread_is_two() {
        let w = weights(&[("A", 0.5), ("B", 0.5), ("C", -0.5), ("D", -0.5)]);
        let empty = MonthWeights::new();
        assert_eq!(compute_turnover(&w, &empty), 2.0);
        // first month trades the full book
        assert_eq!(compute_turnover(&empty, &w), 2.0);
    }

    #[test]
    fn rotating_one_of_two_long_names_costs_one() {
        let prev = weights(&[("A", 0.5), ("B", 0.5)]);
        let cur = weights(&[("A", 0.5), ("C", 0.5)]);
        assert_eq!(compute_turnover(&prev, &cur), 1.0);
    }

    #[test]
    fn cost_arithmetic_matches_hand_example() {
        // gross 1.00%, turnover 2.0, rate 20bp -> net 0.60%
        let net: f64 = apply_costs(0.01, 2.0, 0.0020);
        assert!((net - 0.006).abs() < 1e-15);
        assert_eq!(apply_costs(0.01f64, 0.0, 0.0020), 0.01);
        assert_eq!(apply_costs(0.01f64, 2.0, 0.0), 0.01);
    }

    #[test]
    fn realize_dots_weights_with_returns() {
        let panel = panel_with_returns(&[(1, &[("A", 0.02), ("B", 0.0), ("C", -0.01), ("D", 0.01)])]);
        let mut by_month = BTreeMap::new();
        by_month.insert(
            MonthId(1),
            weights(&[("A", 0.5), ("B", 0.5), ("C", -0.5), ("D", -0.5)]),
        );
        let series = realize("test", &by_month, &panel, None, 0.0).unwrap();
        // 0.5*2% + 0.5*0% - 0.5*(-1%) - 0.5*1% = 1.0%
        assert!((series.gross_returns[0] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn zero_sum_weights_are_market_neutral() {
        let panel = panel_with_returns(&[(1, &[("A", 0.03), ("B", 0.03), ("C", 0.03), ("D", 0.03)])]);
        let mut by_month = BTreeMap::new();
        by_month.insert(
            MonthId(1),
            weights(&[("A", 0.5), ("B", 0.5), ("C", -0.5), ("D", -0.5)]),
        );
        let series = realize("test", &by_month, &panel, None, 0.0).unwrap();
        assert!(series.gross_returns[0].abs() < 1e-15);
    }

    #[test]
    fn single_asset_full_weight() {
        let panel = panel_with_returns(&[(1, &[("A", 0.01)])]);
        let mut by_month = BTreeMap::new();
        by_month.insert(MonthId(1), weights(&[("A", 1.0)]));
        let series = realize("solo", &by_month, &panel, None, 0.0).unwrap();
        assert!((series.gross_returns[0] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn missing_return_names_asset_and_month() {
        let panel = panel_with_returns(&[(1, &[("A", 0.01)])]);
        let mut by_month = BTreeMap::new();
        by_month.insert(MonthId(1), weights(&[("A", 0.5), ("Z", 0.5)]));
        let err = realize("test", &by_month, &panel, None, 0.0).unwrap_err();
        assert!(err.to_string().contains('Z'));
        assert!(err.to_string().contains("month 1"));
    }

    #[test]
    fn benchmark_subtraction_and_missing_month() {
        let panel = panel_with_returns(&[(1, &[("A", 0.02)])]);
        let mut by_month = BTreeMap::new();
        by_month.insert(MonthId(1), weights(&[("A", 1.0)]));
        let mut bench = BTreeMap::new();
        bench.insert(MonthId(1), 0.02);
        let series = realize("lo", &by_month, &panel, Some(&bench), 0.0).unwrap();
        assert_eq!(series.gross_returns[0], 0.0);

        let empty_bench: BTreeMap<MonthId, f64> = BTreeMap::new();
        let err = realize("lo", &by_month, &panel, Some(&empty_bench), 0.0).unwrap_err();
        assert!(matches!(err, PortfolioError::MissingBenchmark { month: MonthId(1) }));
    }

    #[test]
    fn nav_compounds_net_returns() {
        let panel = panel_with_returns(&[
            (1, &[("A", 0.10)]),
            (2, &[("A", -0.05)]),
        ]);
        let mut by_month = BTreeMap::new();
        by_month.insert(MonthId(1), weights(&[("A", 1.0)]));
        by_month.insert(MonthId(2), weights(&[("A", 1.0)]));
        let series = realize("nav", &by_month, &panel, None, 0.0).unwrap();
        // first month trades the book: turnover 1, but rate 0 keeps net = gross
        let expect = 1.10 * 0.95;
        assert!((series.terminal_nav() - expect).abs() < 1e-12);
        // reconstruction identity
        let mut level = 1.0;
        for (i, &net) in series.net_returns.iter().enumerate() {
            level *= 1.0 + net;
            assert!((series.nav[i] - level).abs() < 1e-12 * level.abs());
        }
    }

    #[test]
    fn scale_path_identities() {
        let ua = vec![1.0f64, 1.1, 0.99, 1.25];
        let bench = vec![1.0, 1.5, 2.0, 2.5];
        let scaled = scale_path(&ua, &bench).unwrap();
        assert!((scaled.last().unwrap() - 2.5).abs() < 1e-12);
        // identical paths scale by exactly 1
        let same = scale_path(&bench, &bench).unwrap();
        assert_eq!(same, bench);
        // doubling terminal doubles every point
        let double = scale_path(&ua, &ua.iter().map(|v| v * 2.0).collect::<Vec<_>>()).unwrap();
        for (s, u) in double.iter().zip(&ua) {
            assert!((s - 2.0 * u).abs() < 1e-12);
        }
        // monthly simple returns are preserved
        for i in 1..ua.len() {
            let orig = ua[i] / ua[i - 1] - 1.0;
            let newr = scaled[i] / scaled[i - 1] - 1.0;
            assert!((orig - newr).abs() < 1e-12);
        }
    }

    #[test]
    fn scale_path_rejects_mismatch_and_zero_terminal() {
        assert!(matches!(
            scale_path(&[1.0f64, 1.1], &[1.0]),
            Err(PortfolioError::PathLengthMismatch { .. })
        ));
        assert!(matches!(
            scale_path(&[1.0f64, 0.0], &[1.0, 2.0]),
            Err(PortfolioError::ZeroTerminal)
        ));
    }
}
