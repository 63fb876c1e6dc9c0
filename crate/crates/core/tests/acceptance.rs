//! Acceptance suite: one test per shipping criterion, each printing a
//! single PASS/FAIL line (visible with `--nocapture`; a failing criterion
//! fails its test). Tolerances are pinned in the assertions.
//!
//! Run with: `cargo test -p uasort-core --release --test acceptance -- --nocapture`

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uasort_core::calibration::{
    empirical_halfwidth, inverse_normal_cdf, make_time_folds, normal_halfwidth,
    order_statistic_index, HalfWidthMethod, ResidualEntry, ResidualPool,
};
use uasort_core::evaluation::{annualize, newey_west_tstat, sharpe};
use uasort_core::experiments::{
    fe_regression, placebo_suite, ranking_improvements, FeTerm, PlaceboInputs,
};
use uasort_core::linalg::{ols, Mat};
use uasort_core::panel::{generate_synthetic, AssetId, DgpKind, MonthId, SyntheticConfig};
use uasort_core::pipeline::{
    compute_model_artifacts, run_backtest, write_backtest_artifacts, ModelSpec, RunConfig,
};
use uasort_core::portfolio::{
    assign_deciles, point_spread_series, scale_path, ua_spread_series, ScoreKind,
};
use uasort_core::predictors::Method;

fn pass(criterion: &str, detail: &str) {
    println!("[PASS] {criterion}: {detail}");
}

fn verdict(criterion: &str, ok: bool, detail: &str) {
    if ok {
        println!("[PASS] {criterion}: {detail}");
    } else {
        println!("[FAIL] {criterion}: {detail}");
    }
    assert!(ok, "{criterion}: {detail}");
}

fn single_point_enet_grid() -> BTreeMap<String, BTreeMap<String, Vec<f64>>> {
    [(
        "enet".to_string(),
        [("lambda1".to_string(), vec![1e-4]), ("lambda2".to_string(), vec![1e-4])]
            .into_iter()
            .collect(),
    )]
    .into_iter()
    .collect()
}

fn backtest_config() -> RunConfig {
    RunConfig {
        models: vec!["enet".into()],
        train_years: 8,
        val_years: 2,
        k_folds: 5,
        alphas: vec![0.05],
        methods: vec!["empirical".into()],
        cost_rate: 0.0,
        grids: single_point_enet_grid(),
        ..RunConfig::default()
    }
}

/// Criterion 1: the normal-method multipliers at alpha in {1%, 5%, 10%}
/// equal 0.0125, 0.0627, 0.1257 within +-0.0005.
#[test]
fn criterion_01_normal_quantile_fidelity() {
    // pool with signed residuals {-1/sqrt2, +1/sqrt2}: sample sd exactly 1,
    // so the half-width is the multiplier itself
    let mut pool = ResidualPool::<f64>::new("A".into(), "w".into());
    for (i, v) in [-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2]
        .into_iter()
        .enumerate()
    {
        pool.entries.push(ResidualEntry { abs: v.abs(), signed: v, fold: 1, month: MonthId(i as i32) });
    }
    let cases = [(0.01, 0.0125), (0.05, 0.0627), (0.10, 0.1257)];
    for (alpha, expected) in cases {
        let multiplier = normal_halfwidth(&pool, alpha, 2).unwrap();
        assert!(
            (multiplier - expected).abs() < 5e-4,
            "alpha {alpha}: multiplier {multiplier} vs {expected}"
        );
        // and the quantile function itself
        let z = inverse_normal_cdf((1.0 + alpha) / 2.0);
        assert!((z - expected).abs() < 5e-4);
    }
    pass("criterion 1 (normal-quantile fidelity)", "multipliers 0.0125/0.0627/0.1257 within 5e-4");
}

/// Criterion 2: empirical interval coverage on an i.i.d.-noise panel is
/// within +-3 percentage points of alpha for alpha in {0.05, 0.10}.
#[test]
fn criterion_02_coverage() {
    let synth = SyntheticConfig {
        n_assets: 100,
        n_months: 240,
        n_features: 4,
        n_macro: 0,
        dgp: DgpKind::Linear,
        heteroskedasticity: 1.0,
        noise_scale: 0.03,
        feature_noise_coupling: 0.0,
        coef_scale: 0.02,
        seed: 2024,
    };
    let (panel, _) = generate_synthetic::<f64>(&synth).unwrap();
    let mut config = backtest_config();
    config.alphas = vec![0.05, 0.10];
    let artifacts =
        compute_model_artifacts(&ModelSpec::Builtin(Method::Enet), &panel, &config).unwrap();

    for &alpha in &config.alphas {
        let bounds = &artifacts.bounds[&(HalfWidthMethod::Empirical, format!("{alpha}"))];
        let mut covered = 0usize;
        let mut total = 0usize;
        for b in bounds {
            let realized = panel.get(&b.asset, b.month).unwrap().next_excess_return;
            total += 1;
            if (realized - b.mu_hat).abs() <= b.half_width {
                covered += 1;
            }
        }
        let coverage = covered as f64 / total as f64;
        assert!(
            (coverage - alpha).abs() <= 0.03,
            "alpha {alpha}: coverage {coverage:.4} off by more than 3pp ({total} bounds)"
        );
        println!("  alpha {alpha}: coverage {coverage:.4} over {total} bounds");
    }
    pass("criterion 2 (coverage)", "within +-3pp of alpha at 0.05 and 0.10");
}

fn heteroskedastic_dgp(seed: u64) -> SyntheticConfig {
    // the linear heteroskedastic data-generating process shared by
    // criteria 3 and 4: noise-sd ratio 10 >= 5, linear f
    SyntheticConfig {
        n_assets: 100,
        n_months: 216,
        n_features: 6,
        n_macro: 2,
        dgp: DgpKind::Linear,
        heteroskedasticity: 10.0,
        noise_scale: 0.03,
        feature_noise_coupling: 0.0,
        coef_scale: 0.005,
        seed,
    }
}

/// Criterion 3: on the heteroskedastic linear DGP, uncertainty-adjusted
/// sorting at alpha = 0.05 has strictly higher Sharpe and strictly lower
/// annualized volatility than point sorting in at least 8 of 10 seeds.
#[test]
fn criterion_03_directional_ua_gain() {
    let mut sharpe_and_vol_wins = 0usize;
    let mut detail = String::new();
    for seed in 0..10u64 {
        let (panel, _) = generate_synthetic::<f64>(&heteroskedastic_dgp(3000 + seed)).unwrap();
        let config = backtest_config();
        let output = run_backtest(&panel, &config, None, None).unwrap();
        let point = output.strategies.iter().find(|s| s.key.mode == "point").unwrap();
        let ua = output.strategies.iter().find(|s| s.key.mode == "ua").unwrap();
        let s_point = sharpe(&point.series.net_returns).unwrap();
        let s_ua = sharpe(&ua.series.net_returns).unwrap();
        let (_, v_point) = annualize(&point.series.net_returns).unwrap();
        let (_, v_ua) = annualize(&ua.series.net_returns).unwrap();
        if s_ua > s_point && v_ua < v_point {
            sharpe_and_vol_wins += 1;
        }
        detail.push_str(&format!(
            "\n  seed {seed}: point (sharpe {s_point:.3}, vol {v_point:.4}) vs ua (sharpe {s_ua:.3}, vol {v_ua:.4})"
        ));
    }
    verdict(
        "criterion 3 (directional UA gain)",
        sharpe_and_vol_wins >= 8,
        &format!("higher Sharpe and lower vol in {sharpe_and_vol_wins}/10 seeds (need >= 8){detail}"),
    );
}

/// Criterion 4: placebo ordering on the same DGP — mean over seeds has
/// Sharpe(no shuffle) > Sharpe(stock shuffle), and |stock - all| is < 25%
/// of the no-shuffle gap.
#[test]
fn criterion_04_placebo_ordering() {
    let (panel, _) = generate_synthetic::<f64>(&heteroskedastic_dgp(4000)).unwrap();
    let config = backtest_config();
    let artifacts =
        compute_model_artifacts(&ModelSpec::Builtin(Method::Enet), &panel, &config).unwrap();
    let bounds = &artifacts.bounds[&(HalfWidthMethod::Empirical, "0.05".to_string())];
    let inputs = PlaceboInputs {
        model: "enet",
        predictions: &artifacts.predictions,
        bounds,
        panel: &panel,
        cost_rate: 0.0,
        year_block: false,
    };
    let row = placebo_suite(&inputs, &[1, 2, 3, 4, 5, 6]).unwrap();
    let gap = row.sharpe_none - row.sharpe_stock;
    let stock_vs_all = (row.sharpe_stock - row.sharpe_all).abs();
    let ok = gap > 0.0 && stock_vs_all < 0.25 * gap;
    verdict(
        "criterion 4 (placebo ordering)",
        ok,
        &format!(
            "none {:.3}, time {:.3}, stock {:.3}, all {:.3}, point {:.3}; gap {:.3}, |stock-all| {:.3}",
            row.sharpe_none, row.sharpe_time, row.sharpe_stock, row.sharpe_all, row.sharpe_point,
            gap, stock_vs_all
        ),
    );
}

/// Criterion 5: empirical_halfwidth equals a naive full-sort order-statistic
/// oracle on 1000 random pools, exactly.
#[test]
fn criterion_05_quantile_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for trial in 0..1000 {
        let n = rng.gen_range(12..=200);
        let mut pool = ResidualPool::<f64>::new(format!("A{trial}"), "w".into());
        for i in 0..n {
            let v: f64 = rng.gen_range(0.0..0.5);
            pool.entries.push(ResidualEntry { abs: v, signed: v, fold: 1, month: MonthId(i as i32) });
        }
        let alpha: f64 = rng.gen_range(0.001..0.999);

        // oracle: full ascending sort, pick the ceil(alpha*n)-th (1-indexed)
        let mut sorted = pool.abs_residuals();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = sorted[order_statistic_index(alpha, n) - 1];

        let got = empirical_halfwidth(&pool, alpha, 12).unwrap();
        assert_eq!(got, expected, "trial {trial}: alpha {alpha} n {n}");
    }
    pass("criterion 5 (quantile oracle equivalence)", "exact on 1000 random pools");
}

/// Criterion 6: newey_west_tstat matches a brute-force double-loop HAC
/// evaluation within 1e-10 on 100 random series; fe_regression matches
/// explicit-dummy OLS within 1e-8 on <= 50-firm instances.
#[test]
fn criterion_06_inference_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);

    // brute-force S: literal double loop over (t, s) pairs
    for trial in 0..100 {
        let n: usize = rng.gen_range(40..160);
        let lags = rng.gen_range(0..8usize);
        let series: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.06..0.061)).collect();
        let mean = series.iter().sum::<f64>() / n as f64;
        let mut s = 0.0;
        for t in 0..n {
            for u in 0..n {
                let dist = t.abs_diff(u);
                if dist > lags {
                    continue;
                }
                let w = 1.0 - dist as f64 / (lags as f64 + 1.0);
                s += w * (series[t] - mean) * (series[u] - mean);
            }
        }
        s /= n as f64;
        let expected = mean / (s / n as f64).sqrt();
        let got = newey_west_tstat(&series, lags).unwrap();
        assert!(
            (got - expected).abs() < 1e-10,
            "trial {trial}: t {got} vs oracle {expected} (lags {lags})"
        );
    }

    // fe_regression vs explicit firm dummies
    for trial in 0..5 {
        let n_firms = 10 + 8 * trial; // up to 42 firms
        let mut firms: Vec<AssetId> = Vec::new();
        let mut y = Vec::new();
        let mut x1 = Vec::new();
        let mut x2 = Vec::new();
        for f in 0..n_firms {
            for _ in 0..9 {
                let a: f64 = rng.gen_range(-1.0..1.0);
                let b: f64 = rng.gen_range(-1.0..1.0);
                firms.push(format!("F{f:03}"));
                x1.push(a);
                x2.push(b);
                y.push(0.4 * a - 0.7 * b + f as f64 * 0.3 + 0.01 * rng.gen_range(-1.0..1.0f64));
            }
        }
        let terms = vec![FeTerm::new("x1", x1.clone()), FeTerm::new("x2", x2.clone())];
        let res = fe_regression(&firms, &y, &terms).unwrap();

        let firm_ids: Vec<String> = (0..n_firms).map(|f| format!("F{f:03}")).collect();
        let rows: Vec<Vec<f64>> = (0..y.len())
            .map(|r| {
                let mut row = vec![x1[r], x2[r]];
                for id in &firm_ids {
                    row.push(if &firms[r] == id { 1.0 } else { 0.0 });
                }
                row
            })
            .collect();
        let dummy = ols(&Mat::from_rows(&rows), &y).unwrap();
        assert!(
            (res.coefficients["x1"] - dummy[0]).abs() < 1e-8,
            "x1: {} vs {}",
            res.coefficients["x1"],
            dummy[0]
        );
        assert!(
            (res.coefficients["x2"] - dummy[1]).abs() < 1e-8,
            "x2: {} vs {}",
            res.coefficients["x2"],
            dummy[1]
        );
    }
    pass(
        "criterion 6 (inference oracle equivalence)",
        "HAC within 1e-10 on 100 series; within estimator matches dummy OLS within 1e-8",
    );
}

/// Criterion 7: constant half-widths collapse deciles, Sharpe, rank deltas,
/// and all placebo differences to the point-prediction benchmark exactly.
#[test]
fn criterion_07_degeneracy_suite() {
    let (panel, _) = generate_synthetic::<f64>(&SyntheticConfig {
        n_assets: 40,
        n_months: 132,
        n_features: 3,
        n_macro: 0,
        dgp: DgpKind::Linear,
        heteroskedasticity: 3.0,
        noise_scale: 0.02,
        feature_noise_coupling: 0.0,
        coef_scale: 0.02,
        seed: 7007,
    })
    .unwrap();
    let mut config = backtest_config();
    config.train_years = 5;
    config.val_years = 2;
    let artifacts =
        compute_model_artifacts(&ModelSpec::Builtin(Method::Enet), &panel, &config).unwrap();

    // force every half-width to the same constant
    let bounds: Vec<_> = artifacts.bounds[&(HalfWidthMethod::Empirical, "0.05".to_string())]
        .iter()
        .map(|b| b.with_half_width(0.0375))
        .collect();

    // deciles collapse: upper and lower sorts equal the point sort, month by month
    let mut by_month: BTreeMap<MonthId, (BTreeMap<AssetId, f64>, BTreeMap<AssetId, f64>, BTreeMap<AssetId, f64>)> =
        BTreeMap::new();
    for b in &bounds {
        let e = by_month.entry(b.month).or_default();
        e.0.insert(b.asset.clone(), b.mu_hat);
        e.1.insert(b.asset.clone(), b.upper);
        e.2.insert(b.asset.clone(), b.lower);
    }
    for (month, (point, upper, lower)) in &by_month {
        let d_point = assign_deciles(point, *month, ScoreKind::Point).unwrap();
        let d_upper = assign_deciles(upper, *month, ScoreKind::Upper).unwrap();
        let d_lower = assign_deciles(lower, *month, ScoreKind::Lower).unwrap();
        assert_eq!(d_point.mapping, d_upper.mapping, "month {month}");
        assert_eq!(d_point.mapping, d_lower.mapping, "month {month}");

        // rank deltas all zero
        let deltas = ranking_improvements(point, upper, lower, *month).unwrap();
        for row in &deltas.rows {
            assert_eq!(row.delta_rank_upper, 0.0);
            assert_eq!(row.delta_rank_lower, 0.0);
        }
    }

    // realized series identical, so Sharpe identical
    let ua = ua_spread_series("ua", &bounds, &panel, 0.0).unwrap();
    let point = point_spread_series("pt", &artifacts.predictions, &panel, 0.0).unwrap();
    assert_eq!(ua.weights, point.weights);
    assert_eq!(ua.gross_returns, point.gross_returns);
    assert_eq!(sharpe(&ua.net_returns), sharpe(&point.net_returns));

    // placebo differences all collapse (shuffling constants is the identity
    // on the half-width multiset)
    let inputs = PlaceboInputs {
        model: "enet",
        predictions: &artifacts.predictions,
        bounds: &bounds,
        panel: &panel,
        cost_rate: 0.0,
        year_block: false,
    };
    let row = placebo_suite(&inputs, &[1, 2, 3]).unwrap();
    for d in [row.d_none_time, row.d_time_stock, row.d_stock_all, row.d_all_point] {
        assert!(d.abs() < 1e-10, "placebo difference {d} should vanish");
    }
    pass("criterion 7 (degeneracy suite)", "constant half-widths collapse to the point benchmark");
}

/// Criterion 8: scale_path preserves monthly returns and Sharpe within
/// 1e-12 and matches terminal values exactly.
#[test]
fn criterion_08_scaling_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for _ in 0..50 {
        let n = rng.gen_range(24..200);
        let mut ua = vec![1.0f64];
        let mut bench = vec![1.0f64];
        for _ in 0..n {
            ua.push(ua.last().unwrap() * (1.0 + rng.gen_range(-0.05..0.06)));
            bench.push(bench.last().unwrap() * (1.0 + rng.gen_range(-0.05..0.06)));
        }
        let scaled = scale_path(&ua, &bench).unwrap();
        assert!((scaled.last().unwrap() - bench.last().unwrap()).abs() < 1e-12 * bench.last().unwrap().abs());

        let returns = |nav: &[f64]| -> Vec<f64> {
            nav.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
        };
        let orig = returns(&ua);
        let new = returns(&scaled);
        for (a, b) in orig.iter().zip(&new) {
            assert!((a - b).abs() < 1e-12, "return drift {a} vs {b}");
        }
        let s_orig = sharpe(&orig).unwrap();
        let s_new = sharpe(&new).unwrap();
        assert!((s_orig - s_new).abs() < 1e-12);
    }
    pass("criterion 8 (scaling identity)", "returns, Sharpe, and terminal values preserved");
}

/// Criterion 9: no-look-ahead audit over a full synthetic backtest — every
/// pooled residual predates its test year and respects its fold exclusion.
#[test]
fn criterion_09_no_look_ahead_audit() {
    let (panel, _) = generate_synthetic::<f64>(&SyntheticConfig {
        n_assets: 50,
        n_months: 168,
        n_features: 4,
        n_macro: 2,
        dgp: DgpKind::Linear,
        heteroskedasticity: 5.0,
        noise_scale: 0.02,
        feature_noise_coupling: 0.0,
        coef_scale: 0.02,
        seed: 9009,
    })
    .unwrap();
    let mut config = backtest_config();
    config.train_years = 6;
    config.val_years = 2;
    config.k_folds = 5;
    let artifacts =
        compute_model_artifacts(&ModelSpec::Builtin(Method::Enet), &panel, &config).unwrap();

    let mut audited = 0usize;
    for split in &artifacts.splits {
        let pools = &artifacts.pools[&split.id];
        let (w_start, w_end) = split.window();
        let scheme = make_time_folds(w_start, w_end, config.k_folds).unwrap();
        for pool in pools.values() {
            assert_eq!(pool.window_id, split.id);
            for e in &pool.entries {
                audited += 1;
                // strictly before the split's test year
                assert!(
                    e.month < split.test.0,
                    "residual at {} not before test start {}",
                    e.month,
                    split.test.0
                );
                // the entry's month lies inside its tagged calibration fold
                let (f_lo, f_hi) = scheme.folds[e.fold - 1];
                assert!(f_lo <= e.month && e.month <= f_hi, "fold tag mismatch");
                // and that fold is excluded from the training folds of the
                // pass that produced it (training = all except validation
                // fold v and calibration fold c = v mod K + 1)
                let c = e.fold;
                let v = if c == 1 { config.k_folds } else { c - 1 };
                let training: Vec<usize> =
                    (1..=config.k_folds).filter(|&j| j != v && j != c).collect();
                assert!(!training.contains(&c), "calibration fold in its own training set");
            }
        }
    }
    assert!(audited > 10_000, "audit covered only {audited} residuals");
    pass(
        "criterion 9 (no-look-ahead audit)",
        &format!("{audited} residuals all predate their test year with valid fold exclusions"),
    );
}

/// Criterion 10: two end-to-end backtest runs from the same configuration
/// produce byte-identical reports.
#[test]
fn criterion_10_determinism() {
    let (panel, _) = generate_synthetic::<f64>(&heteroskedastic_dgp(10_000)).unwrap();
    let config = backtest_config();

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let output = run_backtest(&panel, &config, None, None).unwrap();
        write_backtest_artifacts(&output, &config, dir.path()).unwrap();
    }
    for file in ["predictions.csv", "pools_enet.csv", "bounds.csv", "series.csv", "nav_long.csv", "report.csv"] {
        let a = std::fs::read(dir_a.path().join(file)).unwrap();
        let b = std::fs::read(dir_b.path().join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    pass("criterion 10 (determinism)", "all backtest artifacts byte-identical across reruns");
}
