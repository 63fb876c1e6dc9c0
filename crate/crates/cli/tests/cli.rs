//! End-to-end tests of the binary: the synth/backtest/placebo/drivers/report
//! flow on a small synthetic panel, the exit-code contract, and rerun
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn uasort() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uasort"))
}

fn write_config(dir: &Path) -> PathBuf {
    let out = dir.join("out");
    let config = serde_json::json!({
        "panel": out.join("panel.csv"),
        "macro_cols": ["z0", "z1"],
        "models": ["enet"],
        "train_years": 5,
        "val_years": 2,
        "k_folds": 4,
        "alphas": [0.05],
        "methods": ["empirical"],
        "seeds": [1, 2],
        "out_dir": out,
        "synth": {
            "n_assets": 30,
            "n_months": 120,
            "n_features": 3,
            "n_macro": 2,
            "dgp": "linear",
            "heteroskedasticity": 4.0,
            "noise_scale": 0.02,
            "feature_noise_coupling": 0.0,
            "coef_scale": 0.02,
            "seed": 5
        },
        "grids": {
            "enet": {"lambda1": [0.0001], "lambda2": [0.0001]}
        }
    });
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

fn run_ok(cmd: &str, config: &Path) -> Output {
    let output = uasort().arg(cmd).arg("--config").arg(config).output().unwrap();
    assert!(
        output.status.success(),
        "uasort {cmd} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

#[test]
fn full_flow_produces_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    run_ok("synth", &config);
    run_ok("backtest", &config);
    run_ok("placebo", &config);
    run_ok("drivers", &config);
    run_ok("report", &config);

    let out = dir.path().join("out");
    for file in [
        "panel.csv",
        "ground_truth.json",
        "predictions.csv",
        "pools_enet.csv",
        "bounds.csv",
        "series.csv",
        "nav_long.csv",
        "report.csv",
        "normal_vs_empirical.csv",
        "placebo.csv",
        "drivers_enet.csv",
        "nav_scaled_enet.csv",
        "manifest_synth.json",
        "manifest_backtest.json",
    ] {
        assert!(out.join(file).exists(), "missing artifact {file}");
    }

    // alphas {0.05}, empirical only -> 1 ua + 1 point strategy
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 3, "header + 2 strategy rows:\n{report}");

    // placebo carries a dispersion field over the 2 seeds
    let placebo = std::fs::read_to_string(out.join("placebo.csv")).unwrap();
    let header = placebo.lines().next().unwrap();
    assert!(header.contains("sd_stock"));
    assert!(placebo.lines().nth(1).unwrap().split(',').count() == header.split(',').count());
}

#[test]
fn synth_is_deterministic_and_validates_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    run_ok("synth", &config);
    let first = std::fs::read(dir.path().join("out/panel.csv")).unwrap();
    run_ok("synth", &config);
    let second = std::fs::read(dir.path().join("out/panel.csv")).unwrap();
    assert_eq!(first, second, "same seed must be byte-identical");

    // invalid n_assets -> validation exit code 2
    let text = std::fs::read_to_string(&config).unwrap().replace("\"n_assets\": 30", "\"n_assets\": 5");
    std::fs::write(&config, text).unwrap();
    let output = uasort().arg("synth").arg("--config").arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn backtest_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    run_ok("synth", &config);
    run_ok("backtest", &config);
    let out = dir.path().join("out");
    let artifacts = ["predictions.csv", "bounds.csv", "series.csv", "report.csv", "manifest_backtest.json"];
    let before: Vec<Vec<u8>> =
        artifacts.iter().map(|f| std::fs::read(out.join(f)).unwrap()).collect();
    run_ok("backtest", &config);
    for (f, b) in artifacts.iter().zip(before) {
        let after = std::fs::read(out.join(f)).unwrap();
        assert_eq!(after, b, "{f} changed across reruns");
    }
}

#[test]
fn missing_prerequisites_and_bad_config_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    run_ok("synth", &config);

    // placebo before backtest: runtime error (1) naming the missing file
    let output = uasort().arg("placebo").arg("--config").arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("predictions.csv"), "stderr: {stderr}");

    // nonexistent panel path: validation error (2)
    let text = std::fs::read_to_string(&config)
        .unwrap()
        .replace("panel.csv", "no_such_panel.csv");
    std::fs::write(&config, text).unwrap();
    let output = uasort().arg("backtest").arg("--config").arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    run_ok("synth", &config);
    let output = uasort()
        .arg("backtest")
        .arg("--config")
        .arg(&config)
        .arg("--alpha")
        .arg("0.05,0.10")
        .arg("--method")
        .arg("both")
        .arg("--cost-bps")
        .arg("0")
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let report = std::fs::read_to_string(dir.path().join("out/report.csv")).unwrap();
    // 2 alphas x 2 methods = 4 ua strategies + 1 point
    assert_eq!(report.lines().count(), 6, "{report}");
    // zero cost: gross == net in the series file
    let series = std::fs::read_to_string(dir.path().join("out/series.csv")).unwrap();
    for line in series.lines().skip(1).take(5) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[2], cells[3], "gross != net with --cost-bps 0: {line}");
    }
}
