//! Seeded synthetic panel generator.
//!
//! Produces a panel with quantile-transformed features, optional i.i.d.
//! macro columns, and returns `r_{i,t+1} = f(x_{i,t}) + sigma_i * eps` with
//! per-asset noise scales spaced log-linearly between `noise_scale` and
//! `noise_scale * heteroskedasticity`. Everything is a pure function of the
//! seed, which makes the generator usable as a ground-truth oracle in tests.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::{
    quantile_transform, AssetId, MonthId, PanelDataset, PanelError, PanelObservation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DgpKind {
    Linear,
    NonlinearInteraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_assets: usize,
    pub n_months: usize,
    pub n_features: usize,
    /// Number of macro columns appended to every observation (may be 0).
    pub n_macro: usize,
    pub dgp: DgpKind,
    /// Ratio of the largest to the smallest per-asset noise sd; must be >= 1.
    pub heteroskedasticity: f64,
    /// Smallest per-asset noise sd.
    pub noise_scale: f64,
    /// Couples raw feature dispersion to the asset's noise scale: asset `i`
    /// draws raw features with sd `(sigma_i / sigma_min)^coupling`, so at
    /// positive coupling the noisiest assets occupy the extreme
    /// cross-sectional ranks. 0 keeps features i.i.d. across assets.
    pub feature_noise_coupling: f64,
    /// Scale of the randomly drawn true coefficients.
    pub coef_scale: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_assets: 100,
            n_months: 240,
            n_features: 8,
            n_macro: 2,
            dgp: DgpKind::Linear,
            heteroskedasticity: 5.0,
            noise_scale: 0.02,
            feature_noise_coupling: 0.0,
            coef_scale: 0.02,
            seed: 7,
        }
    }
}

/// What the generator actually used, for oracle checks downstream.
///
/// For `NonlinearInteraction`, `coefficients` holds the `n_features` linear
/// terms followed by one coefficient per interaction pair `(0,1), (2,3), ...`
/// in that order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticGroundTruth {
    pub true_function_id: DgpKind,
    pub coefficients: Vec<f64>,
    pub noise_scale_per_asset: BTreeMap<AssetId, f64>,
    pub seed: u64,
}

impl SyntheticGroundTruth {
    /// Evaluate the noiseless conditional mean on a (transformed) feature row.
    pub fn conditional_mean<F: Real>(&self, features: &[F]) -> F {
        let n = features.len();
        let mut acc = F::zero();
        for (j, &x) in features.iter().enumerate() {
            acc += F::from_f64(self.coefficients[j]) * x;
        }
        if self.true_function_id == DgpKind::NonlinearInteraction {
            for (pair_idx, c) in self.coefficients[n..].iter().enumerate() {
                let (a, b) = (2 * pair_idx, 2 * pair_idx + 1);
                acc += F::from_f64(*c) * features[a] * features[b];
            }
        }
        acc
    }
}

/// Generate a synthetic panel and its ground truth. Deterministic in `seed`.
pub fn generate_synthetic<F: Real>(
    config: &SyntheticConfig,
) -> Result<(PanelDataset<F>, SyntheticGroundTruth), PanelError> {
    if config.n_assets < 20 {
        return Err(PanelError::InvalidConfig {
            message: format!("n_assets must be >= 20, got {}", config.n_assets),
        });
    }
    if config.n_months < 60 {
        return Err(PanelError::InvalidConfig {
            message: format!("n_months must be >= 60, got {}", config.n_months),
        });
    }
    if config.heteroskedasticity < 1.0 {
        return Err(PanelError::InvalidConfig {
            message: format!(
                "heteroskedasticity must be >= 1, got {}",
                config.heteroskedasticity
            ),
        });
    }
    if config.noise_scale <= 0.0 {
        return Err(PanelError::InvalidConfig {
            message: "noise_scale must be positive".into(),
        });
    }
    if config.n_features == 0 {
        return Err(PanelError::InvalidConfig { message: "n_features must be >= 1".into() });
    }
    if config.n_assets > 99_999 {
        return Err(PanelError::InvalidConfig { message: "n_assets must be <= 99999".into() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let n_coefs = match config.dgp {
        DgpKind::Linear => config.n_features,
        DgpKind::NonlinearInteraction => config.n_features + config.n_features / 2,
    };
    let coefficients: Vec<f64> = (0..n_coefs)
        .map(|_| config.coef_scale * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let assets: Vec<AssetId> = (0..config.n_assets).map(|i| format!("A{i:05}")).collect();

    // Log-linear spacing from noise_scale up to noise_scale * ratio.
    let log_ratio = config.heteroskedasticity.ln();
    let noise_scale_per_asset: BTreeMap<AssetId, f64> = assets
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let frac = if config.n_assets == 1 {
                0.0
            } else {
                i as f64 / (config.n_assets - 1) as f64
            };
            (a.clone(), config.noise_scale * (frac * log_ratio).exp())
        })
        .collect();

    let truth = SyntheticGroundTruth {
        true_function_id: config.dgp,
        coefficients,
        noise_scale_per_asset,
        seed: config.seed,
    };

    // Raw features month by month, then the cross-sectional quantile map.
    let mut raw_rows: Vec<PanelObservation<F>> = Vec::with_capacity(config.n_assets * config.n_months);
    let macro_names: Vec<String> = (0..config.n_macro).map(|j| format!("z{j}")).collect();
    let feature_sd: Vec<f64> = (0..config.n_assets)
        .map(|i| {
            let frac = if config.n_assets == 1 {
                0.0
            } else {
                i as f64 / (config.n_assets - 1) as f64
            };
            (config.feature_noise_coupling * frac * log_ratio).exp()
        })
        .collect();
    for t in 1..=config.n_months as i32 {
        let macro_vars: Vec<F> = (0..config.n_macro)
            .map(|_| F::from_f64(rng.sample::<f64, _>(StandardNormal)))
            .collect();
        for (asset_idx, asset) in assets.iter().enumerate() {
            let sd = feature_sd[asset_idx];
            let features: Vec<F> = (0..config.n_features)
                .map(|_| F::from_f64(sd * rng.sample::<f64, _>(StandardNormal)))
                .collect();
            raw_rows.push(PanelObservation {
                asset: asset.clone(),
                month: MonthId(t),
                features,
                macro_vars: macro_vars.clone(),
                next_excess_return: F::zero(),
            });
        }
    }
    let feature_names: Vec<String> = (0..config.n_features).map(|j| format!("x{j}")).collect();
    let raw = PanelDataset::new(raw_rows, feature_names.clone(), macro_names)?;
    let transformed = quantile_transform(&raw);

    // Returns are built on the transformed features so the stored panel is
    // exactly the panel the ground truth describes.
    let rows: Vec<PanelObservation<F>> = transformed
        .observations()
        .iter()
        .map(|o| {
            let sigma = truth.noise_scale_per_asset[&o.asset];
            let eps: f64 = rng.sample(StandardNormal);
            let mut obs = o.clone();
            obs.next_excess_return =
                truth.conditional_mean(&o.features) + F::from_f64(sigma * eps);
            obs
        })
        .collect();

    let panel = PanelDataset::new(rows, feature_names, transformed.macro_names().to_vec())?;
    Ok((panel, truth))
}
