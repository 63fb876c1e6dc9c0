//! Panel data model: long-form (asset, month) observations with firm
//! features, a shared per-month macro vector, and the next-month excess
//! return as the prediction target.

mod io;
mod synth;
mod transform;

use std::collections::BTreeMap;

use thiserror::Error;

pub use io::{load_macro_table, load_panel, write_macro_table, write_panel, LoadReport, PanelSchema};
pub use synth::{generate_synthetic, DgpKind, SyntheticConfig, SyntheticGroundTruth};
pub use transform::{merge_macro, quantile_transform};
pub(crate) use transform::mean_tied_ranks;

use crate::scalar::Real;

/// Stock or portfolio identifier as it appears in input files.
pub type AssetId = String;

/// Integer month id. Callers encode calendar months as e.g. `year * 12 + month`;
/// the library only relies on ordering and contiguous arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthId(pub i32);

impl MonthId {
    pub fn offset(self, months: i32) -> MonthId {
        MonthId(self.0 + months)
    }

    /// Inclusive range `[self, end]` as a vector of months.
    pub fn range_to(self, end: MonthId) -> Vec<MonthId> {
        (self.0..=end.0).map(MonthId).collect()
    }
}

impl std::fmt::Display for MonthId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum PanelError {
    #[error("missing column: {column}")]
    MissingColumn { column: String },
    #[error("duplicate (asset, month) row: ({asset}, {month})")]
    DuplicateKey { asset: AssetId, month: MonthId },
    #[error("row {row}: cannot parse {column}={value:?} as a number")]
    Parse { row: usize, column: String, value: String },
    #[error("month index not contiguous: gap between {prev} and {next}")]
    NonContiguousMonths { prev: MonthId, next: MonthId },
    #[error("macro table missing month {month}")]
    MacroCoverage { month: MonthId },
    #[error("zero variance macro series: {name}")]
    ZeroVarianceMacro { name: String },
    #[error("non-finite value for ({asset}, {month}) in {field}")]
    NonFinite { asset: AssetId, month: MonthId, field: String },
    #[error("feature vector for ({asset}, {month}) has length {actual}, expected {expected}")]
    FeatureLength { asset: AssetId, month: MonthId, expected: usize, actual: usize },
    #[error("macro vector for ({asset}, {month}) has length {actual}, expected {expected}")]
    MacroLength { asset: AssetId, month: MonthId, expected: usize, actual: usize },
    #[error("observations in month {month} carry different macro vectors")]
    InconsistentMacro { month: MonthId },
    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },
    #[error("panel is empty")]
    Empty,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One (asset, month) row of the panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelObservation<F> {
    pub asset: AssetId,
    pub month: MonthId,
    /// Firm characteristics; after [`quantile_transform`] each lies in [-1, 1].
    pub features: Vec<F>,
    /// Macro state shared by every asset in the same month.
    pub macro_vars: Vec<F>,
    /// Next-month excess return in decimal units (0.01 = 1%).
    pub next_excess_return: F,
}

/// Long-form panel. Immutable after construction; transforms return new panels.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset<F> {
    observations: Vec<PanelObservation<F>>,
    asset_index: Vec<AssetId>,
    month_index: Vec<MonthId>,
    feature_names: Vec<String>,
    macro_names: Vec<String>,
    /// Start offset of each month's block in `observations` (sorted by month, then asset).
    month_offsets: BTreeMap<MonthId, (usize, usize)>,
}

impl<F: Real> PanelDataset<F> {
    /// Build a panel from observations, validating every type invariant.
    pub fn new(
        mut observations: Vec<PanelObservation<F>>,
        feature_names: Vec<String>,
        macro_names: Vec<String>,
    ) -> Result<Self, PanelError> {
        if observations.is_empty() {
            return Err(PanelError::Empty);
        }
        observations.sort_by(|a, b| (a.month, &a.asset).cmp(&(b.month, &b.asset)));

        for pair in observations.windows(2) {
            if pair[0].month == pair[1].month && pair[0].asset == pair[1].asset {
                return Err(PanelError::DuplicateKey {
                    asset: pair[0].asset.clone(),
                    month: pair[0].month,
                });
            }
        }

        let mut asset_index: Vec<AssetId> = observations.iter().map(|o| o.asset.clone()).collect();
        asset_index.sort();
        asset_index.dedup();

        let mut month_index: Vec<MonthId> = observations.iter().map(|o| o.month).collect();
        month_index.dedup();
        for pair in month_index.windows(2) {
            if pair[1].0 != pair[0].0 + 1 {
                return Err(PanelError::NonContiguousMonths { prev: pair[0], next: pair[1] });
            }
        }

        for obs in &observations {
            if !obs.next_excess_return.is_finite() {
                return Err(PanelError::NonFinite {
                    asset: obs.asset.clone(),
                    month: obs.month,
                    field: "next_excess_return".into(),
                });
            }
            if obs.features.len() != feature_names.len() {
                return Err(PanelError::FeatureLength {
                    asset: obs.asset.clone(),
                    month: obs.month,
                    expected: feature_names.len(),
                    actual: obs.features.len(),
                });
            }
            if obs.macro_vars.len() != macro_names.len() {
                return Err(PanelError::MacroLength {
                    asset: obs.asset.clone(),
                    month: obs.month,
                    expected: macro_names.len(),
                    actual: obs.macro_vars.len(),
                });
            }
            if obs.features.iter().any(|v| !v.is_finite()) {
                return Err(PanelError::NonFinite {
                    asset: obs.asset.clone(),
                    month: obs.month,
                    field: "features".into(),
                });
            }
            if obs.macro_vars.iter().any(|v| !v.is_finite()) {
                return Err(PanelError::NonFinite {
                    asset: obs.asset.clone(),
                    month: obs.month,
                    field: "macro".into(),
                });
            }
        }

        let mut month_offsets = BTreeMap::new();
        let mut start = 0usize;
        for (i, obs) in observations.iter().enumerate() {
            if obs.month != observations[start].month {
                month_offsets.insert(observations[start].month, (start, i));
                start = i;
            }
        }
        month_offsets.insert(observations[start].month, (start, observations.len()));

        // All observations in a month must carry the same macro vector.
        for (&month, &(lo, hi)) in &month_offsets {
            let first = &observations[lo].macro_vars;
            for obs in &observations[lo + 1..hi] {
                if obs.macro_vars != *first {
                    return Err(PanelError::InconsistentMacro { month });
                }
            }
        }

        Ok(Self {
            observations,
            asset_index,
            month_index,
            feature_names,
            macro_names,
            month_offsets,
        })
    }

    pub fn observations(&self) -> &[PanelObservation<F>] {
        &self.observations
    }

    pub fn asset_index(&self) -> &[AssetId] {
        &self.asset_index
    }

    pub fn month_index(&self) -> &[MonthId] {
        &self.month_index
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn macro_names(&self) -> &[String] {
        &self.macro_names
    }

    pub fn n_months(&self) -> usize {
        self.month_index.len()
    }

    pub fn first_month(&self) -> MonthId {
        self.month_index[0]
    }

    pub fn last_month(&self) -> MonthId {
        *self.month_index.last().expect("non-empty panel")
    }

    /// Observations of one month, sorted by asset id.
    pub fn month_slice(&self, month: MonthId) -> &[PanelObservation<F>] {
        match self.month_offsets.get(&month) {
            Some(&(lo, hi)) => &self.observations[lo..hi],
            None => &[],
        }
    }

    pub fn get(&self, asset: &str, month: MonthId) -> Option<&PanelObservation<F>> {
        let slice = self.month_slice(month);
        slice
            .binary_search_by(|o| o.asset.as_str().cmp(asset))
            .ok()
            .map(|i| &slice[i])
    }

    /// Macro vector of a month (identical across that month's observations).
    pub fn month_macro(&self, month: MonthId) -> Option<&[F]> {
        self.month_slice(month).first().map(|o| o.macro_vars.as_slice())
    }
}

#[cfg(test)]
pub(crate) fn obs<F: Real>(
    asset: &str,
    month: i32,
    features: Vec<F>,
    ret: F,
) -> PanelObservation<F> {
    PanelObservation {
        asset: asset.to_string(),
        month: MonthId(month),
        features,
        macro_vars: vec![],
        next_excess_return: ret,
    }
}
