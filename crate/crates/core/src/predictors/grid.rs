//! Grid-search hyperparameter selection on the validation window.
//!
//! Candidate lists are iterated in their declared order (first axis
//! outermost); on a validation-MSE tie the earlier grid point wins. The
//! default grids list the strongest regularization first, so ties resolve
//! toward more regularized models.

use std::collections::BTreeMap;

use crate::linalg::Mat;
use crate::panel::PanelDataset;
use crate::scalar::Real;

use super::{
    assemble_design, fit_enet, fit_pcr, fit_pls, LinearModel, Method, PredictorError,
    RollingSplit,
};

/// Ordered hyperparameter grid: one axis per hyperparameter name.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<(String, Vec<f64>)>,
}

impl GridSpec {
    pub fn new(axes: Vec<(String, Vec<f64>)>) -> Self {
        Self { axes }
    }

    fn axis(&self, name: &str) -> Result<&[f64], PredictorError> {
        self.axes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .filter(|v| !v.is_empty())
            .ok_or_else(|| PredictorError::EmptyGridAxis { name: name.to_string() })
    }

    /// Cartesian product in declared-axis order, first axis outermost.
    fn points(&self, names: &[&str]) -> Result<Vec<BTreeMap<String, f64>>, PredictorError> {
        let mut points: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new()];
        for name in names {
            let values = self.axis(name)?;
            let mut next = Vec::with_capacity(points.len() * values.len());
            for base in &points {
                for &v in values {
                    let mut p = base.clone();
                    p.insert((*name).to_string(), v);
                    next.push(p);
                }
            }
            points = next;
        }
        Ok(points)
    }
}

/// Default grid for a method, capped at the design width for component counts.
/// Strongest regularization comes first on every axis.
pub fn default_grid(method: Method, width: usize) -> GridSpec {
    match method {
        Method::Enet => {
            let lambdas = vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4];
            GridSpec::new(vec![
                ("lambda1".into(), lambdas.clone()),
                ("lambda2".into(), lambdas),
            ])
        }
        Method::Pcr | Method::Pls => {
            let ks: Vec<f64> = [1usize, 3, 5, 10, 20]
                .iter()
                .copied()
                .filter(|&k| k <= width.max(1))
                .map(|k| k as f64)
                .collect();
            GridSpec::new(vec![("k".into(), ks)])
        }
    }
}

fn fit_at_point<F: Real>(
    method: Method,
    x: &Mat<F>,
    y: &[F],
    point: &BTreeMap<String, f64>,
) -> Result<LinearModel<F>, PredictorError> {
    match method {
        Method::Enet => fit_enet(x, y, point["lambda1"], point["lambda2"]),
        Method::Pcr => fit_pcr(x, y, point["k"] as usize),
        Method::Pls => fit_pls(x, y, point["k"] as usize),
    }
}

/// Fit a model for a method at given hyperparameters (used by the calibration
/// cross-fit and the final per-split refit).
pub fn fit_with_hyperparams<F: Real>(
    method: Method,
    x: &Mat<F>,
    y: &[F],
    hyperparams: &BTreeMap<String, f64>,
) -> Result<LinearModel<F>, PredictorError> {
    fit_at_point(method, x, y, hyperparams)
}

fn format_point(point: &BTreeMap<String, f64>) -> String {
    let parts: Vec<String> = point.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Search the grid: fit on the split's train months, score MSE on its
/// validation months, return the winning hyperparameters with their MSE.
pub fn grid_search<F: Real>(
    method: Method,
    split: &RollingSplit,
    panel: &PanelDataset<F>,
    grid: &GridSpec,
    include_macro: bool,
) -> Result<(BTreeMap<String, f64>, F), PredictorError> {
    let names: &[&str] = match method {
        Method::Enet => &["lambda1", "lambda2"],
        Method::Pcr | Method::Pls => &["k"],
    };
    let points = grid.points(names)?;

    let (x_train, y_train, _) =
        assemble_design(panel, split.train.0, split.train.1, include_macro)?;
    let (x_val, y_val, _) =
        assemble_design(panel, split.validation.0, split.validation.1, include_macro)?;

    let mut best: Option<(BTreeMap<String, f64>, F)> = None;
    for point in points {
        let model = fit_at_point(method, &x_train, &y_train, &point).map_err(|source| {
            PredictorError::GridPointFailed { point: format_point(&point), source: Box::new(source) }
        })?;
        let fitted = x_val.mul_vec(&model.weights);
        let mut mse = F::zero();
        for (f, &t) in fitted.iter().zip(&y_val) {
            let e = t - *f - model.intercept;
            mse += e * e;
        }
        mse /= F::from_usize(y_val.len());
        // strict improvement only: ties keep the earlier (more regularized) point
        if best.as_ref().map_or(true, |(_, best_mse)| mse < *best_mse) {
            best = Some((point, mse));
        }
    }
    best.ok_or(PredictorError::EmptyGridAxis { name: names[0].to_string() })
}
