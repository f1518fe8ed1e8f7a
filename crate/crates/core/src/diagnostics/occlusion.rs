use serde::Serialize;

use crate::baselines::Forecaster;
use crate::data::{ColumnScale, WindowedDataset};
use crate::error::Result;
use crate::eval::{predict_raw, rmse};
use crate::numeric::stats::median;
use crate::numeric::ParamSet;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OcclusionRow {
    pub feature: String,
    /// the test-set median the column was replaced with (scaled units)
    pub fill: f64,
    pub baseline_rmse: f64,
    pub occluded_rmse: f64,
    pub delta_rmse: f64,
}

/// Every value of feature `f` across all windows and timesteps.
pub fn column_values(ds: &WindowedDataset, f: usize) -> Vec<f64> {
    let nf = ds.n_features();
    ds.samples.iter().flat_map(|s| s.x.iter().skip(f).step_by(nf).copied()).collect()
}

/// A copy of `ds` with feature `f` set to `value` at every timestep.
pub fn with_constant(ds: &WindowedDataset, f: usize, value: f64) -> WindowedDataset {
    let nf = ds.n_features();
    let mut out = ds.clone();
    for s in &mut out.samples {
        for v in s.x.iter_mut().skip(f).step_by(nf) {
            *v = value;
        }
    }
    out
}

/// ΔRMSE when each feature is replaced by its test-set median.
pub fn occlusion_sensitivity(model: &Forecaster, params: &ParamSet, test: &WindowedDataset, scale: &ColumnScale) -> Result<Vec<OcclusionRow>> {
    let (y, base_pred) = predict_raw(model, params, test, scale)?;
    let baseline = rmse(&y, &base_pred);
    let mut rows = Vec::with_capacity(test.n_features());
    for (f, name) in test.feature_names.iter().enumerate() {
        let fill = median(&column_values(test, f)).unwrap_or(0.0);
        let (_, pred) = predict_raw(model, params, &with_constant(test, f, fill), scale)?;
        let occluded = rmse(&y, &pred);
        rows.push(OcclusionRow {
            feature: name.clone(),
            fill,
            baseline_rmse: baseline,
            occluded_rmse: occluded,
            delta_rmse: occluded - baseline,
        });
    }
    Ok(rows)
}
