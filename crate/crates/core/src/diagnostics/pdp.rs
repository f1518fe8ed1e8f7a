use serde::Serialize;

use super::occlusion::{column_values, with_constant};
use crate::data::{ColumnScale, WindowedDataset};
use crate::error::{Error, Result};
use crate::model::{predict, Architecture};
use crate::numeric::stats::{mean, quantile};
use crate::numeric::ParamSet;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PdpCurve {
    pub feature: String,
    /// grid in the model's (scaled) input units
    pub grid: Vec<f64>,
    /// mean prediction at each grid value, in target units
    pub mean_prediction: Vec<f64>,
}

impl PdpCurve {
    /// Least-squares slope of the curve (0 for a single point).
    pub fn slope(&self) -> f64 {
        if self.grid.len() < 2 {
            return 0.0;
        }
        let (mx, my) = (mean(&self.grid), mean(&self.mean_prediction));
        let sxy: f64 = self.grid.iter().zip(&self.mean_prediction).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = self.grid.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    }
}

/// Sweep `feature` over `grid_size` equally spaced values between its 1st and
/// 99th test percentile, setting it at every timestep of every window.
pub fn partial_dependence(
    model: &dyn Architecture,
    params: &ParamSet,
    test: &WindowedDataset,
    feature: &str,
    grid_size: usize,
    scale: &ColumnScale,
) -> Result<PdpCurve> {
    let f = test
        .feature_index(feature)
        .ok_or_else(|| Error::invalid(format!("unknown feature `{feature}`")))?;
    if test.is_empty() {
        return Err(Error::Data("partial dependence needs a non-empty set".into()));
    }
    let values = column_values(test, f);
    let lo = quantile(&values, 0.01).expect("non-empty");
    let hi = quantile(&values, 0.99).expect("non-empty");
    let grid: Vec<f64> = if hi == lo || grid_size < 2 {
        if hi == lo {
            eprintln!("warning: feature `{feature}` is constant on this set; single-point curve");
        }
        vec![lo]
    } else {
        (0..grid_size)
            .map(|i| if i + 1 == grid_size { hi } else { lo + (hi - lo) * i as f64 / (grid_size - 1) as f64 })
            .collect()
    };
    let mut mean_prediction = Vec::with_capacity(grid.len());
    for &g in &grid {
        let ds = with_constant(test, f, g);
        let x: Vec<f64> = ds.samples.iter().flat_map(|s| s.x.iter().copied()).collect();
        let pred = predict(model, params, &x, ds.len(), crate::eval::EVAL_CHUNK)?;
        mean_prediction.push(mean(&pred.iter().map(|&v| scale.invert(v)).collect::<Vec<_>>()));
    }
    Ok(PdpCurve {
        feature: feature.to_string(),
        grid,
        mean_prediction,
    })
}
