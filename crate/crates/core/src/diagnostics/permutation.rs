use serde::Serialize;

use crate::baselines::Forecaster;
use crate::data::{ColumnScale, WindowedDataset};
use crate::error::{Error, Result};
use crate::eval::{predict_raw, rmse};
use crate::numeric::stats::{mean, sample_std, spearman};
use crate::numeric::{ParamSet, Rng};

use super::occlusion::OcclusionRow;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermutationRow {
    pub feature: String,
    pub baseline_rmse: f64,
    /// mean RMSE increase over the repeats
    pub metric_drop: f64,
    pub std: f64,
    pub repeats: usize,
}

/// Give sample `i` the whole feature-`f` column of sample `perm[i]`, keeping
/// each window internally coherent.
fn permute_feature(ds: &WindowedDataset, f: usize, perm: &[usize]) -> WindowedDataset {
    let nf = ds.n_features();
    let mut out = ds.clone();
    for (i, &src) in perm.iter().enumerate() {
        let from = &ds.samples[src].x;
        let to = &mut out.samples[i].x;
        for t in 0..ds.lookback {
            to[t * nf + f] = from[t * nf + f];
        }
    }
    out
}

/// RMSE increase when each feature is shuffled across samples. Feature `f`
/// draws from substream `f` of the `"permutation"` stream.
pub fn permutation_importance(
    model: &Forecaster,
    params: &ParamSet,
    test: &WindowedDataset,
    scale: &ColumnScale,
    repeats: usize,
    seed: u64,
) -> Result<Vec<PermutationRow>> {
    if repeats < 1 {
        return Err(Error::config("diagnostics.repeats", "must be >= 1"));
    }
    let (y, base_pred) = predict_raw(model, params, test, scale)?;
    let baseline = rmse(&y, &base_pred);
    let mut rows = Vec::with_capacity(test.n_features());
    for (f, name) in test.feature_names.iter().enumerate() {
        let mut rng = Rng::substream(seed, "permutation", f as u64);
        let mut drops = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let perm = rng.permutation(test.len());
            let (_, pred) = predict_raw(model, params, &permute_feature(test, f, &perm), scale)?;
            drops.push(rmse(&y, &pred) - baseline);
        }
        rows.push(PermutationRow {
            feature: name.clone(),
            baseline_rmse: baseline,
            metric_drop: mean(&drops),
            std: sample_std(&drops),
            repeats,
        });
    }
    Ok(rows)
}

/// Spearman correlation between the occlusion and permutation scores of the
/// same features.
pub fn ranking_agreement(occlusion: &[OcclusionRow], permutation: &[PermutationRow]) -> Option<f64> {
    let a: Vec<f64> = occlusion.iter().map(|r| r.delta_rmse).collect();
    let b: Vec<f64> = occlusion
        .iter()
        .map(|o| permutation.iter().find(|p| p.feature == o.feature).map(|p| p.metric_drop))
        .collect::<Option<_>>()?;
    spearman(&a, &b)
}
