//! Regression metrics in °C, tail RMSE and the evaluation report.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::baselines::Forecaster;
use crate::data::{ColumnScale, WindowedDataset};
use crate::error::{Error, Result};
use crate::model::predict;
use crate::numeric::stats::{mean, pearson, quantile, variance};
use crate::numeric::ParamSet;

pub const MAPE_EPS: f64 = 1e-6;

/// Batch size used when predicting for evaluation and diagnostics.
pub const EVAL_CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub r2: Option<f64>,
    pub explained_variance: Option<f64>,
    pub pearson_r: Option<f64>,
    /// percent
    pub mape: f64,
    /// Why a metric is null, keyed by metric name.
    pub undefined: BTreeMap<String, String>,
}

/// Point metrics. Constant targets leave R², explained variance and r undefined.
pub fn regression_metrics(y: &[f64], y_hat: &[f64]) -> Result<RegressionMetrics> {
    if y.is_empty() || y.len() != y_hat.len() {
        return Err(Error::Shape(format!("metrics need equal non-zero lengths, got {} and {}", y.len(), y_hat.len())));
    }
    let n = y.len() as f64;
    let e: Vec<f64> = y.iter().zip(y_hat).map(|(a, b)| a - b).collect();
    let mse = e.iter().map(|v| v * v).sum::<f64>() / n;
    let mae = e.iter().map(|v| v.abs()).sum::<f64>() / n;
    let mape = 100.0 * y.iter().zip(&e).map(|(t, v)| v.abs() / t.abs().max(MAPE_EPS)).sum::<f64>() / n;
    let my = mean(y);
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let mut undefined = BTreeMap::new();
    let (r2, explained_variance) = if ss_tot == 0.0 {
        for k in ["r2", "explained_variance"] {
            undefined.insert(k.to_string(), "targets are constant".to_string());
        }
        (None, None)
    } else {
        let ss_res: f64 = e.iter().map(|v| v * v).sum();
        (Some(1.0 - ss_res / ss_tot), Some(1.0 - variance(&e) / variance(y)))
    };
    let pearson_r = pearson(y, y_hat);
    if pearson_r.is_none() {
        undefined.insert("pearson_r".into(), "targets or predictions are constant".into());
    }
    Ok(RegressionMetrics {
        mse,
        rmse: mse.sqrt(),
        mae,
        r2,
        explained_variance,
        pearson_r,
        mape,
        undefined,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    High,
    Low,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailMetric {
    pub rmse: Option<f64>,
    pub n: usize,
    pub threshold: f64,
}

/// Membership of the tail: strictly above the `1 − q` quantile of `y`
/// (high) or strictly below the `q` quantile (low).
pub fn tail_members(y: &[f64], tail: Tail, q: f64) -> Result<(Vec<usize>, f64)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!("tail quantile must lie in (0, 1), got {q}")));
    }
    let level = match tail {
        Tail::High => 1.0 - q,
        Tail::Low => q,
    };
    let thr = quantile(y, level).ok_or_else(|| Error::Shape("tail metric on an empty set".into()))?;
    let idx = (0..y.len())
        .filter(|&i| match tail {
            Tail::High => y[i] > thr,
            Tail::Low => y[i] < thr,
        })
        .collect();
    Ok((idx, thr))
}

pub fn extreme_rmse(y: &[f64], y_hat: &[f64], tail: Tail, q: f64) -> Result<TailMetric> {
    if y.len() != y_hat.len() {
        return Err(Error::Shape(format!("{} targets for {} predictions", y.len(), y_hat.len())));
    }
    let (idx, threshold) = tail_members(y, tail, q)?;
    let rmse = if idx.is_empty() {
        None
    } else {
        Some((idx.iter().map(|&i| (y[i] - y_hat[i]).powi(2)).sum::<f64>() / idx.len() as f64).sqrt())
    };
    Ok(TailMetric { rmse, n: idx.len(), threshold })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub date: NaiveDate,
    pub y: f64,
    pub y_hat: f64,
    /// `y − ŷ`
    pub e: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model: String,
    pub partition: String,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub r2: Option<f64>,
    pub explained_variance: Option<f64>,
    pub pearson_r: Option<f64>,
    pub mape: f64,
    pub extreme_high_rmse: Option<f64>,
    pub extreme_low_rmse: Option<f64>,
    pub tail_q: f64,
    pub n_test: usize,
    pub n_high: usize,
    pub n_low: usize,
    pub training_time_s: f64,
    pub best_val_loss: Option<f64>,
    /// validation loss recomputed from the evaluated parameters
    pub val_loss: Option<f64>,
    pub undefined: BTreeMap<String, String>,
    pub residuals: Vec<Residual>,
}

impl EvaluationReport {
    /// Assemble a report from raw-unit targets and predictions.
    pub fn from_predictions(model: &str, ds: &WindowedDataset, y: &[f64], y_hat: &[f64], tail_q: f64) -> Result<Self> {
        let m = regression_metrics(y, y_hat)?;
        let hi = extreme_rmse(y, y_hat, Tail::High, tail_q)?;
        let lo = extreme_rmse(y, y_hat, Tail::Low, tail_q)?;
        let mut undefined = m.undefined;
        if hi.rmse.is_none() {
            undefined.insert("extreme_high_rmse".into(), "no target strictly above the upper quantile".into());
        }
        if lo.rmse.is_none() {
            undefined.insert("extreme_low_rmse".into(), "no target strictly below the lower quantile".into());
        }
        let residuals = ds
            .samples
            .iter()
            .zip(y.iter().zip(y_hat))
            .map(|(s, (&a, &b))| Residual {
                date: s.target_date,
                y: a,
                y_hat: b,
                e: a - b,
            })
            .collect();
        Ok(Self {
            model: model.to_string(),
            partition: ds.partition.name().to_string(),
            mse: m.mse,
            rmse: m.rmse,
            mae: m.mae,
            r2: m.r2,
            explained_variance: m.explained_variance,
            pearson_r: m.pearson_r,
            mape: m.mape,
            extreme_high_rmse: hi.rmse,
            extreme_low_rmse: lo.rmse,
            tail_q,
            n_test: y.len(),
            n_high: hi.n,
            n_low: lo.n,
            training_time_s: 0.0,
            best_val_loss: None,
            val_loss: None,
            undefined,
            residuals,
        })
    }

    /// RMSE over the union of both tails.
    pub fn union_tail_rmse(&self) -> Option<f64> {
        let mut sse = 0.0;
        let mut n = 0;
        for (rmse, k) in [(self.extreme_high_rmse, self.n_high), (self.extreme_low_rmse, self.n_low)] {
            if let Some(r) = rmse {
                sse += r * r * k as f64;
                n += k;
            }
        }
        (n > 0).then(|| (sse / n as f64).sqrt())
    }
}

/// Raw-unit targets and predictions for `ds`. Every RMSE in the crate goes
/// through here.
pub fn predict_raw(model: &Forecaster, params: &ParamSet, ds: &WindowedDataset, scale: &ColumnScale) -> Result<(Vec<f64>, Vec<f64>)> {
    let x: Vec<f64> = ds.samples.iter().flat_map(|s| s.x.iter().copied()).collect();
    let z = predict(model.arch(), params, &x, ds.len(), EVAL_CHUNK)?;
    let y = ds.samples.iter().map(|s| scale.invert(s.y)).collect();
    Ok((y, z.into_iter().map(|v| scale.invert(v)).collect()))
}

pub fn rmse(y: &[f64], y_hat: &[f64]) -> f64 {
    (y.iter().zip(y_hat).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64).sqrt()
}

pub fn evaluate(model: &Forecaster, params: &ParamSet, ds: &WindowedDataset, scale: &ColumnScale, tail_q: f64) -> Result<EvaluationReport> {
    if ds.is_empty() {
        return Err(Error::Data(format!("{} partition has no samples to evaluate", ds.partition.name())));
    }
    let (y, y_hat) = predict_raw(model, params, ds, scale)?;
    EvaluationReport::from_predictions(model.kind().name(), ds, &y, &y_hat, tail_q)
}

/// Write `date,y,y_hat,e` rows.
pub fn write_residuals(w: impl std::io::Write, residuals: &[Residual]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["date", "y", "y_hat", "e"])?;
    for r in residuals {
        wtr.write_record([r.date.to_string(), r.y.to_string(), r.y_hat.to_string(), r.e.to_string()])?;
    }
    wtr.flush().map_err(|e| Error::io("residuals", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rng;
    use proptest::prelude::{prop_assert, proptest};

    #[test]
    fn perfect_predictions() {
        let y = [1.0, 5.0, 2.0, 8.0];
        let m = regression_metrics(&y, &y).unwrap();
        assert_eq!(m.mse, 0.0);
        assert_eq!(m.r2, Some(1.0));
        assert!((m.pearson_r.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_fixture() {
        let m = regression_metrics(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        assert!((m.mse - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.mae - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.r2, Some(0.0));
        assert_eq!(m.explained_variance, Some(0.0));
        assert!(m.pearson_r.is_none());
        assert!(m.undefined.contains_key("pearson_r"));
    }

    #[test]
    fn constant_targets_are_null_with_reason() {
        let m = regression_metrics(&[4.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!(m.r2.is_none() && m.pearson_r.is_none());
        assert_eq!(m.undefined["r2"], "targets are constant");
    }

    #[test]
    fn tails_on_a_ramp() {
        let y: Vec<f64> = (1..=100).map(f64::from).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + 1.0).collect();
        for tail in [Tail::High, Tail::Low] {
            assert_eq!(extreme_rmse(&y, &y, tail, 0.05).unwrap().rmse, Some(0.0));
            assert!((extreme_rmse(&y, &shifted, tail, 0.05).unwrap().rmse.unwrap() - 1.0).abs() < 1e-15);
        }
        let mut bad = y.clone();
        bad[99] = 95.0;
        let hi = extreme_rmse(&y, &bad, Tail::High, 0.05).unwrap();
        assert_eq!(hi.n, 5);
        assert!((hi.threshold - 95.05).abs() < 1e-12);
        assert!((hi.rmse.unwrap() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn median_tails_partition_the_mse() {
        let mut rng = Rng::new(4, "t");
        let y: Vec<f64> = (0..201).map(|_| rng.standard_normal()).collect();
        let p: Vec<f64> = y.iter().map(|v| v + rng.standard_normal()).collect();
        let hi = extreme_rmse(&y, &p, Tail::High, 0.5).unwrap();
        let lo = extreme_rmse(&y, &p, Tail::Low, 0.5).unwrap();
        let (hidx, _) = tail_members(&y, Tail::High, 0.5).unwrap();
        let (lidx, _) = tail_members(&y, Tail::Low, 0.5).unwrap();
        let mid: Vec<usize> = (0..y.len()).filter(|i| !hidx.contains(i) && !lidx.contains(i)).collect();
        let mid_sse: f64 = mid.iter().map(|&i| (y[i] - p[i]).powi(2)).sum();
        let total = hi.rmse.unwrap().powi(2) * hi.n as f64 + lo.rmse.unwrap().powi(2) * lo.n as f64 + mid_sse;
        let mse = regression_metrics(&y, &p).unwrap().mse;
        assert!((total / y.len() as f64 - mse).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn rmse_is_root_mse_and_gap_is_bias(seed in 0u64..500, n in 3usize..60) {
            let mut rng = Rng::new(seed, "metrics");
            let y: Vec<f64> = (0..n).map(|_| rng.gaussian(20.0, 5.0).unwrap()).collect();
            let p: Vec<f64> = y.iter().map(|v| v + rng.gaussian(0.3, 1.0).unwrap()).collect();
            let m = regression_metrics(&y, &p).unwrap();
            prop_assert!((m.rmse - m.mse.sqrt()).abs() <= 1e-12);
            let e: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a - b).collect();
            let gap = m.explained_variance.unwrap() - m.r2.unwrap();
            prop_assert!((gap - mean(&e).powi(2) / variance(&y)).abs() < 1e-9);
        }

        #[test]
        fn joint_permutation_invariance(seed in 0u64..300) {
            let mut rng = Rng::new(seed, "perm");
            let y: Vec<f64> = (0..40).map(|_| rng.standard_normal()).collect();
            let p: Vec<f64> = (0..40).map(|_| rng.standard_normal()).collect();
            let perm = rng.permutation(40);
            let (yp, pp): (Vec<f64>, Vec<f64>) = perm.iter().map(|&i| (y[i], p[i])).unzip();
            let a = regression_metrics(&y, &p).unwrap();
            let b = regression_metrics(&yp, &pp).unwrap();
            prop_assert!((a.mse - b.mse).abs() < 1e-12 && (a.mape - b.mape).abs() < 1e-9);
            prop_assert!((a.r2.unwrap() - b.r2.unwrap()).abs() < 1e-12);
            let ha = extreme_rmse(&y, &p, Tail::High, 0.05).unwrap();
            let hb = extreme_rmse(&yp, &pp, Tail::High, 0.05).unwrap();
            prop_assert!(ha.n == hb.n && (ha.rmse.unwrap() - hb.rmse.unwrap()).abs() < 1e-12);
        }
    }
}
