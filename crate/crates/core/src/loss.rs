//! Training losses: percentile-weighted squared error, plain MSE and Huber.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::stats::quantile;
use crate::numeric::{Tape, Var};

/// Weights for the extreme-weighted loss.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossConfig {
    pub alpha_high: f64,
    pub alpha_low: f64,
    pub beta: f64,
    pub q_high: f64,
    pub q_low: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            alpha_high: 2.0,
            alpha_low: 2.0,
            beta: 0.5,
            q_high: 0.95,
            q_low: 0.05,
        }
    }
}

impl LossConfig {
    pub fn validate(&self, path: &str) -> Result<()> {
        if !(0.0 < self.q_low && self.q_low < self.q_high && self.q_high < 1.0) {
            return Err(Error::config(format!("{path}.q_low"), "need 0 < q_low < q_high < 1"));
        }
        for (name, v) in [("alpha_high", self.alpha_high), ("alpha_low", self.alpha_low), ("beta", self.beta)] {
            if !(v > 0.0) {
                return Err(Error::config(format!("{path}.{name}"), "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Which objective a training run minimizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    Extreme,
    Mse,
    Huber,
}

/// Per-sample weights: `alpha_high` above the batch `q_high` quantile (strict),
/// `alpha_low` below the `q_low` quantile (strict), `beta` otherwise.
pub fn extreme_weights(target: &[f64], cfg: &LossConfig) -> Result<Vec<f64>> {
    if target.len() < 2 {
        return Err(Error::invalid("extreme-weighted loss needs a batch of at least 2"));
    }
    let hi = quantile(target, cfg.q_high).unwrap();
    let lo = quantile(target, cfg.q_low).unwrap();
    Ok(target
        .iter()
        .map(|&t| {
            if t > hi {
                cfg.alpha_high
            } else if t < lo {
                cfg.alpha_low
            } else {
                cfg.beta
            }
        })
        .collect())
}

/// Returns `(loss, weights)` with `loss = (1/B) Σ w_i (pred_i − target_i)²`.
pub fn extreme_weather_loss(pred: &[f64], target: &[f64], cfg: &LossConfig) -> Result<(f64, Vec<f64>)> {
    if pred.len() != target.len() {
        return Err(Error::Shape(format!("pred {} vs target {}", pred.len(), target.len())));
    }
    let w = extreme_weights(target, cfg)?;
    let b = pred.len() as f64;
    let loss = pred
        .iter()
        .zip(target)
        .zip(&w)
        .map(|((y, t), w)| w * (y - t) * (y - t))
        .sum::<f64>()
        / b;
    Ok((loss, w))
}

pub fn mse(pred: &[f64], target: &[f64]) -> f64 {
    pred.iter().zip(target).map(|(y, t)| (y - t) * (y - t)).sum::<f64>() / pred.len() as f64
}

pub fn huber_term(e: f64, delta: f64) -> f64 {
    if e.abs() <= delta {
        0.5 * e * e
    } else {
        delta * (e.abs() - 0.5 * delta)
    }
}

pub fn huber_loss(pred: &[f64], target: &[f64], delta: f64) -> f64 {
    pred.iter().zip(target).map(|(y, t)| huber_term(y - t, delta)).sum::<f64>() / pred.len() as f64
}

/// Loss value for a whole prediction set, without a tape.
pub fn evaluate_loss(kind: LossKind, cfg: &LossConfig, pred: &[f64], target: &[f64]) -> Result<f64> {
    match kind {
        LossKind::Extreme => Ok(extreme_weather_loss(pred, target, cfg)?.0),
        LossKind::Mse => Ok(mse(pred, target)),
        LossKind::Huber => Ok(huber_loss(pred, target, 1.0)),
    }
}

/// Record the chosen loss on `tape` for predictions `pred` (`[B × 1]`).
pub fn loss_on_tape(tape: &mut Tape, kind: LossKind, cfg: &LossConfig, pred: Var, target: &[f64]) -> Result<Var> {
    match kind {
        LossKind::Extreme => {
            let w = extreme_weights(target, cfg)?;
            Ok(tape.weighted_sq_error(pred, target.to_vec(), w))
        }
        LossKind::Mse => Ok(tape.weighted_sq_error(pred, target.to_vec(), vec![1.0; target.len()])),
        LossKind::Huber => Ok(tape.huber(pred, target.to_vec(), 1.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions_cost_nothing() {
        let t = [1.0, 4.0, 2.0, 9.0];
        let (l, _) = extreme_weather_loss(&t, &t, &LossConfig::default()).unwrap();
        assert_eq!(l, 0.0);
    }

    #[test]
    fn ramp_fixture() {
        let t: Vec<f64> = (1..=20).map(f64::from).collect();
        let p: Vec<f64> = t.iter().map(|v| v + 1.0).collect();
        let (l, w) = extreme_weather_loss(&p, &t, &LossConfig::default()).unwrap();
        assert_eq!(w[19], 2.0);
        assert_eq!(w[0], 2.0);
        assert!(w[1..19].iter().all(|&x| x == 0.5));
        assert!((l - 0.65).abs() < 1e-12);
    }

    #[test]
    fn degenerate_targets_fall_to_beta() {
        let t = [3.0; 6];
        let p = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let (l, w) = extreme_weather_loss(&p, &t, &LossConfig::default()).unwrap();
        assert!(w.iter().all(|&x| x == 0.5));
        assert!((l - 0.5 * mse(&p, &t)).abs() < 1e-15);
    }

    #[test]
    fn tiny_batch_is_rejected() {
        assert!(extreme_weather_loss(&[1.0], &[1.0], &LossConfig::default()).is_err());
    }

    #[test]
    fn huber_branches() {
        assert_eq!(huber_term(0.0, 1.0), 0.0);
        assert_eq!(huber_term(0.5, 1.0), 0.125);
        assert_eq!(huber_term(3.0, 1.0), 2.5);
        assert_eq!(huber_term(-3.0, 1.0), 2.5);
    }
}
