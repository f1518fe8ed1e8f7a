use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{Forecaster, ModelSpec};
use crate::data::{PreparedDataset, ScalerParams};
use crate::error::{Error, Result};
use crate::loss::LossConfig;
use crate::numeric::{ParamSet, Tensor};
use crate::trainer::{TrainOutcome, TrainState};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorRecord {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
    /// whether weight decay applied during training
    pub decay: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSummary {
    pub best_val_loss: f64,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub wall_clock_to_best: f64,
}

impl From<&TrainState> for TrainSummary {
    fn from(s: &TrainState) -> Self {
        Self {
            best_val_loss: s.best_val_loss,
            best_epoch: s.best_epoch,
            epochs_run: s.epoch,
            wall_clock_to_best: s.wall_clock_to_best,
        }
    }
}

/// A trained model with everything needed to run it on a compatible dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub schema_version: u32,
    /// resolved model specification, dimensions filled in
    pub model: ModelSpec,
    pub target_name: String,
    pub lookback: usize,
    pub feature_names: Vec<String>,
    pub scaler: ScalerParams,
    pub params: BTreeMap<String, TensorRecord>,
    pub train_state: TrainSummary,
    /// loss settings behind `best_val_loss`, so it can be recomputed
    pub loss: LossConfig,
    pub seed: u64,
}

impl Checkpoint {
    pub fn from_outcome(outcome: &TrainOutcome, dataset: &PreparedDataset, loss: &LossConfig, seed: u64) -> Self {
        Self::new(&outcome.model, &outcome.params, &outcome.state, dataset, loss, seed)
    }

    pub fn new(
        model: &Forecaster,
        params: &ParamSet,
        state: &TrainState,
        dataset: &PreparedDataset,
        loss: &LossConfig,
        seed: u64,
    ) -> Self {
        let params = params
            .iter()
            .map(|(k, p)| {
                (
                    k.clone(),
                    TensorRecord {
                        shape: p.value.shape().to_vec(),
                        data: p.value.data().to_vec(),
                        decay: p.decay,
                    },
                )
            })
            .collect();
        Self {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            model: model.spec(&dataset.target_name),
            target_name: dataset.target_name.clone(),
            lookback: dataset.lookback,
            feature_names: dataset.feature_names.clone(),
            scaler: dataset.scaler.clone(),
            params,
            train_state: TrainSummary::from(state),
            loss: loss.clone(),
            seed,
        }
    }

    pub fn params(&self) -> Result<ParamSet> {
        let mut ps = ParamSet::new();
        for (k, r) in &self.params {
            let t = Tensor::new(r.shape.clone(), r.data.clone())
                .map_err(|e| Error::Data(format!("checkpoint tensor `{k}`: {e}")))?;
            ps.insert(k.clone(), t, r.decay);
        }
        Ok(ps)
    }

    /// Rebuild the model and check that the stored tensors match the names
    /// and shapes it expects.
    pub fn forecaster(&self) -> Result<(Forecaster, ParamSet)> {
        if self.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::Compat(format!(
                "checkpoint schema_version {} unsupported (expected {CHECKPOINT_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let model = self.model.resolve(&self.feature_names, &self.target_name, self.lookback)?;
        let params = self.params()?;
        let expected = model.arch().init_params(0)?;
        expected.check_compatible(&params).map_err(|e| Error::Compat(format!("checkpoint parameters: {e}")))?;
        Ok((model, params))
    }

    /// Feature names and order must match exactly.
    pub fn check_compatible(&self, dataset: &PreparedDataset) -> Result<()> {
        let (a, b) = (&self.feature_names, &dataset.feature_names);
        for i in 0..a.len().max(b.len()) {
            match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) if x == y => {}
                (x, y) => {
                    return Err(Error::Compat(format!(
                        "feature {i} differs: checkpoint has `{}`, dataset has `{}`",
                        x.map_or("<none>", String::as_str),
                        y.map_or("<none>", String::as_str)
                    )))
                }
            }
        }
        if self.lookback != dataset.lookback {
            return Err(Error::Compat(format!(
                "lookback differs: checkpoint {}, dataset {}",
                self.lookback, dataset.lookback
            )));
        }
        if self.target_name != dataset.target_name {
            return Err(Error::Compat(format!(
                "target differs: checkpoint `{}`, dataset `{}`",
                self.target_name, dataset.target_name
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        super::write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        super::read_json(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rng;

    #[test]
    fn params_survive_a_text_round_trip_bitwise() {
        let mut rng = Rng::new(3, "ckpt");
        let mut ps = ParamSet::new();
        ps.init_weight("a.w", 3, 4, &mut rng);
        ps.insert("a.b", Tensor::matrix(1, 3, vec![1.0 / 3.0, -1e-310, 7.0e22]), false);
        let records: BTreeMap<String, TensorRecord> = ps
            .iter()
            .map(|(k, p)| {
                (
                    k.clone(),
                    TensorRecord {
                        shape: p.value.shape().to_vec(),
                        data: p.value.data().to_vec(),
                        decay: p.decay,
                    },
                )
            })
            .collect();
        let s = crate::io::to_canonical_string(&records).unwrap();
        let back: BTreeMap<String, TensorRecord> = serde_json::from_str(&s).unwrap();
        for (k, r) in &back {
            let orig = ps.param(k).unwrap();
            assert_eq!(orig.decay, r.decay);
            assert_eq!(orig.value.shape(), r.shape.as_slice());
            for (a, b) in orig.value.data().iter().zip(&r.data) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
