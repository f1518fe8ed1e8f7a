//! Mini-batch training with early stopping, plus the learning-curve and
//! feature-ablation sweeps.

use std::time::Instant;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::augment::{augment_dataset, AugmentConfig};
use crate::baselines::{Forecaster, ModelSpec};
use crate::data::{prepare, DatasetConfig, Partition, PreparedDataset, TimeSeriesTable, WindowedDataset};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvaluationReport, EVAL_CHUNK};
use crate::features::{FeatureMode, FeatureSpec};
use crate::loss::{evaluate_loss, LossConfig, LossKind};
use crate::model::{forward, predict};
use crate::numeric::{ParamSet, Rng};
use crate::optim::{adamw_step, clip_gradients, cosine_warm_restart_lr, AdamWState, OptimConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub loss: LossConfig,
    /// Overrides the model's own objective (e.g. `mse` for the loss ablation).
    pub loss_kind: Option<LossKind>,
    pub optim: OptimConfig,
    /// Train on the latest fraction of the training partition.
    pub train_fraction: f64,
    pub feature_mode: FeatureMode,
    /// Wall-clock timings make outputs run-dependent; off by default.
    pub record_wall_clock: bool,
    /// Keep every epoch's parameters in the returned state.
    pub keep_all_checkpoints: bool,
    #[serde(skip)]
    pub augment: AugmentConfig,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 64,
            max_epochs: 300,
            patience: 25,
            loss: LossConfig::default(),
            loss_kind: None,
            optim: OptimConfig::default(),
            train_fraction: 1.0,
            feature_mode: FeatureMode::Full,
            record_wall_clock: false,
            keep_all_checkpoints: false,
            augment: AugmentConfig::default(),
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, path: &str) -> Result<()> {
        if self.batch_size < 2 {
            return Err(Error::config(format!("{path}.batch_size"), "must be >= 2"));
        }
        if self.patience < 1 {
            return Err(Error::config(format!("{path}.patience"), "must be >= 1"));
        }
        if self.max_epochs < 1 {
            return Err(Error::config(format!("{path}.max_epochs"), "must be >= 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::config(format!("{path}.train_fraction"), "must lie in (0, 1]"));
        }
        self.loss.validate(&format!("{path}.loss"))?;
        self.optim.validate(&format!("{path}.optim"))?;
        self.augment.validate("augment")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainState {
    /// epochs actually run
    pub epoch: usize,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub epochs_since_improvement: usize,
    pub optimizer: AdamWState,
    pub history: Vec<EpochRecord>,
    pub wall_clock_to_best: f64,
    pub wall_clock_total: f64,
    #[serde(skip)]
    pub snapshots: Vec<ParamSet>,
}

pub struct TrainOutcome {
    pub model: Forecaster,
    /// best-validation parameters
    pub params: ParamSet,
    pub state: TrainState,
}

/// The latest `fraction` of samples (closest to the validation boundary).
pub fn latest_fraction(ds: &WindowedDataset, fraction: f64) -> WindowedDataset {
    let keep = ((ds.len() as f64 * fraction).round() as usize).clamp(1, ds.len().max(1));
    ds.select(ds.len() - keep..ds.len())
}

/// Index ranges of the batches in one epoch; the last partial batch is kept
/// only when it holds at least two samples.
pub fn batch_bounds(n: usize, batch_size: usize) -> Vec<std::ops::Range<usize>> {
    (0..n)
        .step_by(batch_size)
        .map(|s| s..(s + batch_size).min(n))
        .filter(|r| r.len() >= 2)
        .collect()
}

fn gather(ds: &WindowedDataset, idx: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(idx.len() * ds.samples.first().map_or(0, |s| s.x.len()));
    let mut y = Vec::with_capacity(idx.len());
    for &i in idx {
        x.extend_from_slice(&ds.samples[i].x);
        y.push(ds.samples[i].y);
    }
    (x, y)
}

/// Extreme-weighted loss over the whole set in evaluation mode.
pub fn validation_loss(model: &Forecaster, params: &ParamSet, ds: &WindowedDataset, loss: &LossConfig) -> Result<f64> {
    let idx: Vec<usize> = (0..ds.len()).collect();
    let (x, y) = gather(ds, &idx);
    let pred = predict(model.arch(), params, &x, ds.len(), EVAL_CHUNK)?;
    evaluate_loss(LossKind::Extreme, loss, &pred, &y)
}

/// Train `spec` on the dataset's training partition.
pub fn train(dataset: &PreparedDataset, spec: &ModelSpec, cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_observed(dataset, spec, cfg, &mut |_| {})
}

/// As [`train`], calling `observer` with the target dates of every batch
/// that feeds an optimizer step.
pub fn train_observed(
    dataset: &PreparedDataset,
    spec: &ModelSpec,
    cfg: &TrainConfig,
    observer: &mut dyn FnMut(&[NaiveDate]),
) -> Result<TrainOutcome> {
    cfg.validate("training")?;
    let start = Instant::now();
    let clock = |t: &Instant| if cfg.record_wall_clock { t.elapsed().as_secs_f64() } else { 0.0 };
    let model = spec.resolve(&dataset.feature_names, &dataset.target_name, dataset.lookback)?;
    let val = dataset.partition(Partition::Val);
    let base = latest_fraction(&dataset.partition(Partition::Train), cfg.train_fraction);
    if base.is_empty() || val.is_empty() {
        return Err(Error::Data("training needs non-empty train and validation partitions".into()));
    }
    let mut params = model.arch().init_params(cfg.seed)?;
    let mut state = TrainState {
        epoch: 0,
        best_epoch: 0,
        best_val_loss: validation_loss(&model, &params, &val, &cfg.loss)?,
        epochs_since_improvement: 0,
        optimizer: AdamWState::new(&params),
        history: Vec::new(),
        wall_clock_to_best: 0.0,
        wall_clock_total: 0.0,
        snapshots: Vec::new(),
    };
    if !model.trainable() {
        state.wall_clock_total = clock(&start);
        return Ok(TrainOutcome { model, params, state });
    }

    let train = if cfg.augment.enabled {
        augment_dataset(&base, &cfg.augment, cfg.seed)?
    } else {
        base
    };
    let batches = batch_bounds(train.len(), cfg.batch_size);
    if batches.is_empty() {
        return Err(Error::Data(format!("{} training samples do not fill one batch of 2", train.len())));
    }
    let kind = cfg.loss_kind.unwrap_or_else(|| spec.default_loss());
    let mut shuffle = Rng::new(cfg.seed, "shuffle");
    let mut drop = Rng::new(cfg.seed, "dropout");
    let mut best = params.clone();

    for epoch in 1..=cfg.max_epochs {
        let lr = cosine_warm_restart_lr(epoch - 1, &cfg.optim);
        let order = shuffle.permutation(train.len());
        let mut total = 0.0;
        for (b, r) in batches.iter().enumerate() {
            let idx = &order[r.clone()];
            let (x, y) = gather(&train, idx);
            let dates: Vec<NaiveDate> = idx.iter().map(|&i| train.samples[i].target_date).collect();
            observer(&dates);
            let mut pass = forward(model.arch(), &params, &x, idx.len(), Some(&mut drop))?;
            let (loss, mut grads) = pass.loss_backward(&params, kind, &cfg.loss, &y)?;
            if !loss.is_finite() || !grads.global_norm().is_finite() {
                return Err(Error::NonFinite(format!("training loss at epoch {epoch}, batch {}", b + 1)));
            }
            clip_gradients(&mut grads, cfg.optim.clip_norm);
            adamw_step(&mut params, &grads, &mut state.optimizer, lr, &cfg.optim);
            total += loss;
        }
        let val_loss = validation_loss(&model, &params, &val, &cfg.loss)?;
        state.epoch = epoch;
        state.history.push(EpochRecord {
            epoch,
            train_loss: total / batches.len() as f64,
            val_loss,
            lr,
        });
        if cfg.keep_all_checkpoints {
            state.snapshots.push(params.clone());
        }
        if val_loss < state.best_val_loss || state.best_epoch == 0 {
            state.best_val_loss = val_loss;
            state.best_epoch = epoch;
            state.epochs_since_improvement = 0;
            state.wall_clock_to_best = clock(&start);
            best = params.clone();
        } else {
            state.epochs_since_improvement += 1;
            if state.epochs_since_improvement >= cfg.patience {
                break;
            }
        }
    }
    state.wall_clock_total = clock(&start);
    Ok(TrainOutcome {
        model,
        params: best,
        state,
    })
}

/// Write `epoch,train_loss,val_loss,lr` rows.
pub fn write_history(w: impl std::io::Write, history: &[EpochRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["epoch", "train_loss", "val_loss", "lr"])?;
    for h in history {
        wtr.write_record([h.epoch.to_string(), h.train_loss.to_string(), h.val_loss.to_string(), h.lr.to_string()])?;
    }
    wtr.flush().map_err(|e| Error::io("history", e))?;
    Ok(())
}

/// Train then evaluate on the test partition.
pub fn train_and_evaluate(dataset: &PreparedDataset, spec: &ModelSpec, cfg: &TrainConfig, tail_q: f64) -> Result<(TrainOutcome, EvaluationReport)> {
    let out = train(dataset, spec, cfg)?;
    let mut report = evaluate(&out.model, &out.params, &dataset.partition(Partition::Test), &dataset.target_scale()?, tail_q)?;
    report.training_time_s = out.state.wall_clock_to_best;
    report.best_val_loss = Some(out.state.best_val_loss);
    Ok((out, report))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub n_features: usize,
    pub n_train: usize,
    pub epochs: usize,
    pub rmse: f64,
    pub mae: f64,
    pub r2: Option<f64>,
    pub extreme_high_rmse: Option<f64>,
    pub extreme_low_rmse: Option<f64>,
}

impl SweepRow {
    fn new(label: String, n_features: usize, n_train: usize, epochs: usize, r: &EvaluationReport) -> Self {
        Self {
            label,
            n_features,
            n_train,
            epochs,
            rmse: r.rmse,
            mae: r.mae,
            r2: r.r2,
            extreme_high_rmse: r.extreme_high_rmse,
            extreme_low_rmse: r.extreme_low_rmse,
        }
    }
}

/// Retrain on the latest `fractions` of the training data and evaluate each
/// on the fixed test set. Fractions too small for two batches are skipped.
pub fn learning_curve(dataset: &PreparedDataset, spec: &ModelSpec, fractions: &[f64], cfg: &TrainConfig, tail_q: f64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    let n = dataset.train.n_samples;
    for &f in fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::config("learning_curve.fractions", format!("{f} is outside (0, 1]")));
        }
        let kept = latest_fraction(&dataset.partition(Partition::Train), f).len();
        if batch_bounds(kept, cfg.batch_size).len() < 2 {
            eprintln!("warning: skipping fraction {f}: {kept} samples give fewer than 2 batches");
            continue;
        }
        let c = TrainConfig {
            train_fraction: f,
            ..cfg.clone()
        };
        let (out, report) = train_and_evaluate(dataset, spec, &c, tail_q)?;
        rows.push(SweepRow::new(format!("{f}"), dataset.feature_names.len(), kept.min(n), out.state.epoch, &report));
    }
    Ok(rows)
}

/// Re-prepare the raw table in each feature mode and train with identical seeds.
pub fn feature_ablation(
    raw: &TimeSeriesTable,
    data_cfg: &DatasetConfig,
    spec_features: &FeatureSpec,
    modes: &[FeatureMode],
    spec: &ModelSpec,
    cfg: &TrainConfig,
    tail_q: f64,
) -> Result<Vec<SweepRow>> {
    if modes.is_empty() {
        return Err(Error::invalid("feature ablation needs at least one mode"));
    }
    let mut rows = Vec::new();
    for &mode in modes {
        let prep = prepare(raw, data_cfg, spec_features, mode)?;
        let ds = prep.dataset;
        let (out, report) = train_and_evaluate(&ds, spec, cfg, tail_q)?;
        rows.push(SweepRow::new(mode.name().to_string(), ds.feature_names.len(), ds.train.n_samples, out.state.epoch, &report));
    }
    Ok(rows)
}

pub fn write_sweep(w: impl std::io::Write, rows: &[SweepRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["label", "n_features", "n_train", "epochs", "rmse", "mae", "r2", "extreme_high_rmse", "extreme_low_rmse"])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        wtr.write_record([
            r.label.clone(),
            r.n_features.to_string(),
            r.n_train.to_string(),
            r.epochs.to_string(),
            r.rmse.to_string(),
            r.mae.to_string(),
            opt(r.r2),
            opt(r.extreme_high_rmse),
            opt(r.extreme_low_rmse),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("sweep", e))?;
    Ok(())
}
