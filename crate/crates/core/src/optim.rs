//! AdamW, cosine annealing with warm restarts, and global-norm clipping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ParamSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimConfig {
    pub lr_max: f64,
    pub lr_min: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// First restart period in epochs.
    pub t0: usize,
    pub t_mult: usize,
    pub clip_norm: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            lr_max: 5e-3,
            lr_min: 0.0,
            weight_decay: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t0: 10,
            t_mult: 2,
            clip_norm: 5.0,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.lr_max > self.lr_min && self.lr_min >= 0.0) {
            return Err(Error::config(format!("{path}.lr_max"), "need lr_max > lr_min >= 0"));
        }
        if self.t0 < 1 {
            return Err(Error::config(format!("{path}.t0"), "must be >= 1"));
        }
        if self.t_mult < 1 {
            return Err(Error::config(format!("{path}.t_mult"), "must be >= 1"));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::config(format!("{path}.weight_decay"), "must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::config(format!("{path}.beta1"), "betas must lie in [0, 1)"));
        }
        if !(self.clip_norm > 0.0) {
            return Err(Error::config(format!("{path}.clip_norm"), "must be > 0"));
        }
        Ok(())
    }
}

/// Learning rate at `epoch` (0-based); restarts at `t0`, `t0 + t0·t_mult`, ...
pub fn cosine_warm_restart_lr(epoch: usize, cfg: &OptimConfig) -> f64 {
    let mut t_cur = epoch;
    let mut t_i = cfg.t0.max(1);
    while t_cur >= t_i {
        t_cur -= t_i;
        t_i *= cfg.t_mult.max(1);
    }
    cfg.lr_min + 0.5 * (cfg.lr_max - cfg.lr_min) * (1.0 + (std::f64::consts::PI * t_cur as f64 / t_i as f64).cos())
}

/// Scale all gradients so their global L2 norm is at most `max_norm`. Returns the pre-clip norm.
pub fn clip_gradients(grads: &mut ParamSet, max_norm: f64) -> f64 {
    let norm = grads.global_norm();
    if norm > max_norm {
        let s = max_norm / norm;
        for (_, p) in grads.iter_mut() {
            p.value.data_mut().iter_mut().for_each(|g| *g *= s);
        }
    }
    norm
}

/// First and second moment estimates plus the step counter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamWState {
    pub step: u64,
    pub m: ParamSet,
    pub v: ParamSet,
}

impl AdamWState {
    pub fn new(params: &ParamSet) -> Self {
        Self {
            step: 0,
            m: params.zeros_like(),
            v: params.zeros_like(),
        }
    }
}

/// One AdamW update:
/// `θ ← θ − lr·m̂/(√v̂ + eps) − lr·wd·θ`, decay only where the parameter allows it.
pub fn adamw_step(params: &mut ParamSet, grads: &ParamSet, state: &mut AdamWState, lr: f64, cfg: &OptimConfig) {
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);
    for (name, p) in params.iter_mut() {
        let g = grads.get(name).expect("gradient for every parameter").data();
        let m = state.m.get_mut(name).expect("moment").data_mut();
        for (mi, gi) in m.iter_mut().zip(g) {
            *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * gi;
        }
        let v = state.v.get_mut(name).expect("moment").data_mut();
        for (vi, gi) in v.iter_mut().zip(g) {
            *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * gi * gi;
        }
        let m = state.m.get(name).unwrap().data();
        let v = state.v.get(name).unwrap().data();
        let wd = if p.decay { cfg.weight_decay } else { 0.0 };
        for ((theta, mi), vi) in p.value.data_mut().iter_mut().zip(m).zip(v) {
            let mhat = mi / bc1;
            let vhat = vi / bc2;
            *theta -= lr * mhat / (vhat.sqrt() + cfg.eps) + lr * wd * *theta;
        }
    }
}
