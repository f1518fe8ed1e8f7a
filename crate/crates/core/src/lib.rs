//! Forecasting daily maximum temperature with a dual-stream network: a
//! regime stream (BiLSTM plus a learnable Markov state transition) and an
//! anomaly stream (self-attention, anomaly amplification, BiGRU), fused by a
//! learned gate.
//!
//! The crate covers the whole path from raw daily weather CSV to trained
//! checkpoints and tail-aware evaluation reports:
//!
//! - [`data`] and [`features`]: ingestion, imputation, causal feature
//!   engineering, robust scaling, chronological splits and windowing.
//! - [`augment`]: jitter, scaling, time warping and magnitude warping.
//! - [`model`]: the forecaster and its exact gradients.
//! - [`loss`], [`optim`], [`trainer`]: extreme-weighted loss, AdamW with cosine
//!   warm restarts, early stopping, ablation sweeps.
//! - [`baselines`]: persistence, TCN and N-BEATS under the same harness.
//! - [`eval`] and [`diagnostics`]: metrics, tail RMSE, occlusion, partial
//!   dependence, permutation importance, residual checks, k-means regimes.
//! - [`io`]: run configuration, checkpoints, reports and the CLI commands.

pub mod augment;
pub mod baselines;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod loss;
pub mod model;
pub mod numeric;
pub mod optim;
pub mod synthetic;
pub mod trainer;

pub use error::{Error, Result};
