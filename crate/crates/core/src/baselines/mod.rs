//! Reference forecasters run through the same harness as the main network,
//! plus the [`ModelSpec`] / [`Forecaster`] pair that lets the trainer, the
//! evaluator and checkpoints treat every model alike.

pub mod nbeats;
pub mod persistence;
pub mod tcn;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::loss::LossKind;
use crate::model::{Architecture, DualStream, ModelConfig};

pub use nbeats::{NBeats, NBeatsConfig};
pub use persistence::Persistence;
pub use tcn::{Tcn, TcnConfig};

/// Which model a run trains, with its configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    DualStream(ModelConfig),
    Tcn(TcnConfig),
    Nbeats(NBeatsConfig),
    Persistence { target: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    DualStream,
    Tcn,
    Nbeats,
    Persistence,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::DualStream => "dual_stream",
            ModelKind::Tcn => "tcn",
            ModelKind::Nbeats => "nbeats",
            ModelKind::Persistence => "persistence",
        }
    }
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::DualStream(_) => ModelKind::DualStream,
            ModelSpec::Tcn(_) => ModelKind::Tcn,
            ModelSpec::Nbeats(_) => ModelKind::Nbeats,
            ModelSpec::Persistence { .. } => ModelKind::Persistence,
        }
    }

    /// The training objective: the main network uses the extreme-weighted
    /// loss, the neural baselines Huber.
    pub fn default_loss(&self) -> LossKind {
        match self {
            ModelSpec::DualStream(_) => LossKind::Extreme,
            _ => LossKind::Huber,
        }
    }

    /// Fill the data-dependent dimensions (window length, feature count,
    /// target column) and build the forecaster.
    pub fn resolve(&self, feature_names: &[String], target: &str, lookback: usize) -> Result<Forecaster> {
        let f = feature_names.len();
        Ok(match self {
            ModelSpec::DualStream(c) => Forecaster::DualStream(DualStream::new(ModelConfig {
                input_dim: f,
                lookback,
                ..c.clone()
            })?),
            ModelSpec::Tcn(c) => Forecaster::Tcn(Tcn::new(TcnConfig {
                input_dim: f,
                lookback,
                ..c.clone()
            })?),
            ModelSpec::Nbeats(c) => {
                let p = Persistence::new(feature_names, target, lookback)?;
                Forecaster::Nbeats(NBeats::new(NBeatsConfig {
                    input_dim: f,
                    lookback,
                    target_index: p.target_index,
                    ..c.clone()
                })?)
            }
            ModelSpec::Persistence { .. } => Forecaster::Persistence(Persistence::new(feature_names, target, lookback)?),
        })
    }
}

/// A model with all dimensions fixed.
#[derive(Clone, Debug, PartialEq)]
pub enum Forecaster {
    DualStream(DualStream),
    Tcn(Tcn),
    Nbeats(NBeats),
    Persistence(Persistence),
}

impl Forecaster {
    pub fn arch(&self) -> &dyn Architecture {
        match self {
            Forecaster::DualStream(m) => m,
            Forecaster::Tcn(m) => m,
            Forecaster::Nbeats(m) => m,
            Forecaster::Persistence(m) => m,
        }
    }

    /// The resolved specification (stored in checkpoints).
    pub fn spec(&self, target: &str) -> ModelSpec {
        match self {
            Forecaster::DualStream(m) => ModelSpec::DualStream(m.config.clone()),
            Forecaster::Tcn(m) => ModelSpec::Tcn(m.config.clone()),
            Forecaster::Nbeats(m) => ModelSpec::Nbeats(m.config.clone()),
            Forecaster::Persistence(_) => ModelSpec::Persistence { target: target.to_string() },
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.spec("").kind()
    }

    pub fn trainable(&self) -> bool {
        !matches!(self, Forecaster::Persistence(_))
    }
}
