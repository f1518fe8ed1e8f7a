use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::augment::AugmentConfig;
use crate::baselines::{ModelKind, ModelSpec, NBeatsConfig, TcnConfig};
use crate::data::DatasetConfig;
use crate::error::{Error, Result};
use crate::features::FeatureSpec;
use crate::model::ModelConfig;
use crate::trainer::TrainConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// tail fraction for the extreme RMSEs
    pub tail_q: f64,
    pub pdp_grid_size: usize,
    /// features swept by the `pdp` method when none are named
    pub pdp_top_features: usize,
    pub permutation_repeats: usize,
    pub kmeans_k: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            tail_q: 0.05,
            pdp_grid_size: 20,
            pdp_top_features: 5,
            permutation_repeats: 5,
            kmeans_k: 4,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.tail_q > 0.0 && self.tail_q < 0.5) {
            return Err(Error::config(format!("{path}.tail_q"), "must lie in (0, 0.5)"));
        }
        if self.pdp_grid_size < 1 || self.permutation_repeats < 1 {
            return Err(Error::config(format!("{path}.permutation_repeats"), "grid size and repeats must be >= 1"));
        }
        if self.kmeans_k < 2 {
            return Err(Error::config(format!("{path}.kmeans_k"), "must be >= 2"));
        }
        Ok(())
    }
}

/// Everything a run needs besides the data. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    pub features: FeatureSpec,
    pub augment: AugmentConfig,
    pub model: ModelConfig,
    pub tcn: TcnConfig,
    pub nbeats: NBeatsConfig,
    pub training: TrainConfig,
    pub eval: EvalConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetConfig::default(),
            features: FeatureSpec::default(),
            augment: AugmentConfig::default(),
            model: ModelConfig::default(),
            tcn: TcnConfig::default(),
            nbeats: NBeatsConfig::default(),
            training: TrainConfig::default(),
            eval: EvalConfig::default(),
            seed: 42,
        }
    }
}

impl RunConfig {
    /// Parse and validate; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "config".to_string() } else { path }, e.inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Defaults when no file is given.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.dataset.validate("dataset")?;
        self.features.validate("features")?;
        self.augment.validate("augment")?;
        let dims = ModelConfig {
            input_dim: self.model.input_dim.max(1),
            ..self.model.clone()
        };
        dims.validate("model")?;
        TcnConfig {
            input_dim: 1,
            ..self.tcn.clone()
        }
        .validate("tcn")?;
        NBeatsConfig {
            input_dim: 1,
            target_index: 0,
            ..self.nbeats.clone()
        }
        .validate("nbeats")?;
        self.training_config(self.seed).validate("training")?;
        self.eval.validate("eval")
    }

    /// The training configuration with the run's augmentation and seed.
    pub fn training_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            augment: self.augment.clone(),
            seed,
            ..self.training.clone()
        }
    }

    pub fn model_spec(&self, kind: ModelKind, target: &str) -> ModelSpec {
        match kind {
            ModelKind::DualStream => ModelSpec::DualStream(self.model.clone()),
            ModelKind::Tcn => ModelSpec::Tcn(self.tcn.clone()),
            ModelKind::Nbeats => ModelSpec::Nbeats(self.nbeats.clone()),
            ModelKind::Persistence => ModelSpec::Persistence { target: target.to_string() },
        }
    }
}
