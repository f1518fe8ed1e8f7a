//! Full engineered features against minimal and raw-only inputs.
//!
//!     cargo run --release --example feature_ablation -- [epochs]

use extremecast::baselines::ModelKind;
use extremecast::features::FeatureMode;
use extremecast::io::RunConfig;
use extremecast::synthetic::{synthetic_weather, SyntheticConfig};
use extremecast::trainer::{feature_ablation, write_sweep};

fn main() -> extremecast::Result<()> {
    let mut cfg = RunConfig::from_json(include_str!("../configs/desk.json"))?;
    cfg.training.max_epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(15);
    let raw = synthetic_weather(&SyntheticConfig::default(), cfg.seed)?;
    let spec = cfg.model_spec(ModelKind::DualStream, "tempmax");
    let modes = [FeatureMode::Full, FeatureMode::Minimal, FeatureMode::RawOnly];
    let rows = feature_ablation(&raw, &cfg.dataset, &cfg.features, &modes, &spec, &cfg.training_config(cfg.seed), cfg.eval.tail_q)?;
    write_sweep(std::io::stdout(), &rows)
}
