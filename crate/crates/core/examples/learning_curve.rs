//! Test error as the training window shrinks toward the split boundary.
//!
//!     cargo run --release --example learning_curve -- [epochs]

use extremecast::baselines::ModelKind;
use extremecast::data::prepare;
use extremecast::io::RunConfig;
use extremecast::synthetic::{synthetic_weather, SyntheticConfig};
use extremecast::trainer::{learning_curve, write_sweep};

fn main() -> extremecast::Result<()> {
    let mut cfg = RunConfig::from_json(include_str!("../configs/desk.json"))?;
    cfg.training.max_epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(15);
    let raw = synthetic_weather(&SyntheticConfig::default(), cfg.seed)?;
    let ds = prepare(&raw, &cfg.dataset, &cfg.features, cfg.training.feature_mode)?.dataset;
    let spec = cfg.model_spec(ModelKind::DualStream, &ds.target_name);
    let rows = learning_curve(&ds, &spec, &[0.25, 0.5, 0.75, 1.0], &cfg.training_config(cfg.seed), cfg.eval.tail_q)?;
    write_sweep(std::io::stdout(), &rows)
}
