//! Every model under the same data, seed and harness.
//!
//!     cargo run --release --example baseline_comparison -- [epochs]

use extremecast::baselines::ModelKind;
use extremecast::data::prepare;
use extremecast::io::RunConfig;
use extremecast::synthetic::{synthetic_weather, SyntheticConfig};
use extremecast::trainer::train_and_evaluate;

fn main() -> extremecast::Result<()> {
    let mut cfg = RunConfig::from_json(include_str!("../configs/desk.json"))?;
    if let Some(e) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.training.max_epochs = e;
    }
    let raw = synthetic_weather(&SyntheticConfig::default(), cfg.seed)?;
    let ds = prepare(&raw, &cfg.dataset, &cfg.features, cfg.training.feature_mode)?.dataset;

    println!("{:<12} {:>8} {:>8} {:>8} {:>10} {:>10}", "model", "rmse", "mae", "r2", "hot tail", "cold tail");
    for kind in [ModelKind::Persistence, ModelKind::Tcn, ModelKind::Nbeats, ModelKind::DualStream] {
        let spec = cfg.model_spec(kind, &ds.target_name);
        let (_, r) = train_and_evaluate(&ds, &spec, &cfg.training_config(cfg.seed), cfg.eval.tail_q)?;
        let f = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<12} {:>8.3} {:>8.3} {:>8} {:>10} {:>10}",
            kind.name(),
            r.rmse,
            r.mae,
            f(r.r2),
            f(r.extreme_high_rmse),
            f(r.extreme_low_rmse)
        );
    }
    Ok(())
}
