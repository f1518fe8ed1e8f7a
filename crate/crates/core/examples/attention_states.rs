//! Regime probabilities, transition matrix and attention for one test window.
//!
//!     cargo run --release --example attention_states -- [sample]

use extremecast::baselines::{Forecaster, ModelKind};
use extremecast::data::{prepare, Partition};
use extremecast::io::RunConfig;
use extremecast::synthetic::{synthetic_weather, SyntheticConfig};
use extremecast::trainer::train;

fn main() -> extremecast::Result<()> {
    let sample = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut cfg = RunConfig::from_json(include_str!("../configs/desk.json"))?;
    cfg.training.max_epochs = 10;
    let raw = synthetic_weather(&SyntheticConfig::default(), 2)?;
    let ds = prepare(&raw, &cfg.dataset, &cfg.features, cfg.training.feature_mode)?.dataset;
    let out = train(&ds, &cfg.model_spec(ModelKind::DualStream, &ds.target_name), &cfg.training_config(2))?;
    let Forecaster::DualStream(net) = &out.model else { unreachable!() };
    let test = ds.partition(Partition::Test);
    let intro = net.introspect(&out.params, &test.samples[sample].x, 1)?;

    let fmt = |row: &[f64]| row.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" ");
    println!("transition matrix");
    for row in &intro.transition {
        println!("  {}", fmt(row));
    }
    println!("state probabilities and amplification by day");
    for (t, p) in intro.p[0].iter().enumerate() {
        println!("  t{t:<3} {}  alpha {:.3}", fmt(p), intro.alpha[0][t]);
    }
    println!("attention from the last day: {}", fmt(intro.attention[0].last().unwrap()));
    Ok(())
}
