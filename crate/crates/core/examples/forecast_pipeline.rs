//! Synthetic CSV to trained checkpoint to test report, all in memory.
//!
//!     cargo run --release --example forecast_pipeline -- [out_dir] [epochs]
//!
//! Uses configs/desk.json so it finishes in well under a minute.

use std::path::PathBuf;

use extremecast::baselines::ModelKind;
use extremecast::data::{prepare, Partition};
use extremecast::eval::evaluate;
use extremecast::io::{write_json, Checkpoint, RunConfig};
use extremecast::synthetic::{synthetic_weather, SyntheticConfig};
use extremecast::trainer::{train, write_history};

fn main() -> extremecast::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "pipeline_out".into()));
    let mut cfg = RunConfig::from_json(include_str!("../configs/desk.json"))?;
    if let Some(e) = args.next().and_then(|s| s.parse().ok()) {
        cfg.training.max_epochs = e;
    }

    let raw = synthetic_weather(&SyntheticConfig::default(), cfg.seed)?;
    let prep = prepare(&raw, &cfg.dataset, &cfg.features, cfg.training.feature_mode)?;
    let ds = prep.dataset;
    println!("{} features kept of {}: {:?}", ds.feature_names.len(), prep.ranking.len(), ds.feature_names);
    println!("windows: train {} val {} test {}", ds.train.n_samples, ds.val.n_samples, ds.test.n_samples);

    let spec = cfg.model_spec(ModelKind::DualStream, &ds.target_name);
    let outcome = train(&ds, &spec, &cfg.training_config(cfg.seed))?;
    let s = &outcome.state;
    println!("best epoch {} of {}, val loss {:.4}", s.best_epoch, s.epoch, s.best_val_loss);

    let report = evaluate(&outcome.model, &outcome.params, &ds.partition(Partition::Test), &ds.target_scale()?, cfg.eval.tail_q)?;
    println!("test rmse {:.3}  mae {:.3}  r2 {:?}", report.rmse, report.mae, report.r2);
    println!("hot tail rmse {:?}  cold tail rmse {:?}", report.extreme_high_rmse, report.extreme_low_rmse);

    std::fs::create_dir_all(&out).map_err(|e| extremecast::Error::io(&out, e))?;
    Checkpoint::from_outcome(&outcome, &ds, &cfg.training.loss, cfg.seed).save(&out.join("checkpoint.json"))?;
    write_json(&out.join("report.json"), &report)?;
    let hist = out.join("history.csv");
    write_history(std::fs::File::create(&hist).map_err(|e| extremecast::Error::io(&hist, e))?, &s.history)?;
    println!("wrote {}", out.display());
    Ok(())
}
