//! Which inputs the trained network leans on, and how its residuals look.
//!
//!     cargo run --release --example explain_model -- [epochs]

use extremecast::baselines::ModelKind;
use extremecast::data::{prepare, Partition};
use extremecast::diagnostics::{occlusion_sensitivity, partial_dependence, permutation_importance, ranking_agreement, residual_diagnostics};
use extremecast::eval::predict_raw;
use extremecast::io::RunConfig;
use extremecast::synthetic::{synthetic_weather, SyntheticConfig};
use extremecast::trainer::train;

fn main() -> extremecast::Result<()> {
    let mut cfg = RunConfig::from_json(include_str!("../configs/desk.json"))?;
    cfg.training.max_epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(15);
    let raw = synthetic_weather(&SyntheticConfig::default(), 5)?;
    let ds = prepare(&raw, &cfg.dataset, &cfg.features, cfg.training.feature_mode)?.dataset;
    let spec = cfg.model_spec(ModelKind::DualStream, &ds.target_name);
    let out = train(&ds, &spec, &cfg.training_config(5))?;
    let test = ds.partition(Partition::Test);
    let scale = ds.target_scale()?;

    let mut occ = occlusion_sensitivity(&out.model, &out.params, &test, &scale)?;
    let perm = permutation_importance(&out.model, &out.params, &test, &scale, cfg.eval.permutation_repeats, 5)?;
    println!("spearman agreement between occlusion and permutation: {:?}", ranking_agreement(&occ, &perm));
    occ.sort_by(|a, b| b.delta_rmse.total_cmp(&a.delta_rmse));
    println!("\nocclusion, top 5");
    for r in occ.iter().take(5) {
        println!("  {:<24} +{:.4}", r.feature, r.delta_rmse);
    }

    let top = &occ[0].feature;
    let curve = partial_dependence(out.model.arch(), &out.params, &test, top, cfg.eval.pdp_grid_size, &scale)?;
    println!("\npartial dependence on {top} : {:.4} degrees per scaled unit", curve.slope());

    let (y, y_hat) = predict_raw(&out.model, &out.params, &test, &scale)?;
    let e: Vec<f64> = y.iter().zip(&y_hat).map(|(a, b)| a - b).collect();
    let d = residual_diagnostics(&e, &y_hat)?;
    println!("\nresiduals: {} acf lags of {} inside ±{:.3}", d.acf_inside_band(), d.acf.len(), d.band);
    Ok(())
}
