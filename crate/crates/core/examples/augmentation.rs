//! What each augmentation does to one window of the target column.

use extremecast::augment::{jitter, magnitude_warp, scale, time_warp, warp_path};
use extremecast::data::prepare;
use extremecast::io::RunConfig;
use extremecast::numeric::Rng;
use extremecast::synthetic::{synthetic_weather, SyntheticConfig};

fn main() -> extremecast::Result<()> {
    let cfg = RunConfig::default();
    let raw = synthetic_weather(&SyntheticConfig::default(), 3)?;
    let ds = prepare(&raw, &cfg.dataset, &cfg.features, cfg.training.feature_mode)?.dataset;
    let train = ds.partition(extremecast::data::Partition::Train);
    let (l, f) = (train.lookback, train.feature_names.len());
    let col = train.feature_names.iter().position(|n| n == &ds.target_name).unwrap_or(0);
    let x = &train.samples[100].x;
    let a = &cfg.augment;
    let mut rng = Rng::new(3, "preview");

    let variants = [
        ("original", x.clone()),
        ("jitter", jitter(x, &mut rng, a.jitter_sigma)?),
        ("scale", scale(x, &mut rng, a.scale_lo, a.scale_hi)),
        ("time_warp", time_warp(x, l, f, &mut rng, a.warp_knots, a.warp_sigma)?),
        ("magnitude", magnitude_warp(x, l, f, &mut rng, a.warp_knots, a.warp_sigma)?),
    ];
    println!("scaled {} over {l} days", ds.target_name);
    for (name, v) in &variants {
        let row: Vec<String> = (0..l).map(|t| format!("{:6.2}", v[t * f + col])).collect();
        println!("{name:<10} {}", row.join(" "));
    }
    let tau = warp_path(l, &mut rng, a.warp_knots, a.warp_sigma)?;
    println!("warp path  {}", tau.iter().map(|t| format!("{t:6.2}")).collect::<Vec<_>>().join(" "));
    Ok(())
}
