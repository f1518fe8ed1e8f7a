//! k-means on (year, month, tempmax) to label weather regimes.

use extremecast::data::prepare;
use extremecast::diagnostics::kmeans_regimes;
use extremecast::io::RunConfig;
use extremecast::synthetic::{synthetic_weather, SyntheticConfig};

fn main() -> extremecast::Result<()> {
    let k = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let cfg = RunConfig::default();
    let raw = synthetic_weather(&SyntheticConfig::default(), 8)?;
    let ds = prepare(&raw, &cfg.dataset, &cfg.features, cfg.training.feature_mode)?.dataset;
    let r = kmeans_regimes(&ds.daily, k, 8)?;
    println!("converged in {} iterations", r.iterations);
    for (c, centroid) in r.centroids.iter().enumerate() {
        let n = r.assignments.iter().filter(|&&a| a == c).count();
        println!("regime {c}: {n:>5} days, year {:.1}, month {:.1}, tempmax {:.1}", centroid[0], centroid[1], centroid[2]);
    }
    Ok(())
}
