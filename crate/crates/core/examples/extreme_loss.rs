//! How the percentile weights split one batch, and what that does to the loss.

use extremecast::loss::{extreme_weather_loss, extreme_weights, mse, LossConfig};
use extremecast::numeric::Rng;

fn main() -> extremecast::Result<()> {
    let mut rng = Rng::new(4, "batch");
    let target: Vec<f64> = (0..64).map(|_| 30.0 + 6.0 * rng.standard_normal()).collect();
    let pred: Vec<f64> = target.iter().map(|t| t + rng.gaussian(0.0, 1.5).unwrap()).collect();
    let cfg = LossConfig::default();
    let w = extreme_weights(&target, &cfg)?;
    let mean = target.iter().sum::<f64>() / target.len() as f64;
    let tail = |hot: bool| (0..w.len()).filter(|&i| w[i] != cfg.beta && (target[i] > mean) == hot).count();
    println!("hot tail (weight {}): {} samples", cfg.alpha_high, tail(true));
    println!("cold tail (weight {}): {} samples", cfg.alpha_low, tail(false));
    println!("normal (weight {}): {} samples", cfg.beta, w.iter().filter(|&&x| x == cfg.beta).count());
    let (loss, _) = extreme_weather_loss(&pred, &target, &cfg)?;
    println!("weighted loss {loss:.4}, plain mse {:.4}", mse(&pred, &target));
    Ok(())
}
