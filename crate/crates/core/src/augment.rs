//! Offline training-set augmentation: jitter, scaling, time and magnitude warps.

use serde::{Deserialize, Serialize};

use crate::data::{Partition, Sample, WindowedDataset};
use crate::error::{Error, Result};
use crate::numeric::spline::NaturalCubicSpline;
use crate::numeric::Rng;

const WARP_ATTEMPTS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfig {
    pub enabled: bool,
    pub jitter_sigma: f64,
    pub scale_lo: f64,
    pub scale_hi: f64,
    pub warp_knots: usize,
    pub warp_sigma: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            jitter_sigma: 0.03,
            scale_lo: 0.9,
            scale_hi: 1.1,
            warp_knots: 4,
            warp_sigma: 0.2,
        }
    }
}

impl AugmentConfig {
    /// All strengths zero: every copy equals its source.
    pub fn identity() -> Self {
        Self {
            enabled: true,
            jitter_sigma: 0.0,
            scale_lo: 1.0,
            scale_hi: 1.0,
            warp_knots: 4,
            warp_sigma: 0.0,
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.jitter_sigma >= 0.0) {
            return Err(Error::config(format!("{path}.jitter_sigma"), "must be >= 0"));
        }
        if !(self.scale_lo <= self.scale_hi) {
            return Err(Error::config(format!("{path}.scale_lo"), "must be <= scale_hi"));
        }
        if self.warp_knots < 2 {
            return Err(Error::config(format!("{path}.warp_knots"), "must be >= 2"));
        }
        if !(self.warp_sigma >= 0.0) {
            return Err(Error::config(format!("{path}.warp_sigma"), "must be >= 0"));
        }
        Ok(())
    }
}

/// `X + N(0, sigma²)` per entry.
pub fn jitter(x: &[f64], rng: &mut Rng, sigma: f64) -> Result<Vec<f64>> {
    x.iter().map(|&v| Ok(v + rng.gaussian(0.0, sigma)?)).collect()
}

/// One factor `u ~ U(lo, hi)` applied to the whole window.
pub fn scale(x: &[f64], rng: &mut Rng, lo: f64, hi: f64) -> Vec<f64> {
    let u = if lo == hi { lo } else { rng.uniform(lo, hi) };
    x.iter().map(|v| v * u).collect()
}

fn check_len(l: usize) -> Result<()> {
    if l < 4 {
        return Err(Error::invalid(format!("warping needs a window of at least 4 steps, got {l}")));
    }
    Ok(())
}

/// Sample a monotone warp `τ` on the grid `1..=L` (1-based positions).
///
/// Interior knots sit at `1 + k(L−1)/(knots+1)`; each is displaced by
/// `N(0, (sigma·L/knots)²)` and a natural spline through the displaced knots
/// and the fixed endpoints is evaluated on the grid, then sorted.
pub fn warp_path(l: usize, rng: &mut Rng, knots: usize, sigma: f64) -> Result<Vec<f64>> {
    check_len(l)?;
    let lf = l as f64;
    let spread = sigma * lf / knots as f64;
    for _ in 0..WARP_ATTEMPTS {
        let mut xs = vec![1.0];
        let mut ys = vec![1.0];
        for k in 1..=knots {
            let anchor = 1.0 + k as f64 * (lf - 1.0) / (knots + 1) as f64;
            xs.push(anchor);
            ys.push(anchor + rng.gaussian(0.0, spread)?);
        }
        xs.push(lf);
        ys.push(lf);
        let spline = NaturalCubicSpline::new(&xs, &ys);
        let mut tau: Vec<f64> = (1..=l).map(|i| spline.eval(i as f64)).collect();
        tau.sort_by(f64::total_cmp);
        let inside = tau.iter().all(|&t| t >= 1.0 - 1e-9 && t <= lf + 1e-9);
        tau[0] = 1.0;
        tau[l - 1] = lf;
        let increasing = tau.windows(2).all(|w| w[1] > w[0]);
        if inside && increasing {
            return Ok(tau);
        }
    }
    Err(Error::invalid(format!(
        "time warp failed to produce a monotone path in {WARP_ATTEMPTS} attempts (sigma {sigma})"
    )))
}

/// Piecewise-linear inverse of the increasing map `tau` at 1-based position `t`,
/// returned as a 0-based fractional index.
fn inverse_at(tau: &[f64], t: f64) -> f64 {
    let j = tau.partition_point(|&v| v <= t).clamp(1, tau.len() - 1);
    let (a, b) = (tau[j - 1], tau[j]);
    (j - 1) as f64 + (t - a) / (b - a)
}

/// Resample every column at `τ⁻¹(t)` by linear interpolation; endpoints stay fixed.
pub fn time_warp(x: &[f64], l: usize, f: usize, rng: &mut Rng, knots: usize, sigma: f64) -> Result<Vec<f64>> {
    let tau = warp_path(l, rng, knots, sigma)?;
    let mut out = vec![0.0; l * f];
    for t in 0..l {
        let s = inverse_at(&tau, (t + 1) as f64).clamp(0.0, (l - 1) as f64);
        let i = (s.floor() as usize).min(l - 2);
        let w = s - i as f64;
        for c in 0..f {
            out[t * f + c] = (1.0 - w) * x[i * f + c] + w * x[(i + 1) * f + c];
        }
    }
    Ok(out)
}

/// Smooth multiplicative curve through knot values `N(1, sigma²)`, clipped to `[0.5, 1.5]`.
pub fn magnitude_curve(l: usize, rng: &mut Rng, knots: usize, sigma: f64) -> Result<Vec<f64>> {
    check_len(l)?;
    let lf = l as f64;
    let xs: Vec<f64> = (0..knots).map(|k| 1.0 + k as f64 * (lf - 1.0) / (knots - 1) as f64).collect();
    let ys: Vec<f64> = (0..knots).map(|_| rng.gaussian(1.0, sigma)).collect::<Result<_>>()?;
    let spline = NaturalCubicSpline::new(&xs, &ys);
    Ok((1..=l).map(|i| spline.eval(i as f64).clamp(0.5, 1.5)).collect())
}

pub fn magnitude_warp(x: &[f64], l: usize, f: usize, rng: &mut Rng, knots: usize, sigma: f64) -> Result<Vec<f64>> {
    let m = magnitude_curve(l, rng, knots, sigma)?;
    Ok((0..l * f).map(|i| x[i] * m[i / f]).collect())
}

/// Original samples plus one jittered, one scaled and one warped copy each
/// (time warp for even sample indices, magnitude warp for odd), in order
/// `[orig, jitter, scale, warp]` per sample. Each sample draws from its own
/// substream of `"augment"`.
pub fn augment_dataset(train: &WindowedDataset, cfg: &AugmentConfig, seed: u64) -> Result<WindowedDataset> {
    if train.partition != Partition::Train {
        return Err(Error::invalid("augmentation is train-only"));
    }
    cfg.validate("augment")?;
    let (l, f) = (train.lookback, train.n_features());
    let mut samples = Vec::with_capacity(4 * train.len());
    for (i, s) in train.samples.iter().enumerate() {
        let mut rng = Rng::substream(seed, "augment", i as u64);
        let copy = |x: Vec<f64>| Sample {
            x,
            y: s.y,
            target_date: s.target_date,
        };
        let jittered = jitter(&s.x, &mut rng, cfg.jitter_sigma)?;
        let scaled = scale(&s.x, &mut rng, cfg.scale_lo, cfg.scale_hi);
        let warped = if i % 2 == 0 {
            time_warp(&s.x, l, f, &mut rng, cfg.warp_knots, cfg.warp_sigma)?
        } else {
            magnitude_warp(&s.x, l, f, &mut rng, cfg.warp_knots, cfg.warp_sigma)?
        };
        samples.push(s.clone());
        samples.push(copy(jittered));
        samples.push(copy(scaled));
        samples.push(copy(warped));
    }
    Ok(WindowedDataset {
        samples,
        ..train.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::{prop_assert, proptest};

    fn window(l: usize, f: usize, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed, "fixture");
        (0..l * f).map(|_| rng.gaussian(0.0, 1.0).unwrap()).collect()
    }

    fn dataset(n: usize, partition: Partition) -> WindowedDataset {
        let d = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        WindowedDataset {
            partition,
            lookback: 8,
            feature_names: vec!["a".into(), "b".into()],
            samples: (0..n)
                .map(|i| Sample {
                    x: window(8, 2, i as u64),
                    y: i as f64,
                    target_date: d + chrono::Days::new(i as u64),
                })
                .collect(),
        }
    }

    #[test]
    fn zero_strength_is_identity() {
        let x = window(12, 3, 1);
        let mut rng = Rng::new(1, "augment");
        assert_eq!(jitter(&x, &mut rng, 0.0).unwrap(), x);
        assert_eq!(scale(&x, &mut rng, 1.0, 1.0), x);
        let tw = time_warp(&x, 12, 3, &mut rng, 4, 0.0).unwrap();
        for (a, b) in tw.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(magnitude_warp(&x, 12, 3, &mut rng, 4, 0.0).unwrap(), x);
    }

    #[test]
    fn scale_is_uniform_factor() {
        let x = window(10, 2, 2);
        let out = scale(&x, &mut Rng::new(0, "t"), 0.9, 0.9);
        for (a, b) in out.iter().zip(&x) {
            assert_eq!(*a, b * 0.9);
        }
        let out = scale(&x, &mut Rng::new(0, "t"), 0.9, 1.1);
        let u = out[0] / x[0];
        assert!((0.9..1.1).contains(&u));
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!((mean(&out) - u * mean(&x)).abs() < 1e-12);
    }

    #[test]
    fn jitter_std_matches_sigma() {
        let x = vec![0.0; 100_000];
        let y = jitter(&x, &mut Rng::new(5, "augment"), 0.03).unwrap();
        let sd = crate::numeric::stats::sample_std(&y);
        assert!((sd / 0.03 - 1.0).abs() < 0.02, "{sd}");
    }

    #[test]
    fn magnitude_curve_mean_is_one() {
        let mut rng = Rng::new(6, "augment");
        let mut sum = 0.0;
        let mut n = 0;
        for _ in 0..2000 {
            for m in magnitude_curve(30, &mut rng, 4, 0.2).unwrap() {
                sum += m;
                n += 1;
            }
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.01);
    }

    #[test]
    fn ramp_stays_in_range_over_many_seeds() {
        let l = 30;
        let x: Vec<f64> = (0..l).map(|i| i as f64).collect();
        for seed in 0..1000 {
            let out = time_warp(&x, l, 1, &mut Rng::new(seed, "augment"), 4, 0.2).unwrap();
            assert!(out.iter().all(|&v| (0.0..=(l - 1) as f64).contains(&v)));
            assert!((out[0] - x[0]).abs() < 1e-9);
            assert!((out[l - 1] - x[l - 1]).abs() < 1e-9);
        }
    }

    #[test]
    fn expansion_and_guard() {
        let ds = dataset(10, Partition::Train);
        let out = augment_dataset(&ds, &AugmentConfig::default(), 42).unwrap();
        assert_eq!(out.len(), 40);
        for (i, s) in out.samples.iter().enumerate() {
            assert_eq!(s.y, ds.samples[i / 4].y);
            assert_eq!(s.x.len(), 16);
        }
        assert_eq!(out, augment_dataset(&ds, &AugmentConfig::default(), 42).unwrap());
        let id = augment_dataset(&ds, &AugmentConfig::identity(), 42).unwrap();
        for (i, s) in id.samples.iter().enumerate() {
            for (a, b) in s.x.iter().zip(&ds.samples[i / 4].x) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let err = augment_dataset(&dataset(3, Partition::Val), &AugmentConfig::default(), 1).unwrap_err();
        assert!(err.to_string().contains("augmentation is train-only"));
    }

    proptest! {
        #[test]
        fn warped_values_lie_between_neighbours(seed in 0u64..5000, l in 4usize..40) {
            let x = window(l, 1, seed);
            let tau = warp_path(l, &mut Rng::new(seed, "augment"), 4, 0.2).unwrap();
            let out = time_warp(&x, l, 1, &mut Rng::new(seed, "augment"), 4, 0.2).unwrap();
            for t in 0..l {
                let s = inverse_at(&tau, (t + 1) as f64).clamp(0.0, (l - 1) as f64);
                let i = (s.floor() as usize).min(l - 2);
                let (lo, hi) = (x[i].min(x[i + 1]), x[i].max(x[i + 1]));
                prop_assert!(out[t] >= lo - 1e-12 && out[t] <= hi + 1e-12);
            }
        }
    }
}
