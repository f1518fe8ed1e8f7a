use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::numeric::stats::{mean, quantile, sample_std};

pub const MAX_LAG: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcfLag {
    pub lag: usize,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualDiagnostics {
    pub n: usize,
    pub acf: Vec<AcfLag>,
    /// ±1.96/√n
    pub band: f64,
    pub histogram: Histogram,
    /// (theoretical, empirical) quantiles of the standardized residuals
    pub qq: Vec<(f64, f64)>,
    /// (predicted, residual)
    pub vs_predicted: Vec<(f64, f64)>,
}

impl ResidualDiagnostics {
    pub fn acf_inside_band(&self) -> usize {
        self.acf.iter().filter(|a| a.r.abs() <= self.band).count()
    }
}

/// Sample autocorrelation `r_k = Σ (e_t − ē)(e_{t+k} − ē) / Σ (e_t − ē)²`.
pub fn acf(e: &[f64], max_lag: usize) -> Vec<AcfLag> {
    let m = mean(e);
    let d: Vec<f64> = e.iter().map(|v| v - m).collect();
    let denom: f64 = d.iter().map(|v| v * v).sum();
    (1..=max_lag.min(e.len().saturating_sub(1)))
        .map(|k| {
            let num: f64 = d.iter().zip(&d[k..]).map(|(a, b)| a * b).sum();
            AcfLag {
                lag: k,
                r: if denom == 0.0 { 0.0 } else { num / denom },
            }
        })
        .collect()
}

/// Freedman–Diaconis bins: width `2·IQR·n^(−1/3)`; one bin when that is zero.
pub fn histogram(e: &[f64]) -> Histogram {
    let lo = e.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let iqr = quantile(e, 0.75).unwrap_or(0.0) - quantile(e, 0.25).unwrap_or(0.0);
    let width = 2.0 * iqr / (e.len() as f64).cbrt();
    let bins = if width > 0.0 && hi > lo {
        (((hi - lo) / width).ceil() as usize).clamp(1, 1000)
    } else {
        1
    };
    let step = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges: Vec<f64> = (0..=bins).map(|i| if i == bins { lo + step * bins as f64 } else { lo + step * i as f64 }).collect();
    let mut counts = vec![0; bins];
    for &v in e {
        let i = (((v - lo) / step).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    Histogram { edges, counts }
}

/// Standardized sorted residuals against N(0, 1) quantiles at `(i − 0.5)/n`.
pub fn qq_pairs(e: &[f64]) -> Vec<(f64, f64)> {
    let n = e.len();
    let (m, s) = (mean(e), sample_std(e));
    let mut z: Vec<f64> = e.iter().map(|v| if s > 0.0 { (v - m) / s } else { 0.0 }).collect();
    z.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    z.into_iter()
        .enumerate()
        .map(|(i, v)| (normal.inverse_cdf((i as f64 + 0.5) / n as f64), v))
        .collect()
}

pub fn residual_diagnostics(residuals: &[f64], predicted: &[f64]) -> Result<ResidualDiagnostics> {
    let n = residuals.len();
    if n < 30 {
        return Err(Error::Data(format!("residual diagnostics need at least 30 residuals, got {n}")));
    }
    if predicted.len() != n {
        return Err(Error::Shape(format!("{n} residuals for {} predictions", predicted.len())));
    }
    Ok(ResidualDiagnostics {
        n,
        acf: acf(residuals, MAX_LAG),
        band: 1.96 / (n as f64).sqrt(),
        histogram: histogram(residuals),
        qq: qq_pairs(residuals),
        vs_predicted: predicted.iter().copied().zip(residuals.iter().copied()).collect(),
    })
}
