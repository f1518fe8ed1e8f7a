//! Trailing (right-aligned) window statistics and simple derived series.

use crate::numeric::stats::{mean, sample_std};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RollingStat {
    Mean,
    Min,
    Max,
    Std,
}

impl RollingStat {
    pub const ALL: [RollingStat; 4] = [RollingStat::Mean, RollingStat::Min, RollingStat::Max, RollingStat::Std];

    pub fn name(self) -> &'static str {
        match self {
            RollingStat::Mean => "mean",
            RollingStat::Min => "min",
            RollingStat::Max => "max",
            RollingStat::Std => "std",
        }
    }
}

/// Statistic over `x[t−window+1 ..= t]`, using whatever prefix exists near the start.
pub fn rolling(x: &[f64], window: usize, stat: RollingStat) -> Vec<f64> {
    let window = window.max(1);
    (0..x.len())
        .map(|t| {
            let w = &x[(t + 1).saturating_sub(window)..=t];
            match stat {
                RollingStat::Mean => mean(w),
                RollingStat::Min => w.iter().cloned().fold(f64::INFINITY, f64::min),
                RollingStat::Max => w.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                RollingStat::Std => sample_std(w),
            }
        })
        .collect()
}

/// `Δx_t = x_t − x_{t−1}`, with `Δx_0 = 0`.
pub fn first_diff(x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|t| if t == 0 { 0.0 } else { x[t] - x[t - 1] }).collect()
}

/// `(temp_range, 7-day volatility, 30-day volatility)`.
pub fn temp_range_and_volatility(tempmax: &[f64], tempmin: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let range: Vec<f64> = tempmax.iter().zip(tempmin).map(|(a, b)| a - b).collect();
    let v7 = rolling(&range, 7, RollingStat::Std);
    let v30 = rolling(&range, 30, RollingStat::Std);
    (range, v7, v30)
}

/// Coefficients of the interaction indices.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InteractionCoefficients {
    /// heat_index_proxy = temp + humidity_weight · humidity
    pub humidity_weight: f64,
    /// drought_index = tempmax − precip_penalty · precip
    pub precip_penalty: f64,
}

impl Default for InteractionCoefficients {
    fn default() -> Self {
        Self {
            humidity_weight: 0.1,
            precip_penalty: 2.0,
        }
    }
}

/// `(heat_index_proxy, drought_index, drought_index_30d)`.
pub fn interaction_indices(
    temp: &[f64],
    humidity: &[f64],
    tempmax: &[f64],
    precip: &[f64],
    coef: &InteractionCoefficients,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let heat = temp.iter().zip(humidity).map(|(t, h)| t + coef.humidity_weight * h).collect();
    let drought: Vec<f64> = tempmax.iter().zip(precip).map(|(t, p)| t - coef.precip_penalty * p).collect();
    let d30 = rolling(&drought, 30, RollingStat::Mean);
    (heat, drought, d30)
}
