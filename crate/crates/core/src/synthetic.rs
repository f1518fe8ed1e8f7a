//! Seeded synthetic daily weather for tests, examples and acceptance runs.
//!
//! `tempmax = mean + amplitude · sin(2π (doy − phase_day) / 365.25) + a_t + spike_t`
//! where `a_t` is AR(1) with coefficient `phi` and innovation std `sigma`,
//! and `spike_t` is `±spike_magnitude` on `spikes` distinct random days.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesTable;
use crate::error::{Error, Result};
use crate::numeric::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Covariates {
    /// Other columns are contemporaneous functions of temperature plus noise.
    Coupled,
    /// Other columns are independent noise.
    Noise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub days: usize,
    pub start: NaiveDate,
    pub mean: f64,
    pub amplitude: f64,
    pub phase_day: f64,
    pub phi: f64,
    pub sigma: f64,
    pub spikes: usize,
    pub spike_magnitude: f64,
    pub covariates: Covariates,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            days: 2000,
            start: NaiveDate::from_ymd_opt(2017, 1, 1).expect("valid date"),
            mean: 30.0,
            amplitude: 15.0,
            phase_day: 105.0,
            phi: 0.7,
            sigma: 1.5,
            spikes: 20,
            spike_magnitude: 8.0,
            covariates: Covariates::Coupled,
        }
    }
}

impl SyntheticConfig {
    /// A near-random-walk target with noise covariates: yesterday's value is
    /// by far the best predictor.
    pub fn persistence_task(days: usize) -> Self {
        Self {
            days,
            amplitude: 0.0,
            phi: 0.98,
            sigma: 1.0,
            spikes: 0,
            covariates: Covariates::Noise,
            ..Default::default()
        }
    }
}

/// Daily table with the target and a handful of numeric covariates.
pub fn synthetic_weather(cfg: &SyntheticConfig, seed: u64) -> Result<TimeSeriesTable> {
    if cfg.days < 2 || cfg.spikes > cfg.days {
        return Err(Error::invalid("synthetic series needs >= 2 days and spikes <= days"));
    }
    let mut rng = Rng::new(seed, "synthetic");
    let n = cfg.days;
    let dates: Vec<NaiveDate> = (0..n).map(|i| cfg.start + chrono::Days::new(i as u64)).collect();
    let season: Vec<f64> = dates
        .iter()
        .map(|d| (2.0 * std::f64::consts::PI * (d.ordinal() as f64 - cfg.phase_day) / 365.25).sin())
        .collect();

    let mut ar = 0.0;
    let mut tmax = Vec::with_capacity(n);
    for s in &season {
        ar = cfg.phi * ar + rng.gaussian(0.0, cfg.sigma)?;
        tmax.push(cfg.mean + cfg.amplitude * s + ar);
    }
    let mut days: Vec<usize> = rng.permutation(n);
    days.truncate(cfg.spikes);
    for d in days {
        let sign = if rng.uniform01() < 0.5 { -1.0 } else { 1.0 };
        tmax[d] += sign * cfg.spike_magnitude;
    }

    let mut table = TimeSeriesTable::new(dates);
    let mut col = |f: &mut dyn FnMut(usize, &mut Rng) -> Result<f64>| -> Result<Vec<f64>> {
        (0..n).map(|i| f(i, &mut rng)).collect()
    };
    match cfg.covariates {
        Covariates::Coupled => {
            let tmin = col(&mut |i, r| Ok(tmax[i] - 12.0 + r.gaussian(0.0, 1.0)?))?;
            let temp: Vec<f64> = tmax.iter().zip(&tmin).map(|(a, b)| 0.5 * (a + b)).collect();
            let humidity = col(&mut |i, r| Ok((45.0 - 1.2 * (temp[i] - cfg.mean) + r.gaussian(0.0, 5.0)?).clamp(3.0, 100.0)))?;
            let feels: Vec<f64> = temp.iter().zip(&humidity).map(|(t, h)| t + 0.02 * h).collect();
            let dew: Vec<f64> = temp.iter().zip(&humidity).map(|(t, h)| t - (100.0 - h) / 5.0).collect();
            let precip = col(&mut |_, r| Ok(if r.uniform01() < 0.08 { r.uniform(0.1, 12.0) } else { 0.0 }))?;
            let pressure = col(&mut |i, r| Ok(1012.0 - 0.35 * (temp[i] - cfg.mean) + r.gaussian(0.0, 2.0)?))?;
            let wind = col(&mut |_, r| Ok(r.gaussian(12.0, 4.0)?.abs()))?;
            let cloud = col(&mut |i, r| Ok((20.0 - 0.5 * cfg.amplitude * season[i] + r.gaussian(0.0, 10.0)?).clamp(0.0, 100.0)))?;
            let solar = col(&mut |i, r| Ok(220.0 + 90.0 * season[i] - cloud[i] + r.gaussian(0.0, 10.0)?))?;
            table.insert("tempmin", tmin);
            table.insert("temp", temp);
            table.insert("feelslike", feels);
            table.insert("humidity", humidity);
            table.insert("dew", dew);
            table.insert("precip", precip);
            table.insert("sealevelpressure", pressure);
            table.insert("windspeed", wind);
            table.insert("cloudcover", cloud);
            table.insert("solarradiation", solar);
        }
        Covariates::Noise => {
            for name in ["humidity", "windspeed", "sealevelpressure"] {
                let v = col(&mut |_, r| r.gaussian(0.0, 1.0))?;
                table.insert(name, v);
            }
        }
    }
    table.insert("tempmax", tmax);
    Ok(table)
}

/// Write a table as a daily-weather CSV (`datetime` first, then numeric columns).
pub fn write_csv(table: &TimeSeriesTable, w: impl std::io::Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let names: Vec<&String> = table.numeric.keys().collect();
    let mut header = vec!["datetime".to_string()];
    header.extend(names.iter().map(|s| s.to_string()));
    wtr.write_record(&header)?;
    for (i, d) in table.dates.iter().enumerate() {
        let mut rec = vec![d.format("%Y-%m-%d").to_string()];
        for n in &names {
            rec.push(table.numeric[*n][i].map(|v| v.to_string()).unwrap_or_default());
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("csv", e))?;
    Ok(())
}
