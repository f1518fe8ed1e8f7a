use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::split::{Partition, SplitSpec};
use crate::error::{Error, Result};

/// One supervised example: `lookback` rows of features ending the day before `target_date`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// `[lookback × n_features]`, row-major
    pub x: Vec<f64>,
    /// scaled target at `target_date`
    pub y: f64,
    pub target_date: NaiveDate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowedDataset {
    pub partition: Partition,
    pub lookback: usize,
    pub feature_names: Vec<String>,
    pub samples: Vec<Sample>,
}

impl WindowedDataset {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.y).collect()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Samples restricted to `idx` (keeps partition metadata).
    pub fn select(&self, idx: impl IntoIterator<Item = usize>) -> Self {
        Self {
            partition: self.partition,
            lookback: self.lookback,
            feature_names: self.feature_names.clone(),
            samples: idx.into_iter().map(|i| self.samples[i].clone()).collect(),
        }
    }

    /// Keep only feature columns `cols` (in the given order).
    pub fn project(&self, cols: &[usize]) -> Self {
        let f = self.n_features();
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                x: (0..self.lookback)
                    .flat_map(|t| cols.iter().map(move |&c| s.x[t * f + c]))
                    .collect(),
                y: s.y,
                target_date: s.target_date,
            })
            .collect();
        Self {
            partition: self.partition,
            lookback: self.lookback,
            feature_names: cols.iter().map(|&c| self.feature_names[c].clone()).collect(),
            samples,
        }
    }
}

/// Slide windows over each partition. `columns[f][row]` are scaled features,
/// `target[row]` the scaled target; a sample targeting row `d` uses rows
/// `d − lookback .. d`, all inside the same partition.
pub fn make_windows(
    dates: &[NaiveDate],
    feature_names: &[String],
    columns: &[Vec<f64>],
    target: &[f64],
    split: &SplitSpec,
    partition: Partition,
    lookback: usize,
) -> Result<WindowedDataset> {
    if lookback == 0 {
        return Err(Error::invalid("lookback must be >= 1"));
    }
    let range = split.range(partition);
    if lookback >= range.len() {
        return Err(Error::Data(format!(
            "{} partition of {} rows is too short for lookback {lookback}",
            partition.name(),
            range.len()
        )));
    }
    let f = columns.len();
    let mut samples = Vec::with_capacity(range.len() - lookback);
    for d in range.start + lookback..range.end {
        let mut x = Vec::with_capacity(lookback * f);
        for row in d - lookback..d {
            x.extend(columns.iter().map(|c| c[row]));
        }
        samples.push(Sample {
            x,
            y: target[d],
            target_date: dates[d],
        });
    }
    Ok(WindowedDataset {
        partition,
        lookback,
        feature_names: feature_names.to_vec(),
        samples,
    })
}
