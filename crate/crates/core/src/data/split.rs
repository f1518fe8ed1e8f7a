use std::ops::Range;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    Train,
    Val,
    Test,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::Train, Partition::Val, Partition::Test];

    pub fn name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Val => "val",
            Partition::Test => "test",
        }
    }
}

/// Row ranges of the three chronological partitions.
///
/// Layout over the table: `[val | train | test]`. Validation is the *first*
/// part of the training period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub val: Range<usize>,
    pub train: Range<usize>,
    pub test: Range<usize>,
}

impl SplitSpec {
    pub fn range(&self, p: Partition) -> Range<usize> {
        match p {
            Partition::Train => self.train.clone(),
            Partition::Val => self.val.clone(),
            Partition::Test => self.test.clone(),
        }
    }

    pub fn partition_of(&self, row: usize) -> Option<Partition> {
        Partition::ALL.into_iter().find(|&p| self.range(p).contains(&row))
    }

    pub fn dates(&self, dates: &[NaiveDate]) -> SplitDates {
        let span = |r: &Range<usize>| DateRange {
            start: dates[r.start],
            end: dates[r.end - 1],
        };
        SplitDates {
            train: span(&self.train),
            val: span(&self.val),
            test: span(&self.test),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub start: NaiveDate,
    /// inclusive
    pub end: NaiveDate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitDates {
    pub train: DateRange,
    pub val: DateRange,
    pub test: DateRange,
}

fn floor_frac(frac: f64, n: usize) -> usize {
    (frac * n as f64 + 1e-9).floor() as usize
}

/// Last `1 − train_frac` of rows → test; the first `val_frac_of_train` of the
/// remaining training period → validation; the rest → train.
pub fn chronological_split(n_rows: usize, train_frac: f64, val_frac_of_train: f64, lookback: usize) -> Result<SplitSpec> {
    for (name, f) in [("train_frac", train_frac), ("val_frac_of_train", val_frac_of_train)] {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::config(format!("dataset.{name}"), format!("must lie in (0, 1), got {f}")));
        }
    }
    let period = floor_frac(train_frac, n_rows);
    let n_val = floor_frac(val_frac_of_train, period);
    let spec = SplitSpec {
        val: 0..n_val,
        train: n_val..period,
        test: period..n_rows,
    };
    for p in Partition::ALL {
        let len = spec.range(p).len();
        if len < lookback + 1 {
            return Err(Error::Data(format!(
                "{} partition has {len} rows, need at least lookback + 1 = {}",
                p.name(),
                lookback + 1
            )));
        }
    }
    Ok(spec)
}
