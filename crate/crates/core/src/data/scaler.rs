use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::stats::quantile_sorted;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub median: f64,
    pub iqr: f64,
}

impl ColumnScale {
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("cannot fit scaler on an empty range".into()));
        }
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        Ok(Self {
            median: quantile_sorted(&s, 0.5),
            iqr: quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25),
        })
    }

    /// IQR, or 1 for constant columns.
    pub fn divisor(&self) -> f64 {
        if self.iqr == 0.0 {
            1.0
        } else {
            self.iqr
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.median) / self.divisor()
    }

    pub fn invert(&self, z: f64) -> f64 {
        z * self.divisor() + self.median
    }
}

/// Median/IQR robust scaler, one entry per column.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: BTreeMap<String, ColumnScale>,
}

impl ScalerParams {
    /// Fit each column on rows `train` only.
    pub fn fit<'a>(
        columns: impl IntoIterator<Item = (&'a str, &'a [f64])>,
        train: std::ops::Range<usize>,
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Data("scaler training range is empty".into()));
        }
        let mut out = BTreeMap::new();
        for (name, values) in columns {
            out.insert(name.to_string(), ColumnScale::fit(&values[train.clone()])?);
        }
        Ok(Self { columns: out })
    }

    pub fn get(&self, name: &str) -> Result<ColumnScale> {
        self.columns
            .get(name)
            .copied()
            .ok_or_else(|| Error::Data(format!("no scaler for column `{name}`")))
    }

    pub fn apply(&self, name: &str, values: &[f64]) -> Result<Vec<f64>> {
        let s = self.get(name)?;
        Ok(values.iter().map(|&v| s.apply(v)).collect())
    }

    pub fn invert(&self, name: &str, values: &[f64]) -> Result<Vec<f64>> {
        let s = self.get(name)?;
        Ok(values.iter().map(|&v| s.invert(v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rng;

    #[test]
    fn ramp_is_scaled_by_median_and_iqr() {
        let s = ColumnScale::fit(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!((s.median, s.iqr), (3.0, 2.0));
        let out: Vec<f64> = [1.0, 2.0, 3.0, 4.0, 5.0].iter().map(|&v| s.apply(v)).collect();
        assert_eq!(out, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn constant_column_centers_only() {
        let s = ColumnScale::fit(&[7.0, 7.0, 7.0]).unwrap();
        assert_eq!(s.divisor(), 1.0);
        assert_eq!(s.apply(7.0), 0.0);
    }

    #[test]
    fn round_trip() {
        let mut rng = Rng::new(1, "scaler");
        let xs: Vec<f64> = (0..500).map(|_| rng.uniform(-40.0, 60.0)).collect();
        let s = ColumnScale::fit(&xs).unwrap();
        for x in xs {
            assert!((s.invert(s.apply(x)) - x).abs() <= 1e-12);
        }
    }

    #[test]
    fn fit_uses_training_rows_only() {
        let mut rng = Rng::new(2, "scaler");
        let mut xs: Vec<f64> = (0..100).map(|_| rng.uniform(0.0, 1.0)).collect();
        // shifted tail that must not leak into the fit
        xs.extend((0..50).map(|_| rng.uniform(50.0, 60.0)));
        let train_only = ScalerParams::fit([("x", xs.as_slice())], 0..100).unwrap();
        let leaky = ScalerParams::fit([("x", xs.as_slice())], 0..150).unwrap();
        assert_ne!(train_only, leaky);
        assert_eq!(train_only.columns["x"], ColumnScale::fit(&xs[..100]).unwrap());
        assert!(ScalerParams::fit([("x", xs.as_slice())], 0..0).is_err());
    }
}
