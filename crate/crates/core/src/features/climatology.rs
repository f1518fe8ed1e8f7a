use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::numeric::stats::{mean, sample_std};

pub const STD_FLOOR: f64 = 1e-8;

/// Day-of-year normals of one column: `mean[doy − 1]`, `std[doy − 1]`, doy in 1..=366.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnNormals {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Climatology {
    pub columns: BTreeMap<String, ColumnNormals>,
}

fn circular_doy_distance(a: u32, b: u32) -> u32 {
    let d = a.abs_diff(b);
    d.min(366 - d)
}

impl Climatology {
    /// Fit normals from `rows` only. Each day-of-year pools observations whose
    /// day-of-year lies within `halfwidth` days (circularly); `halfwidth = 0`
    /// gives strict per-day buckets. Day 366 borrows day 365 when unobserved.
    pub fn fit<'a>(
        dates: &[NaiveDate],
        columns: impl IntoIterator<Item = (&'a str, &'a [f64])>,
        rows: std::ops::Range<usize>,
        halfwidth: u32,
    ) -> Self {
        let doys: Vec<u32> = dates.iter().map(|d| d.ordinal()).collect();
        let mut out = BTreeMap::new();
        for (name, values) in columns {
            let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); 366];
            for r in rows.clone() {
                buckets[doys[r] as usize - 1].push(values[r]);
            }
            let mut m = vec![f64::NAN; 366];
            let mut s = vec![f64::NAN; 366];
            for doy in 1..=366u32 {
                let pooled: Vec<f64> = if halfwidth == 0 {
                    buckets[doy as usize - 1].clone()
                } else {
                    (1..=366u32)
                        .filter(|&o| circular_doy_distance(doy, o) <= halfwidth)
                        .flat_map(|o| buckets[o as usize - 1].iter().copied())
                        .collect()
                };
                if !pooled.is_empty() {
                    m[doy as usize - 1] = mean(&pooled);
                    s[doy as usize - 1] = sample_std(&pooled).max(STD_FLOOR);
                }
            }
            if m[365].is_nan() {
                m[365] = m[364];
                s[365] = s[364];
            }
            // days never observed fall back to the overall training mean/std
            let all: Vec<f64> = rows.clone().map(|r| values[r]).collect();
            let (gm, gs) = (mean(&all), sample_std(&all).max(STD_FLOOR));
            for i in 0..366 {
                if m[i].is_nan() {
                    m[i] = gm;
                    s[i] = gs;
                }
            }
            out.insert(name.to_string(), ColumnNormals { mean: m, std: s });
        }
        Self { columns: out }
    }

    /// `(anom, zscore, extreme_flag)` for one column; `None` if the column was not fitted.
    pub fn anomaly(&self, name: &str, dates: &[NaiveDate], values: &[f64], threshold: f64) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let n = self.columns.get(name)?;
        let mut anom = Vec::with_capacity(values.len());
        let mut z = Vec::with_capacity(values.len());
        let mut flag = Vec::with_capacity(values.len());
        for (d, &v) in dates.iter().zip(values) {
            let i = d.ordinal() as usize - 1;
            let a = v - n.mean[i];
            let zz = a / n.std[i].max(STD_FLOOR);
            anom.push(a);
            z.push(zz);
            flag.push(if zz.abs() > threshold { 1.0 } else { 0.0 });
        }
        Some((anom, z, flag))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rng;

    fn dates(n: usize) -> Vec<NaiveDate> {
        let d0 = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
        (0..n).map(|i| d0 + chrono::Days::new(i as u64)).collect()
    }

    #[test]
    fn value_at_normal_and_three_sigma() {
        let d = dates(366 * 3);
        let mut rng = Rng::new(8, "clim");
        let x: Vec<f64> = (0..d.len()).map(|_| rng.gaussian(20.0, 3.0).unwrap()).collect();
        let c = Climatology::fit(&d, [("t", x.as_slice())], 0..d.len(), 0);
        let n = &c.columns["t"];
        let i = d[10].ordinal() as usize - 1;
        let (a, z, f) = c.anomaly("t", &d[10..11], &[n.mean[i]], 2.0).unwrap();
        assert_eq!((a[0], z[0], f[0]), (0.0, 0.0, 0.0));
        let (_, z, f) = c.anomaly("t", &d[10..11], &[n.mean[i] + 3.0 * n.std[i]], 2.0).unwrap();
        assert!((z[0] - 3.0).abs() < 1e-12);
        assert_eq!(f[0], 1.0);
    }

    #[test]
    fn training_zscores_center_per_bucket() {
        let d = dates(365 * 4);
        let mut rng = Rng::new(9, "clim");
        let x: Vec<f64> = (0..d.len())
            .map(|i| 10.0 * (i as f64 / 58.0).sin() + rng.gaussian(0.0, 1.0).unwrap())
            .collect();
        let train = 0..d.len();
        let c = Climatology::fit(&d, [("t", x.as_slice())], train.clone(), 0);
        let (_, z, _) = c.anomaly("t", &d, &x, 2.0).unwrap();
        // independent oracle: recompute the per-doy means of z directly
        let mut sums: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
        for i in train {
            let e = sums.entry(d[i].ordinal()).or_insert((0.0, 0));
            e.0 += z[i];
            e.1 += 1;
        }
        for (_, (s, n)) in sums {
            assert!((s / n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn leap_day_falls_back() {
        // 2019 is not a leap year: doy 366 unobserved
        let d = dates(365);
        let x: Vec<f64> = (0..365).map(|i| i as f64).collect();
        let c = Climatology::fit(&d, [("t", x.as_slice())], 0..365, 0);
        let n = &c.columns["t"];
        assert_eq!(n.mean[365], n.mean[364]);
        assert_eq!(n.std[365], STD_FLOOR);
    }
}
