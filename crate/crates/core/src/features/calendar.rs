use std::f64::consts::PI;

use chrono::{Datelike, NaiveDate};

/// Integer calendar fields and cyclical encodings for each date.
///
/// Returns `(name, values)` pairs: year, month, quarter, week_of_year (ISO),
/// day_of_year, day_of_week (Monday = 1), month_sin/cos (period 12) and
/// doy_sin/cos (period 365.25).
pub fn calendar_features(dates: &[NaiveDate]) -> Vec<(&'static str, Vec<f64>)> {
    let f = |g: &dyn Fn(&NaiveDate) -> f64| dates.iter().map(g).collect::<Vec<f64>>();
    vec![
        ("year", f(&|d| d.year() as f64)),
        ("month", f(&|d| d.month() as f64)),
        ("quarter", f(&|d| ((d.month() - 1) / 3 + 1) as f64)),
        ("week_of_year", f(&|d| d.iso_week().week() as f64)),
        ("day_of_year", f(&|d| d.ordinal() as f64)),
        ("day_of_week", f(&|d| d.weekday().number_from_monday() as f64)),
    ]
}

pub fn cyclical_features(dates: &[NaiveDate]) -> Vec<(&'static str, Vec<f64>)> {
    let month = |d: &NaiveDate| 2.0 * PI * d.month() as f64 / 12.0;
    let doy = |d: &NaiveDate| 2.0 * PI * d.ordinal() as f64 / 365.25;
    vec![
        ("month_sin", dates.iter().map(|d| month(d).sin()).collect()),
        ("month_cos", dates.iter().map(|d| month(d).cos()).collect()),
        ("doy_sin", dates.iter().map(|d| doy(d).sin()).collect()),
        ("doy_cos", dates.iter().map(|d| doy(d).cos()).collect()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get<'a>(cols: &'a [(&str, Vec<f64>)], name: &str) -> &'a [f64] {
        &cols.iter().find(|(n, _)| *n == name).unwrap().1
    }

    #[test]
    fn month_encodings() {
        let d = [NaiveDate::from_ymd_opt(2020, 12, 5).unwrap(), NaiveDate::from_ymd_opt(2020, 3, 5).unwrap()];
        let c = cyclical_features(&d);
        assert!(get(&c, "month_sin")[0].abs() < 1e-12);
        assert!((get(&c, "month_cos")[0] - 1.0).abs() < 1e-12);
        assert!((get(&c, "month_sin")[1] - 1.0).abs() < 1e-12);
        assert!(get(&c, "month_cos")[1].abs() < 1e-12);
    }

    #[test]
    fn unit_circle_and_fields() {
        let d0 = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
        let dates: Vec<NaiveDate> = (0..800).map(|i| d0 + chrono::Days::new(i)).collect();
        let c = cyclical_features(&dates);
        for i in 0..dates.len() {
            let (s, k) = (get(&c, "doy_sin")[i], get(&c, "doy_cos")[i]);
            assert!((s * s + k * k - 1.0).abs() < 1e-12);
            let (s, k) = (get(&c, "month_sin")[i], get(&c, "month_cos")[i]);
            assert!((s * s + k * k - 1.0).abs() < 1e-12);
        }
        let cal = calendar_features(&dates);
        assert_eq!(get(&cal, "year")[0], 2019.0);
        assert_eq!(get(&cal, "quarter")[100], 2.0);
        assert_eq!(get(&cal, "day_of_week")[0], 2.0); // 2019-01-01 was a Tuesday
        assert_eq!(get(&cal, "day_of_year")[365], 1.0);
    }
}
