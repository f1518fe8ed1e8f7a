//! Causal feature engineering and correlation-based selection.

pub mod calendar;
pub mod climatology;
pub mod rolling;
pub mod savgol;

use std::collections::BTreeSet;
use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesTable;
use crate::error::{Error, Result};
use crate::numeric::stats::pearson;

pub use calendar::{calendar_features, cyclical_features};
pub use climatology::Climatology;
pub use rolling::{first_diff, interaction_indices, rolling, temp_range_and_volatility, InteractionCoefficients, RollingStat};
pub use savgol::savitzky_golay;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Raw,
    Calendar,
    Cyclical,
    Range,
    Rolling,
    Smoothing,
    Anomaly,
    Interaction,
    Diff,
}

impl FeatureGroup {
    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Raw => "raw",
            FeatureGroup::Calendar => "calendar",
            FeatureGroup::Cyclical => "cyclical",
            FeatureGroup::Range => "range",
            FeatureGroup::Rolling => "rolling",
            FeatureGroup::Smoothing => "smoothing",
            FeatureGroup::Anomaly => "anomaly",
            FeatureGroup::Interaction => "interaction",
            FeatureGroup::Diff => "diff",
        }
    }
}

/// Which candidate groups a run may draw from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    #[default]
    Full,
    /// raw variables plus cyclical encodings
    Minimal,
    RawOnly,
}

impl FeatureMode {
    pub fn groups(self, spec: &FeatureSpec) -> BTreeSet<FeatureGroup> {
        match self {
            FeatureMode::Full => {
                let mut g = spec.enabled_groups.clone();
                g.insert(FeatureGroup::Raw);
                g
            }
            FeatureMode::Minimal => [FeatureGroup::Raw, FeatureGroup::Cyclical].into(),
            FeatureMode::RawOnly => [FeatureGroup::Raw].into(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Full => "full",
            FeatureMode::Minimal => "minimal",
            FeatureMode::RawOnly => "raw_only",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureSpec {
    pub rolling_windows: Vec<usize>,
    pub sg_window: usize,
    pub sg_poly: usize,
    pub zscore_flag_threshold: f64,
    pub top_k: usize,
    pub enabled_groups: BTreeSet<FeatureGroup>,
    /// Series that get rolling statistics and smoothing.
    pub key_series: Vec<String>,
    /// Series that get first differences.
    pub diff_series: Vec<String>,
    pub interactions: InteractionCoefficients,
    /// Day-of-year pooling half-width for climatological normals.
    pub climatology_halfwidth: u32,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self {
            rolling_windows: vec![7, 30],
            sg_window: 7,
            sg_poly: 3,
            zscore_flag_threshold: 2.0,
            top_k: 30,
            enabled_groups: [
                FeatureGroup::Calendar,
                FeatureGroup::Cyclical,
                FeatureGroup::Range,
                FeatureGroup::Rolling,
                FeatureGroup::Smoothing,
                FeatureGroup::Anomaly,
                FeatureGroup::Interaction,
                FeatureGroup::Diff,
            ]
            .into(),
            key_series: ["tempmax", "tempmin", "temp", "feelslike"].map(String::from).to_vec(),
            diff_series: ["tempmax", "tempmin", "temp", "feelslike", "sealevelpressure", "humidity", "dew"]
                .map(String::from)
                .to_vec(),
            interactions: InteractionCoefficients::default(),
            climatology_halfwidth: 7,
        }
    }
}

impl FeatureSpec {
    pub fn validate(&self, path: &str) -> Result<()> {
        if self.sg_window % 2 == 0 || self.sg_window <= self.sg_poly {
            return Err(Error::config(format!("{path}.sg_window"), "must be odd and larger than sg_poly"));
        }
        if self.top_k < 1 {
            return Err(Error::config(format!("{path}.top_k"), "must be >= 1"));
        }
        if self.rolling_windows.iter().any(|&w| w < 2) {
            return Err(Error::config(format!("{path}.rolling_windows"), "windows must be >= 2"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureColumn {
    pub name: String,
    pub group: FeatureGroup,
    pub values: Vec<f64>,
}

/// Compute every candidate feature for the enabled `groups`.
///
/// All derived columns at row `t` depend only on rows `<= t` (the climatology
/// is fitted separately and passed in).
pub fn engineer(
    table: &TimeSeriesTable,
    spec: &FeatureSpec,
    groups: &BTreeSet<FeatureGroup>,
    climatology: &Climatology,
) -> Result<Vec<FeatureColumn>> {
    let mut out = Vec::new();
    let mut push = |name: String, group: FeatureGroup, values: Vec<f64>| {
        out.push(FeatureColumn { name, group, values });
    };
    let on = |g: FeatureGroup| groups.contains(&g);
    let present = |n: &str| table.has(n);

    if on(FeatureGroup::Raw) {
        for name in table.numeric.keys() {
            push(name.clone(), FeatureGroup::Raw, table.column(name)?);
        }
    }
    if on(FeatureGroup::Calendar) {
        for (n, v) in calendar_features(&table.dates) {
            push(n.to_string(), FeatureGroup::Calendar, v);
        }
    }
    if on(FeatureGroup::Cyclical) {
        for (n, v) in cyclical_features(&table.dates) {
            push(n.to_string(), FeatureGroup::Cyclical, v);
        }
    }
    if on(FeatureGroup::Range) && present("tempmax") && present("tempmin") {
        let (r, v7, v30) = temp_range_and_volatility(&table.column("tempmax")?, &table.column("tempmin")?);
        push("temp_range".into(), FeatureGroup::Range, r);
        push("temp_range_vol_7".into(), FeatureGroup::Range, v7);
        push("temp_range_vol_30".into(), FeatureGroup::Range, v30);
    }
    for key in spec.key_series.iter().filter(|k| present(k)) {
        let x = table.column(key)?;
        if on(FeatureGroup::Rolling) {
            for &w in &spec.rolling_windows {
                for stat in RollingStat::ALL {
                    push(format!("{key}_{w}d_{}", stat.name()), FeatureGroup::Rolling, rolling(&x, w, stat));
                }
            }
        }
        if on(FeatureGroup::Smoothing) {
            push(format!("{key}_smooth"), FeatureGroup::Smoothing, savitzky_golay(&x, spec.sg_window, spec.sg_poly)?);
        }
    }
    if on(FeatureGroup::Anomaly) {
        for name in table.numeric.keys() {
            let x = table.column(name)?;
            if let Some((a, z, f)) = climatology.anomaly(name, &table.dates, &x, spec.zscore_flag_threshold) {
                push(format!("{name}_anom"), FeatureGroup::Anomaly, a);
                push(format!("{name}_zscore"), FeatureGroup::Anomaly, z);
                push(format!("{name}_extreme_flag"), FeatureGroup::Anomaly, f);
            }
        }
    }
    if on(FeatureGroup::Interaction) && ["temp", "humidity", "tempmax", "precip"].iter().all(|n| present(n)) {
        let (h, d, d30) = interaction_indices(
            &table.column("temp")?,
            &table.column("humidity")?,
            &table.column("tempmax")?,
            &table.column("precip")?,
            &spec.interactions,
        );
        push("heat_index_proxy".into(), FeatureGroup::Interaction, h);
        push("drought_index".into(), FeatureGroup::Interaction, d);
        push("drought_index_30d".into(), FeatureGroup::Interaction, d30);
    }
    if on(FeatureGroup::Diff) {
        for key in spec.diff_series.iter().filter(|k| present(k)) {
            push(format!("{key}_diff"), FeatureGroup::Diff, first_diff(&table.column(key)?));
        }
    }
    Ok(out)
}

/// Correlation of one candidate with the next-day target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedFeature {
    pub name: String,
    pub group: FeatureGroup,
    /// Pearson r of feature(t) vs target(t+1) over training rows; 0 for constants.
    pub correlation: f64,
}

/// Rank candidates by |r| between feature(t) and target(t+1) over `rows`
/// (pairs with both `t` and `t+1` inside `rows`). Ties break on name;
/// zero-variance features get r = 0.
pub fn rank_features(candidates: &[FeatureColumn], target: &[f64], rows: Range<usize>) -> Vec<RankedFeature> {
    let t_next: Vec<f64> = (rows.start..rows.end.saturating_sub(1)).map(|t| target[t + 1]).collect();
    let mut ranked: Vec<RankedFeature> = candidates
        .iter()
        .map(|c| {
            let x: Vec<f64> = (rows.start..rows.end.saturating_sub(1)).map(|t| c.values[t]).collect();
            RankedFeature {
                name: c.name.clone(),
                group: c.group,
                correlation: pearson(&x, &t_next).unwrap_or(0.0),
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.correlation
            .abs()
            .total_cmp(&a.correlation.abs())
            .then_with(|| a.name.cmp(&b.name))
    });
    ranked
}

/// The top `min(k, available)` names from [`rank_features`].
pub fn select_topk(candidates: &[FeatureColumn], target: &[f64], rows: Range<usize>, k: usize) -> Vec<String> {
    rank_features(candidates, target, rows)
        .into_iter()
        .take(k)
        .map(|r| r.name)
        .collect()
}

/// Feature-audit CSV: `name,group,correlation,selected`.
pub fn write_audit(w: impl Write, ranked: &[RankedFeature], selected: &[String]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Necessary).from_writer(w);
    wtr.write_record(["name", "group", "correlation", "selected"])?;
    for r in ranked {
        let sel = selected.contains(&r.name);
        wtr.write_record([r.name.as_str(), r.group.name(), &r.correlation.to_string(), if sel { "1" } else { "0" }])?;
    }
    wtr.flush().map_err(|e| Error::io("feature audit", e))?;
    Ok(())
}
