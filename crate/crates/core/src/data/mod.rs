//! Loading, imputation, scaling, chronological splitting and windowing.

pub mod impute;
pub mod scaler;
pub mod split;
pub mod table;
pub mod window;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{self, Climatology, FeatureMode, FeatureSpec, RankedFeature};

pub use impute::{impute, impute_column};
pub use scaler::{ColumnScale, ScalerParams};
pub use split::{chronological_split, DateRange, Partition, SplitDates, SplitSpec};
pub use table::{load_csv, read_csv, TimeSeriesTable, TARGET};
pub use window::{make_windows, Sample, WindowedDataset};

pub const DATASET_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetConfig {
    pub csv_path: Option<String>,
    pub lookback: i64,
    pub train_frac: f64,
    pub val_frac_of_train: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            csv_path: None,
            lookback: 30,
            train_frac: 0.8,
            val_frac_of_train: 0.2,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self, path: &str) -> Result<()> {
        if self.lookback < 1 {
            return Err(Error::config(format!("{path}.lookback"), format!("must be >= 1, got {}", self.lookback)));
        }
        for (name, f) in [("train_frac", self.train_frac), ("val_frac_of_train", self.val_frac_of_train)] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::config(format!("{path}.{name}"), format!("must lie in (0, 1), got {f}")));
            }
        }
        Ok(())
    }

    pub fn lookback(&self) -> usize {
        self.lookback.max(1) as usize
    }
}

/// One partition's windows, flattened for storage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionData {
    pub n_samples: usize,
    pub target_dates: Vec<NaiveDate>,
    pub y: Vec<f64>,
    /// `[n_samples × lookback × n_features]`, row-major
    pub x: Vec<f64>,
}

/// Raw daily target over the full table, for regime clustering and plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DailySeries {
    pub dates: Vec<NaiveDate>,
    pub tempmax: Vec<f64>,
}

/// The output of the preparation pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreparedDataset {
    pub schema_version: u32,
    pub feature_mode: FeatureMode,
    pub target_name: String,
    pub lookback: usize,
    pub feature_names: Vec<String>,
    pub scaler: ScalerParams,
    pub split: SplitDates,
    pub train: PartitionData,
    pub val: PartitionData,
    pub test: PartitionData,
    pub daily: DailySeries,
}

impl PreparedDataset {
    pub fn partition(&self, p: Partition) -> WindowedDataset {
        let d = match p {
            Partition::Train => &self.train,
            Partition::Val => &self.val,
            Partition::Test => &self.test,
        };
        let stride = self.lookback * self.feature_names.len();
        let samples = (0..d.n_samples)
            .map(|i| Sample {
                x: d.x[i * stride..(i + 1) * stride].to_vec(),
                y: d.y[i],
                target_date: d.target_dates[i],
            })
            .collect();
        WindowedDataset {
            partition: p,
            lookback: self.lookback,
            feature_names: self.feature_names.clone(),
            samples,
        }
    }

    pub fn target_scale(&self) -> Result<ColumnScale> {
        self.scaler.get(&self.target_name)
    }

    /// Shape and length checks after deserialization.
    pub fn check(&self) -> Result<()> {
        if self.schema_version != DATASET_SCHEMA_VERSION {
            return Err(Error::Compat(format!(
                "dataset schema_version {} unsupported (expected {DATASET_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let stride = self.lookback * self.feature_names.len();
        for (name, d) in [("train", &self.train), ("val", &self.val), ("test", &self.test)] {
            if d.y.len() != d.n_samples || d.target_dates.len() != d.n_samples || d.x.len() != d.n_samples * stride {
                return Err(Error::Data(format!("dataset partition `{name}` has inconsistent lengths")));
            }
        }
        for f in self.feature_names.iter().chain([&self.target_name]) {
            self.scaler.get(f)?;
        }
        Ok(())
    }
}

fn flatten(ds: &WindowedDataset) -> PartitionData {
    PartitionData {
        n_samples: ds.len(),
        target_dates: ds.samples.iter().map(|s| s.target_date).collect(),
        y: ds.targets(),
        x: ds.samples.iter().flat_map(|s| s.x.iter().copied()).collect(),
    }
}

/// Everything [`prepare`] produces, including the feature audit.
#[derive(Clone, Debug)]
pub struct Preparation {
    pub dataset: PreparedDataset,
    pub ranking: Vec<RankedFeature>,
    pub split_rows: SplitSpec,
    pub climatology: Climatology,
}

/// load → impute → features → select → scale → split → window.
///
/// The split is computed first so that climatology, selection and scaling
/// see training rows only. The target column is always kept among the
/// selected features (it replaces the lowest-ranked pick when needed) so the
/// persistence reference stays available.
pub fn prepare(raw: &TimeSeriesTable, cfg: &DatasetConfig, spec: &FeatureSpec, mode: FeatureMode) -> Result<Preparation> {
    cfg.validate("dataset")?;
    spec.validate("features")?;
    let lookback = cfg.lookback();
    let table = impute(&table::fill_calendar_gaps(raw.clone()))?;
    let target_name = table.target_name.clone();
    let target = table.column(&target_name)?;
    let split = chronological_split(table.len(), cfg.train_frac, cfg.val_frac_of_train, lookback)?;

    let base: Vec<(String, Vec<f64>)> = table
        .numeric
        .keys()
        .map(|k| Ok((k.clone(), table.column(k)?)))
        .collect::<Result<_>>()?;
    let climatology = Climatology::fit(
        &table.dates,
        base.iter().map(|(k, v)| (k.as_str(), v.as_slice())),
        split.train.clone(),
        spec.climatology_halfwidth,
    );
    let groups = mode.groups(spec);
    let candidates = features::engineer(&table, spec, &groups, &climatology)?;
    let ranking = features::rank_features(&candidates, &target, split.train.clone());
    let mut selected: Vec<String> = ranking.iter().take(spec.top_k).map(|r| r.name.clone()).collect();
    if !selected.contains(&target_name) && candidates.iter().any(|c| c.name == target_name) {
        if selected.len() == spec.top_k {
            selected.pop();
        }
        selected.push(target_name.clone());
    }
    if !selected.contains(&target_name) {
        return Err(Error::Data(format!("target column `{target_name}` is not among the feature candidates")));
    }

    let chosen: Vec<&features::FeatureColumn> = selected
        .iter()
        .map(|n| candidates.iter().find(|c| &c.name == n).expect("selected from candidates"))
        .collect();
    let mut scaler = ScalerParams::fit(chosen.iter().map(|c| (c.name.as_str(), c.values.as_slice())), split.train.clone())?;
    scaler
        .columns
        .insert(target_name.clone(), ColumnScale::fit(&target[split.train.clone()])?);
    let scaled: Vec<Vec<f64>> = chosen
        .iter()
        .map(|c| scaler.apply(&c.name, &c.values))
        .collect::<Result<_>>()?;
    let y = scaler.apply(&target_name, &target)?;

    let window = |p| make_windows(&table.dates, &selected, &scaled, &y, &split, p, lookback);
    let dataset = PreparedDataset {
        schema_version: DATASET_SCHEMA_VERSION,
        feature_mode: mode,
        target_name,
        lookback,
        feature_names: selected.clone(),
        scaler,
        split: split.dates(&table.dates),
        train: flatten(&window(Partition::Train)?),
        val: flatten(&window(Partition::Val)?),
        test: flatten(&window(Partition::Test)?),
        daily: DailySeries {
            dates: table.dates.clone(),
            tempmax: target,
        },
    };
    Ok(Preparation {
        dataset,
        ranking,
        split_rows: split,
        climatology,
    })
}
