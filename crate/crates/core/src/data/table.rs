use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Columns that are always read as text and never used as numeric features.
pub const TEXT_COLUMNS: &[&str] = &[
    "preciptype",
    "precipctype",
    "sunrise",
    "sunset",
    "conditions",
    "description",
    "icon",
    "name",
    "address",
    "resolvedaddress",
    "stations",
    "source",
];

/// Numeric variables of the daily weather schema.
pub const NUMERIC_COLUMNS: &[&str] = &[
    "tempmax",
    "tempmin",
    "temp",
    "feelslikemax",
    "feelslikemin",
    "feelslike",
    "dew",
    "humidity",
    "precip",
    "precipprob",
    "precipcover",
    "snow",
    "snowdepth",
    "windgust",
    "windspeed",
    "winddir",
    "sealevelpressure",
    "cloudcover",
    "visibility",
    "solarradiation",
    "solarenergy",
    "uvindex",
    "moonphase",
];

pub const TARGET: &str = "tempmax";
pub const DATE_COLUMN: &str = "datetime";

/// Date-indexed daily table. Missing numeric cells are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesTable {
    pub dates: Vec<NaiveDate>,
    pub numeric: BTreeMap<String, Vec<Option<f64>>>,
    pub text: BTreeMap<String, Vec<String>>,
    pub target_name: String,
}

impl TimeSeriesTable {
    pub fn new(dates: Vec<NaiveDate>) -> Self {
        Self {
            dates,
            numeric: BTreeMap::new(),
            text: BTreeMap::new(),
            target_name: TARGET.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn insert(&mut self, name: &str, values: Vec<f64>) {
        assert_eq!(values.len(), self.dates.len(), "column length");
        self.numeric.insert(name.to_string(), values.into_iter().map(Some).collect());
    }

    pub fn has(&self, name: &str) -> bool {
        self.numeric.contains_key(name)
    }

    /// Fully observed numeric column.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let col = self
            .numeric
            .get(name)
            .ok_or_else(|| Error::Data(format!("missing column `{name}`")))?;
        col.iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Data(format!("column `{name}` has a missing value at {}", self.dates[i]))))
            .collect()
    }

    /// Rows `[0, end)`.
    pub fn truncate(&self, end: usize) -> Self {
        Self {
            dates: self.dates[..end].to_vec(),
            numeric: self.numeric.iter().map(|(k, v)| (k.clone(), v[..end].to_vec())).collect(),
            text: self.text.iter().map(|(k, v)| (k.clone(), v[..end].to_vec())).collect(),
            target_name: self.target_name.clone(),
        }
    }

    pub fn has_missing(&self) -> bool {
        self.numeric.values().any(|c| c.iter().any(Option::is_none))
    }
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<TimeSeriesTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file)
}

/// Parse daily weather CSV. Row numbers in errors are file line numbers (header is line 1).
///
/// Calendar gaps are filled with all-missing rows so the result has a daily cadence.
pub fn read_csv(reader: impl Read) -> Result<TimeSeriesTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let date_idx = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case(DATE_COLUMN))
        .ok_or(Error::Load {
            row: 1,
            message: format!("no `{DATE_COLUMN}` column"),
        })?;

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let raw = rec.get(date_idx).unwrap_or("");
        let date = parse_date(raw).ok_or_else(|| Error::Load {
            row: line,
            message: format!("unparseable date `{raw}`"),
        })?;
        if let Some(prev) = dates.last() {
            if date == *prev {
                return Err(Error::Load {
                    row: line,
                    message: format!("duplicate date {date}"),
                });
            }
            if date < *prev {
                return Err(Error::Load {
                    row: line,
                    message: format!("date {date} is earlier than {prev}"),
                });
            }
        }
        dates.push(date);
        for (j, c) in rec.iter().enumerate() {
            cells[j].push(c.trim().to_string());
        }
    }

    let mut numeric: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    let mut text: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (j, name) in headers.iter().enumerate() {
        if j == date_idx {
            continue;
        }
        let key = name.to_ascii_lowercase();
        if TEXT_COLUMNS.contains(&key.as_str()) {
            text.insert(key, std::mem::take(&mut cells[j]));
            continue;
        }
        let known = NUMERIC_COLUMNS.contains(&key.as_str());
        let mut col = Vec::with_capacity(dates.len());
        let mut is_text = false;
        for (i, c) in cells[j].iter().enumerate() {
            if c.is_empty() {
                col.push(None);
                continue;
            }
            match c.parse::<f64>() {
                Ok(v) if v.is_finite() => col.push(Some(v)),
                _ if known => {
                    return Err(Error::Load {
                        row: i + 2,
                        message: format!("non-numeric value `{c}` in column `{name}`"),
                    })
                }
                _ => {
                    is_text = true;
                    break;
                }
            }
        }
        if is_text {
            text.insert(key, std::mem::take(&mut cells[j]));
        } else {
            numeric.insert(key, col);
        }
    }

    let table = TimeSeriesTable {
        dates,
        numeric,
        text,
        target_name: TARGET.to_string(),
    };
    Ok(fill_calendar_gaps(table))
}

/// Insert all-missing rows for absent calendar days.
pub fn fill_calendar_gaps(table: TimeSeriesTable) -> TimeSeriesTable {
    let n = table.dates.len();
    if n == 0 {
        return table;
    }
    let total = (table.dates[n - 1] - table.dates[0]).num_days() as usize + 1;
    if total == n {
        return table;
    }
    let start = table.dates[0];
    let dates: Vec<NaiveDate> = (0..total).map(|d| start + chrono::Days::new(d as u64)).collect();
    let slot: Vec<usize> = table.dates.iter().map(|d| (*d - start).num_days() as usize).collect();
    let numeric = table
        .numeric
        .into_iter()
        .map(|(k, v)| {
            let mut out = vec![None; total];
            for (i, x) in v.into_iter().enumerate() {
                out[slot[i]] = x;
            }
            (k, out)
        })
        .collect();
    let text = table
        .text
        .into_iter()
        .map(|(k, v)| {
            let mut out = vec![String::new(); total];
            for (i, x) in v.into_iter().enumerate() {
                out[slot[i]] = x;
            }
            (k, out)
        })
        .collect();
    TimeSeriesTable {
        dates,
        numeric,
        text,
        target_name: table.target_name,
    }
}
