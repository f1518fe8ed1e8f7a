use super::table::TimeSeriesTable;
use crate::error::{Error, Result};

/// Fill gaps in one column: linear interpolation between the nearest known
/// neighbours, then leading gaps take the first known value and trailing gaps
/// the last known value.
pub fn impute_column(name: &str, col: &[Option<f64>]) -> Result<Vec<f64>> {
    let known: Vec<usize> = (0..col.len()).filter(|&i| col[i].is_some()).collect();
    let (Some(&first), Some(&last)) = (known.first(), known.last()) else {
        return Err(Error::Data(format!("cannot impute empty column {name}")));
    };
    let mut out = vec![0.0; col.len()];
    for i in 0..col.len() {
        out[i] = match col[i] {
            Some(v) => v,
            None if i < first => col[first].unwrap(),
            None if i > last => col[last].unwrap(),
            None => {
                let k = known.partition_point(|&j| j < i);
                let (lo, hi) = (known[k - 1], known[k]);
                let (a, b) = (col[lo].unwrap(), col[hi].unwrap());
                a + (b - a) * (i - lo) as f64 / (hi - lo) as f64
            }
        };
    }
    Ok(out)
}

pub fn impute(table: &TimeSeriesTable) -> Result<TimeSeriesTable> {
    let mut out = table.clone();
    for (name, col) in out.numeric.iter_mut() {
        let filled = impute_column(name, col)?;
        *col = filled.into_iter().map(Some).collect();
    }
    Ok(out)
}
