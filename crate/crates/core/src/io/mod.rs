//! Run configuration, checkpoints, canonical JSON and the command entry
//! points behind the `extremecast` binary.

pub mod checkpoint;
pub mod commands;
pub mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub use checkpoint::{Checkpoint, TensorRecord, TrainSummary, CHECKPOINT_SCHEMA_VERSION};
pub use config::{EvalConfig, RunConfig};

/// Recursively sort object keys.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, canonical(v));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

/// UTF-8 JSON with sorted keys and a trailing newline. Floats use the
/// shortest representation that parses back to the same bits.
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    let v = canonical(serde_json::to_value(value)?);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = to_canonical_string(value)?;
    create_parent(path)?;
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => std::fs::create_dir_all(p).map_err(|e| Error::io(p, e)),
        _ => Ok(()),
    }
}

/// Deserialize a JSON file; a malformed document is a data error naming the
/// offending field path.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut de = serde_json::Deserializer::from_reader(BufReader::new(f));
    serde_path_to_error::deserialize(&mut de)
        .map_err(|e| Error::Data(format!("{}: field `{}`: {}", path.display(), e.path(), e.inner())))
}

/// Open `path` for buffered writing, creating parent directories.
pub fn create(path: &Path) -> Result<BufWriter<File>> {
    create_parent(path)?;
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

pub fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}
