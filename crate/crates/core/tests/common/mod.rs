#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use extremecast::synthetic::{synthetic_weather, write_csv, SyntheticConfig};

pub const TINY_CONFIG: &str = r#"{
  "dataset": {"lookback": 7},
  "features": {"top_k": 6, "rolling_windows": [7]},
  "augment": {"enabled": false},
  "model": {"embed_dim": 8, "lstm_hidden": 4, "gru_hidden": 4, "n_states": 3, "n_heads": 2, "stream_dim": 8},
  "tcn": {"blocks": 2, "filters": [4, 6], "kernel": 2, "dilations": [1, 2]},
  "nbeats": {"stacks": 2, "fc_units": 8},
  "training": {"max_epochs": 3, "patience": 2, "batch_size": 32},
  "eval": {"permutation_repeats": 2, "pdp_grid_size": 5, "pdp_top_features": 2, "kmeans_k": 3},
  "seed": 7
}"#;

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_extremecast"));
    c.env_remove("EXTREMECAST_SEED");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn extremecast")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// A temp dir holding `weather.csv` (400 synthetic days) and `config.json`.
pub struct Workspace {
    pub dir: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        Self::with_config(TINY_CONFIG)
    }

    pub fn with_config(config: &str) -> Self {
        let dir = tempfile::tempdir().expect("tempdir");
        let table = synthetic_weather(
            &SyntheticConfig {
                days: 400,
                ..Default::default()
            },
            11,
        )
        .expect("synthetic");
        write_csv(&table, std::fs::File::create(dir.path().join("weather.csv")).unwrap()).unwrap();
        std::fs::write(dir.path().join("config.json"), config).unwrap();
        Self { dir }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Run `prepare` into `name` and panic on failure.
    pub fn prepare(&self, name: &str) -> PathBuf {
        let out = self.path(name);
        let o = run(&["prepare", "--config", s(&self.path("config.json")), "--input", s(&self.path("weather.csv")), "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        out
    }

    pub fn train(&self, data: &Path, out: &str, extra: &[&str]) -> PathBuf {
        let dir = self.path(out);
        let cfg = self.path("config.json");
        let mut args = vec!["train", "--config", s(&cfg), "--data", s(data), "--out", s(&dir)];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        dir
    }
}

pub fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&v).expect("valid schema")
}

pub fn assert_valid(validator: &jsonschema::Validator, doc: &serde_json::Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

pub fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

pub fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let h = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (h, rows)
}
