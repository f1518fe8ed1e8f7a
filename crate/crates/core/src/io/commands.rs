//! The work behind each `extremecast` subcommand. Every function takes paths,
//! writes its artifacts and returns a summary; the binary only parses flags,
//! prints and maps errors to exit codes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{create, finish, read_json, write_json, Checkpoint, EvalConfig, RunConfig};
use crate::augment::augment_dataset;
use crate::baselines::{Forecaster, ModelKind};
use crate::data::{load_csv, prepare, Partition, PreparedDataset, WindowedDataset};
use crate::diagnostics::{
    kmeans_regimes, occlusion_sensitivity, partial_dependence, permutation_importance, ranking_agreement,
    residual_diagnostics,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate, write_residuals, EvaluationReport};
use crate::features::write_audit;
use crate::numeric::ParamSet;
use crate::trainer::{train, validation_loss, write_history};

/// Environment variable consulted when no `--seed` is given.
pub const SEED_ENV: &str = "EXTREMECAST_SEED";

/// `--seed`, then `EXTREMECAST_SEED`, then the config.
pub fn resolve_seed(flag: Option<u64>, config: &RunConfig) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::config(SEED_ENV, format!("not an unsigned integer: `{v}`"))),
        Err(_) => Ok(config.seed),
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::io::BufWriter<std::fs::File>>> {
    Ok(csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(create(path)?))
}

fn close(w: csv::Writer<std::io::BufWriter<std::fs::File>>, path: &Path) -> Result<()> {
    let inner = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    finish(inner, path)
}

fn write_table(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    close(w, path)
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn load_dataset(path: &Path) -> Result<PreparedDataset> {
    let ds: PreparedDataset = read_json(path)?;
    ds.check()?;
    Ok(ds)
}

/// Audit CSV written next to a prepared dataset.
pub fn audit_path(dataset: &Path) -> PathBuf {
    dataset.with_extension("audit.csv")
}

/// Residual CSV written next to a report.
pub fn residuals_path(report: &Path) -> PathBuf {
    report.with_extension("residuals.csv")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepareSummary {
    pub rows: usize,
    pub candidates: usize,
    pub features: usize,
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

/// load → impute → features → select → scale → split → window, then write
/// the dataset JSON and the feature audit.
pub fn cmd_prepare(config: Option<&Path>, input: Option<&Path>, out: &Path) -> Result<PrepareSummary> {
    let cfg = RunConfig::load_or_default(config)?;
    let input = match (input, &cfg.dataset.csv_path) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => return Err(Error::config("dataset.csv_path", "no input CSV given")),
    };
    let raw = load_csv(&input)?;
    let prep = prepare(&raw, &cfg.dataset, &cfg.features, cfg.training.feature_mode)?;
    write_json(out, &prep.dataset)?;
    let audit = audit_path(out);
    let mut w = create(&audit)?;
    write_audit(&mut w, &prep.ranking, &prep.dataset.feature_names)?;
    finish(w, &audit)?;
    let d = &prep.dataset;
    Ok(PrepareSummary {
        rows: d.daily.dates.len(),
        candidates: prep.ranking.len(),
        features: d.feature_names.len(),
        train: d.train.n_samples,
        val: d.val.n_samples,
        test: d.test.n_samples,
    })
}

/// Train one model; writes `checkpoint.json` and `history.csv` into `out`.
pub fn cmd_train(config: Option<&Path>, data: &Path, out: &Path, seed: Option<u64>, model: ModelKind) -> Result<Checkpoint> {
    let cfg = RunConfig::load_or_default(config)?;
    let seed = resolve_seed(seed, &cfg)?;
    let dataset = load_dataset(data)?;
    train_to_dir(&cfg, &dataset, model, seed, out, "")
}

fn train_to_dir(cfg: &RunConfig, dataset: &PreparedDataset, kind: ModelKind, seed: u64, out: &Path, suffix: &str) -> Result<Checkpoint> {
    let spec = cfg.model_spec(kind, &dataset.target_name);
    let tc = cfg.training_config(seed);
    let outcome = train(dataset, &spec, &tc)?;
    let ckpt = Checkpoint::from_outcome(&outcome, dataset, &tc.loss, seed);
    ckpt.save(&out.join(format!("checkpoint{suffix}.json")))?;
    let hist = out.join(format!("history{suffix}.csv"));
    let mut w = create(&hist)?;
    write_history(&mut w, &outcome.state.history)?;
    finish(w, &hist)?;
    Ok(ckpt)
}

fn open_pair(checkpoint: &Path, data: &Path) -> Result<(Checkpoint, PreparedDataset, Forecaster, ParamSet)> {
    let ckpt = Checkpoint::load(checkpoint)?;
    let dataset = load_dataset(data)?;
    ckpt.check_compatible(&dataset)?;
    let (model, params) = ckpt.forecaster()?;
    Ok((ckpt, dataset, model, params))
}

fn report_for(ckpt: &Checkpoint, dataset: &PreparedDataset, model: &Forecaster, params: &ParamSet, tail_q: f64) -> Result<EvaluationReport> {
    let mut report = evaluate(model, params, &dataset.partition(Partition::Test), &dataset.target_scale()?, tail_q)?;
    report.training_time_s = ckpt.train_state.wall_clock_to_best;
    report.best_val_loss = Some(ckpt.train_state.best_val_loss);
    report.val_loss = Some(validation_loss(model, params, &dataset.partition(Partition::Val), &ckpt.loss)?);
    Ok(report)
}

fn write_report(report: &EvaluationReport, path: &Path) -> Result<()> {
    write_json(path, report)?;
    let rp = residuals_path(path);
    let mut w = create(&rp)?;
    write_residuals(&mut w, &report.residuals)?;
    finish(w, &rp)
}

/// Evaluate a checkpoint on the test partition; writes the report JSON and
/// the residual CSV beside it.
pub fn cmd_evaluate(checkpoint: &Path, data: &Path, report: &Path, tail_q: Option<f64>) -> Result<EvaluationReport> {
    let (ckpt, dataset, model, params) = open_pair(checkpoint, data)?;
    let q = tail_q.unwrap_or(EvalConfig::default().tail_q);
    EvalConfig {
        tail_q: q,
        ..EvalConfig::default()
    }
    .validate("eval")?;
    let r = report_for(&ckpt, &dataset, &model, &params, q)?;
    write_report(&r, report)?;
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExplainMethod {
    Occlusion,
    Pdp,
    Permutation,
    Residuals,
    Kmeans,
    Attention,
    States,
}

#[derive(Clone, Debug, Default)]
pub struct ExplainOptions {
    /// test-partition sample indices for `attention` / `states`
    pub samples: Vec<usize>,
    /// features for `pdp`; the top-ranked ones when empty
    pub features: Vec<String>,
    pub eval: EvalConfig,
}

/// Run one diagnostic and return the files written.
pub fn cmd_explain(checkpoint: &Path, data: &Path, method: ExplainMethod, out: &Path, opts: &ExplainOptions) -> Result<Vec<PathBuf>> {
    opts.eval.validate("eval")?;
    let (ckpt, dataset, model, params) = open_pair(checkpoint, data)?;
    let test = dataset.partition(Partition::Test);
    let scale = dataset.target_scale()?;
    let mut written = Vec::new();
    let mut put = |name: &str| {
        let p = out.join(name);
        written.push(p.clone());
        p
    };
    match method {
        ExplainMethod::Occlusion => {
            let rows = occlusion_sensitivity(&model, &params, &test, &scale)?;
            write_table(
                &put("occlusion.csv"),
                &header(&["feature", "fill", "baseline_rmse", "occluded_rmse", "delta_rmse"]),
                rows.iter().map(|r| {
                    vec![
                        r.feature.clone(),
                        r.fill.to_string(),
                        r.baseline_rmse.to_string(),
                        r.occluded_rmse.to_string(),
                        r.delta_rmse.to_string(),
                    ]
                }),
            )?;
        }
        ExplainMethod::Pdp => {
            let names: Vec<String> = if opts.features.is_empty() {
                test.feature_names.iter().take(opts.eval.pdp_top_features).cloned().collect()
            } else {
                opts.features.clone()
            };
            let mut rows = Vec::new();
            for f in &names {
                let c = partial_dependence(model.arch(), &params, &test, f, opts.eval.pdp_grid_size, &scale)?;
                for (g, m) in c.grid.iter().zip(&c.mean_prediction) {
                    rows.push(vec![c.feature.clone(), g.to_string(), m.to_string()]);
                }
            }
            write_table(&put("pdp.csv"), &header(&["feature", "grid", "mean_prediction"]), rows)?;
        }
        ExplainMethod::Permutation => {
            let perm = permutation_importance(&model, &params, &test, &scale, opts.eval.permutation_repeats, ckpt.seed)?;
            write_table(
                &put("permutation.csv"),
                &header(&["feature", "baseline_rmse", "metric_drop", "std", "repeats"]),
                perm.iter().map(|r| {
                    vec![
                        r.feature.clone(),
                        r.baseline_rmse.to_string(),
                        r.metric_drop.to_string(),
                        r.std.to_string(),
                        r.repeats.to_string(),
                    ]
                }),
            )?;
            let occ = occlusion_sensitivity(&model, &params, &test, &scale)?;
            write_json(
                &put("permutation_agreement.json"),
                &serde_json::json!({ "spearman_vs_occlusion": ranking_agreement(&occ, &perm) }),
            )?;
        }
        ExplainMethod::Residuals => {
            let report = evaluate(&model, &params, &test, &scale, opts.eval.tail_q)?;
            let e: Vec<f64> = report.residuals.iter().map(|r| r.e).collect();
            let p: Vec<f64> = report.residuals.iter().map(|r| r.y_hat).collect();
            let d = residual_diagnostics(&e, &p)?;
            write_table(
                &put("residual_acf.csv"),
                &header(&["lag", "r", "band"]),
                d.acf.iter().map(|a| vec![a.lag.to_string(), a.r.to_string(), d.band.to_string()]),
            )?;
            let h = &d.histogram;
            write_table(
                &put("residual_histogram.csv"),
                &header(&["left", "right", "count"]),
                (0..h.counts.len()).map(|i| vec![h.edges[i].to_string(), h.edges[i + 1].to_string(), h.counts[i].to_string()]),
            )?;
            write_table(
                &put("residual_qq.csv"),
                &header(&["theoretical", "empirical"]),
                d.qq.iter().map(|(t, s)| vec![t.to_string(), s.to_string()]),
            )?;
            write_table(
                &put("residual_vs_predicted.csv"),
                &header(&["predicted", "residual"]),
                d.vs_predicted.iter().map(|(a, b)| vec![a.to_string(), b.to_string()]),
            )?;
        }
        ExplainMethod::Kmeans => {
            let reg = kmeans_regimes(&dataset.daily, opts.eval.kmeans_k, ckpt.seed)?;
            write_table(
                &put("kmeans_assignments.csv"),
                &header(&["date", "cluster"]),
                dataset.daily.dates.iter().zip(&reg.assignments).map(|(d, a)| vec![d.to_string(), a.to_string()]),
            )?;
            let mut h = vec!["cluster".to_string()];
            h.extend(reg.features.iter().cloned());
            write_table(
                &put("kmeans_centroids.csv"),
                &h,
                reg.centroids.iter().enumerate().map(|(j, c)| {
                    std::iter::once(j.to_string()).chain(c.iter().map(|v| v.to_string())).collect()
                }),
            )?;
        }
        ExplainMethod::Attention | ExplainMethod::States => {
            let Forecaster::DualStream(net) = &model else {
                return Err(Error::invalid(format!(
                    "method `{:?}` needs a dual_stream checkpoint, got {}",
                    method,
                    model.kind().name()
                )));
            };
            let samples = if opts.samples.is_empty() { vec![0] } else { opts.samples.clone() };
            for &s in &samples {
                let sample = test.samples.get(s).ok_or_else(|| {
                    Error::invalid(format!("sample {s} out of range; the test partition has {} samples", test.len()))
                })?;
                let intro = net.introspect(&params, &sample.x, 1)?;
                if method == ExplainMethod::Attention {
                    let l = intro.attention[0].len();
                    let h: Vec<String> = (0..l).map(|j| format!("k{j}")).collect();
                    write_table(
                        &put(&format!("attention_{s}.csv")),
                        &h,
                        intro.attention[0].iter().map(|row| row.iter().map(|v| v.to_string()).collect()),
                    )?;
                } else {
                    let n = intro.transition.len();
                    let mut h = vec!["t".to_string()];
                    h.extend((0..n).map(|j| format!("p{j}")));
                    h.extend((0..n).map(|j| format!("q{j}")));
                    h.push("alpha".into());
                    write_table(
                        &put(&format!("states_{s}.csv")),
                        &h,
                        (0..intro.p[0].len()).map(|t| {
                            std::iter::once(t.to_string())
                                .chain(intro.p[0][t].iter().map(|v| v.to_string()))
                                .chain(intro.q[0][t].iter().map(|v| v.to_string()))
                                .chain(std::iter::once(intro.alpha[0][t].to_string()))
                                .collect()
                        }),
                    )?;
                }
            }
            if method == ExplainMethod::States {
                let n = net.config.n_states;
                let mut h = vec!["from".to_string()];
                h.extend((0..n).map(|j| format!("to{j}")));
                let intro = net.introspect(&params, &test.samples[samples[0]].x, 1)?;
                write_table(
                    &put("transition.csv"),
                    &h,
                    intro.transition.iter().enumerate().map(|(i, row)| {
                        std::iter::once(i.to_string()).chain(row.iter().map(|v| v.to_string())).collect()
                    }),
                )?;
            }
        }
    }
    Ok(written)
}

/// The first `n` training windows and their three augmented copies, long
/// format: `sample,variant,t,<features>`.
pub fn cmd_augment_preview(config: Option<&Path>, data: &Path, out: &Path, n: usize, seed: Option<u64>) -> Result<WindowedDataset> {
    let cfg = RunConfig::load_or_default(config)?;
    let seed = resolve_seed(seed, &cfg)?;
    let dataset = load_dataset(data)?;
    let train = dataset.partition(Partition::Train);
    let head = train.select(0..n.min(train.len()));
    let aug = augment_dataset(&head, &cfg.augment, seed)?;
    let f = aug.n_features();
    let mut h = header(&["sample", "variant", "t"]);
    h.extend(aug.feature_names.iter().cloned());
    const VARIANTS: [&str; 4] = ["original", "jitter", "scale", "warp"];
    let rows = aug.samples.iter().enumerate().flat_map(|(k, s)| {
        let (i, v) = (k / 4, k % 4);
        let warp = if v == 3 {
            if i % 2 == 0 {
                "time_warp"
            } else {
                "magnitude_warp"
            }
        } else {
            VARIANTS[v]
        };
        (0..aug.lookback).map(move |t| {
            [i.to_string(), warp.to_string(), t.to_string()]
                .into_iter()
                .chain(s.x[t * f..(t + 1) * f].iter().map(|x| x.to_string()))
                .collect::<Vec<String>>()
        })
    });
    write_table(out, &h, rows)?;
    Ok(aug)
}

/// Train and evaluate the reference models under the same splits, scaler and
/// seed. Writes `checkpoint_<model>.json`, `history_<model>.csv`,
/// `report_<model>.json` (plus residuals) and `comparison.csv`.
pub fn cmd_baseline(config: Option<&Path>, data: &Path, out: &Path, models: &[ModelKind], seed: Option<u64>) -> Result<Vec<EvaluationReport>> {
    let cfg = RunConfig::load_or_default(config)?;
    let seed = resolve_seed(seed, &cfg)?;
    let dataset = load_dataset(data)?;
    let models = if models.is_empty() {
        vec![ModelKind::Persistence, ModelKind::Tcn, ModelKind::Nbeats]
    } else {
        models.to_vec()
    };
    let mut reports = Vec::new();
    for kind in models {
        let suffix = format!("_{}", kind.name());
        let ckpt = train_to_dir(&cfg, &dataset, kind, seed, out, &suffix)?;
        let (model, params) = ckpt.forecaster()?;
        let r = report_for(&ckpt, &dataset, &model, &params, cfg.eval.tail_q)?;
        write_report(&r, &out.join(format!("report{suffix}.json")))?;
        reports.push(r);
    }
    write_table(
        &out.join("comparison.csv"),
        &header(&["model", "rmse", "mae", "r2", "extreme_high_rmse", "extreme_low_rmse", "training_time_s"]),
        reports.iter().map(|r| {
            vec![
                r.model.clone(),
                r.rmse.to_string(),
                r.mae.to_string(),
                opt(r.r2),
                opt(r.extreme_high_rmse),
                opt(r.extreme_low_rmse),
                r.training_time_s.to_string(),
            ]
        }),
    )?;
    Ok(reports)
}
