use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use extremecast::baselines::ModelKind;
use extremecast::io::commands::{self, ExplainMethod, ExplainOptions};
use extremecast::io::RunConfig;
use extremecast::Result;

/// Daily maximum temperature forecasting.
///
/// Exit codes: 2 configuration or usage, 3 data, 4 numeric, 5 incompatible inputs.
#[derive(Parser)]
#[command(name = "extremecast", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a windowed, scaled dataset from a daily weather CSV.
    Prepare {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model and write checkpoint.json and history.csv.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "EXTREMECAST_SEED")]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "dual_stream")]
        model: ModelKind,
    },
    /// Evaluate a checkpoint on the test partition.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        tail_q: Option<f64>,
    },
    /// Run a diagnostic and export its tables.
    Explain {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        method: ExplainMethod,
        #[arg(long)]
        out: PathBuf,
        /// test sample index (repeatable) for attention and states
        #[arg(long)]
        sample: Vec<usize>,
        /// feature to sweep (repeatable) for pdp
        #[arg(long)]
        feature: Vec<String>,
        /// diagnostic settings are read from the `eval` section
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write a few training windows next to their augmented copies.
    AugmentPreview {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, env = "EXTREMECAST_SEED")]
        seed: Option<u64>,
    },
    /// Train and evaluate the reference models.
    Baseline {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// repeatable; persistence, tcn and nbeats when omitted
        #[arg(long, value_enum)]
        model: Vec<ModelKind>,
        #[arg(long, env = "EXTREMECAST_SEED")]
        seed: Option<u64>,
    },
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Prepare { config, input, out } => {
            let s = commands::cmd_prepare(config.as_deref(), input.as_deref(), &out)?;
            println!(
                "rows {}  candidates {}  features {}  windows train {} val {} test {}",
                s.rows, s.candidates, s.features, s.train, s.val, s.test
            );
        }
        Cmd::Train { config, data, out, seed, model } => {
            let c = commands::cmd_train(config.as_deref(), &data, &out, seed, model)?;
            let t = &c.train_state;
            println!(
                "{}: best epoch {} of {}, val loss {}",
                model.name(),
                t.best_epoch,
                t.epochs_run,
                t.best_val_loss
            );
        }
        Cmd::Evaluate { checkpoint, data, report, tail_q } => {
            let r = commands::cmd_evaluate(&checkpoint, &data, &report, tail_q)?;
            println!("rmse {}  mae {}  r2 {:?}", r.rmse, r.mae, r.r2);
        }
        Cmd::Explain { checkpoint, data, method, out, sample, feature, config } => {
            let eval = RunConfig::load_or_default(config.as_deref())?.eval;
            let opts = ExplainOptions {
                samples: sample,
                features: feature,
                eval,
            };
            for p in commands::cmd_explain(&checkpoint, &data, method, &out, &opts)? {
                println!("{}", p.display());
            }
        }
        Cmd::AugmentPreview { config, data, out, samples, seed } => {
            let aug = commands::cmd_augment_preview(config.as_deref(), &data, &out, samples, seed)?;
            println!("{} windows written to {}", aug.len(), out.display());
        }
        Cmd::Baseline { config, data, out, model, seed } => {
            for r in commands::cmd_baseline(config.as_deref(), &data, &out, &model, seed)? {
                println!("{:<12} rmse {}  mae {}", r.model, r.rmse, r.mae);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
