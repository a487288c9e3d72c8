//! Experiment driver: configuration, dataset preparation, training,
//! boosting, evaluation and reports for the `qboost` binary.

mod checkpoint;
mod commands;
mod config;
mod data;
mod report;
mod stats;
mod svg;

pub use checkpoint::{hash_inputs, Checkpoint, CheckpointKind, Provenance, RngInfo, CHECKPOINT_VERSION};
pub use commands::{
    cmd_boost, cmd_evaluate, cmd_train, default_checkpoint, evaluate_model, BoostSummary, EvaluationReport, MonitorRow,
    RoundRow, RoundStep, TrainSummary, CHECKPOINT_FILE, EVALUATION_FILE, METRICS_FILE, MONITOR_FILE, PREDICTIONS_FILE,
    ROUNDS_FILE, STEPS_FILE, SUMMARY_FILE,
};
pub use config::{
    BoostAlgorithm, BoostSection, EvaluateSection, ExperimentConfig, MnistDataConfig, PhaseDataConfig, Task,
};
pub use data::{input_files, load_prepared, monitor_indices, prepare_data, DataSummary, Split, TaskData};
pub use report::{cmd_report, ReportSummary};
pub use stats::{
    bootstrap_accuracies, bootstrap_std, evaluate_predictions, paired_bootstrap, std_dev, Evaluation, PairedBootstrap,
};

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::datasets::GenerationMode;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Vqc,
}

#[derive(Debug, Parser)]
#[command(name = "qboost", version, about = "Boosted quantum circuit classifiers on a statevector simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run directory; overrides the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Ground-state preparation for the phase task.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the coreset or the phase dataset under <out>/data.
    PrepareData,
    /// Train a single classifier into <out>/train.
    Train,
    /// Run the configured boosting algorithm into <out>/boost.
    Boost,
    /// Score a checkpoint on the test split into <out>/evaluate.
    Evaluate {
        /// Checkpoint to score; defaults to the boosted one, then the single one.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Render figures and a summary from <out> into <out>/report.
    Report,
}

impl Cli {
    /// The config file with command-line overrides applied.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                return Err(crate::Error::Config("--config is required (see docs/config.md for the schema)".into()))
            }
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(out) = &self.out {
            config.out = out.clone();
        }
        if let Some(mode) = self.mode {
            config.phase.mode = match mode {
                ModeArg::Exact => GenerationMode::Exact,
                ModeArg::Vqc => GenerationMode::Vqc,
            };
        }
        Ok(config)
    }
}

/// Execute one parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    if let (Command::Report, None) = (&cli.command, &cli.config) {
        let out = cli.out.clone().ok_or_else(|| crate::Error::Config("report needs --out or --config".into()))?;
        return report(&out);
    }
    let config = cli.experiment()?;
    match &cli.command {
        Command::PrepareData => {
            let s = prepare_data(&config)?;
            println!(
                "prepared {} training and {} test samples in {} (input hash {})",
                s.train_size,
                s.test_size,
                config.data_dir().display(),
                s.input_hash
            );
            for r in &s.rejected {
                println!("rejected {r}");
            }
        }
        Command::Train => {
            let s = cmd_train(&config)?;
            println!(
                "trained {} steps; test accuracy {:.4} ± {:.4}; checkpoint {}",
                s.steps, s.test_accuracy, s.test_bootstrap_std, s.checkpoint_hash
            );
        }
        Command::Boost => {
            let s = cmd_boost(&config)?;
            for r in &s.rounds {
                println!(
                    "round {}: alpha {:.4} c {:.2} test {} ± {}",
                    r.round,
                    r.alpha,
                    r.c,
                    r.test_accuracy.map_or("-".into(), |a| format!("{a:.4}")),
                    r.test_std.map_or("-".into(), |a| format!("{a:.4}")),
                );
            }
            println!("checkpoint {}", s.checkpoint_hash);
        }
        Command::Evaluate { checkpoint } => {
            let r = cmd_evaluate(&config, checkpoint.as_deref())?;
            println!(
                "accuracy {:.4} ± {:.4} over {} samples ({} member(s))",
                r.evaluation.accuracy, r.evaluation.bootstrap_std, r.evaluation.samples, r.members
            );
        }
        Command::Report => report(&config.out)?,
    }
    Ok(())
}

fn report(out: &std::path::Path) -> Result<()> {
    let s = cmd_report(out)?;
    println!("wrote {} to {}", s.figures.join(", "), out.join("report").display());
    Ok(())
}
