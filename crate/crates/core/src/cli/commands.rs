use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::checkpoint::{hash_inputs, Checkpoint, CheckpointKind, Provenance, RngInfo, CHECKPOINT_VERSION};
use super::config::{BoostAlgorithm, ExperimentConfig, Task};
use super::data::{input_files, load_prepared, monitor_indices, Split, TaskData};
use super::stats::{bootstrap_std, evaluate_predictions, Evaluation};
use crate::circuits::{argmax, Architecture};
use crate::datasets::ManifestRecord;
use crate::ensemble::{
    accuracy, adaboost_m1, adaboost_q, combine, member_probs, BoostConfig, CircuitLearner, EnsembleModel, Voting,
    WeakClassifierRecord,
};
use crate::optim::{train_classifier_with, QcnnModel, QnnModel, QuantumClassifier, StepMetric, WeightedDataset};
use crate::rng::child_seed;
use crate::{Error, Result};

pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const MONITOR_FILE: &str = "monitor.csv";
pub const ROUNDS_FILE: &str = "rounds.csv";
pub const STEPS_FILE: &str = "steps.csv";
pub const PREDICTIONS_FILE: &str = "predictions.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const EVALUATION_FILE: &str = "evaluation.json";

/// Accuracy on the monitor set after an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorRow {
    pub epoch: usize,
    pub step: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub task: Task,
    pub steps: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub monitor_size: usize,
    pub test_accuracy: f64,
    pub test_bootstrap_std: f64,
    pub circuit_evaluations: usize,
    pub checkpoint_hash: String,
}

/// One row of `rounds.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRow {
    pub round: usize,
    pub alpha: f64,
    pub c: f64,
    pub accepted: bool,
    pub member_train_accuracy: f64,
    pub train_accuracy: f64,
    pub member_test_accuracy: Option<f64>,
    pub member_test_std: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub test_std: Option<f64>,
    pub weight_entropy: f64,
}

/// One row of `steps.csv`: a training step of a boosting round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundStep {
    pub round: usize,
    pub step: usize,
    pub epoch: usize,
    pub batch: usize,
    pub loss: f64,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostSummary {
    pub task: Task,
    pub algorithm: BoostAlgorithm,
    pub rounds: Vec<RoundRow>,
    pub members: usize,
    pub stopped_early: bool,
    pub single_test_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub checkpoint_hash: String,
}

fn provenance(config: &ExperimentConfig) -> Result<Provenance> {
    Ok(Provenance {
        config_hash: config.hash(),
        input_hash: hash_inputs(&config.data_dir(), input_files(config.task))?,
    })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn labels_of(probs: &[Vec<f64>]) -> Vec<usize> {
    probs.iter().map(|p| argmax(p)).collect()
}

fn correctness(predictions: &[usize], labels: &[usize]) -> Vec<bool> {
    predictions.iter().zip(labels).map(|(p, y)| p == y).collect()
}

fn check_classes(arch: &Architecture, task: Task) -> Result<()> {
    let want = match task {
        Task::MnistQnn => 10,
        Task::PhaseQcnn => 3,
    };
    if arch.n_classes() != want {
        return Err(Error::domain(format!(
            "architecture has {} classes but the {task:?} dataset has {want}",
            arch.n_classes()
        )));
    }
    Ok(())
}

fn single_checkpoint(
    config: &ExperimentConfig,
    arch: Architecture,
    params: Vec<f64>,
    train_probs: &[Vec<f64>],
) -> Result<Checkpoint> {
    let mut model = EnsembleModel::new(arch, Voting::Soft);
    model.members.push(WeakClassifierRecord {
        params,
        alpha: 1.0,
        c: 1.0,
        train_predictions: labels_of(train_probs),
        train_confidences: train_probs.iter().map(|p| p[argmax(p)]).collect(),
    });
    Ok(Checkpoint {
        format_version: CHECKPOINT_VERSION,
        kind: CheckpointKind::Single,
        task: config.task,
        algorithm: None,
        model,
        rng: RngInfo::new(config.seed),
        provenance: provenance(config)?,
    })
}

fn train_task<M: QuantumClassifier>(
    config: &ExperimentConfig,
    model: &M,
    arch: Architecture,
    train: &Split<M::Input>,
    monitor: &Split<M::Input>,
    test: &Split<M::Input>,
    dir: &Path,
) -> Result<TrainSummary> {
    // Same seed as the first boosting round, so a one-round boost
    // reproduces this classifier.
    let tc = config.train_config();
    let tc = tc.clone().with_seed(child_seed(tc.seed, 0));
    let weights = vec![1.0 / train.len() as f64; train.len()];
    let data = WeightedDataset::new(&train.inputs, &train.labels, &weights)?;
    let per_epoch = train.len().div_ceil(tc.batch_size.max(1));
    let mut monitor_rows = Vec::new();
    let mut monitor_error = None;
    let outcome = train_classifier_with(model, data, &tc, None, |m: &StepMetric, params| {
        if m.batch + 1 != per_epoch || monitor_error.is_some() {
            return;
        }
        match member_probs(model, params, &monitor.inputs) {
            Ok(p) => {
                let acc = accuracy(&labels_of(&p), &monitor.labels);
                log::info!("epoch {} monitor accuracy {acc:.4}", m.epoch + 1);
                monitor_rows.push(MonitorRow { epoch: m.epoch, step: m.step, accuracy: acc });
            }
            Err(e) => monitor_error = Some(e),
        }
    })?;
    if let Some(e) = monitor_error {
        return Err(e);
    }
    let train_probs = member_probs(model, &outcome.params, &train.inputs)?;
    let test_preds = labels_of(&member_probs(model, &outcome.params, &test.inputs)?);
    let checkpoint = single_checkpoint(config, arch, outcome.params, &train_probs)?;
    let hash = checkpoint.save(&dir.join(CHECKPOINT_FILE))?;
    write_csv(&dir.join(METRICS_FILE), &outcome.metrics, &["step", "epoch", "batch", "loss", "train_accuracy"])?;
    write_csv(&dir.join(MONITOR_FILE), &monitor_rows, &["epoch", "step", "accuracy"])?;
    let summary = TrainSummary {
        task: config.task,
        steps: outcome.metrics.len(),
        train_size: train.len(),
        test_size: test.len(),
        monitor_size: monitor.len(),
        test_accuracy: accuracy(&test_preds, &test.labels),
        test_bootstrap_std: bootstrap_std(
            &correctness(&test_preds, &test.labels),
            config.evaluate.bootstrap,
            config.seed,
        ),
        circuit_evaluations: outcome.circuit_evaluations,
        checkpoint_hash: hash,
    };
    write_json(&dir.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}

fn subset<I: Clone>(split: &Split<I>, idx: &[usize]) -> Split<I> {
    Split {
        inputs: idx.iter().map(|&i| split.inputs[i].clone()).collect(),
        labels: idx.iter().map(|&i| split.labels[i]).collect(),
    }
}

fn models(config: &ExperimentConfig) -> Result<Architecture> {
    let arch = config.architecture();
    check_classes(&arch, config.task)?;
    Ok(arch)
}

/// Train one classifier on uniform weights; writes `<out>/train`.
pub fn cmd_train(config: &ExperimentConfig) -> Result<TrainSummary> {
    let arch = models(config)?;
    let data = load_prepared(config)?;
    let dir = config.out.join("train");
    fs::create_dir_all(&dir)?;
    match (&arch, &data) {
        (Architecture::Qnn(a), TaskData::Mnist { train, test }) => {
            let idx = monitor_indices(&test.labels, 10, config.mnist.monitor_per_digit, config.seed);
            let monitor = subset(test, &idx);
            train_task(config, &QnnModel::new(a.clone())?, arch.clone(), train, &monitor, test, &dir)
        }
        (Architecture::Qcnn(a), TaskData::Phase { train, test, .. }) => {
            train_task(config, &QcnnModel::new(a.clone())?, arch.clone(), train, test, test, &dir)
        }
        _ => unreachable!("architecture follows the task"),
    }
}

fn ensemble_test_predictions(
    alphas: &[f64],
    probs: &[Vec<Vec<f64>>],
    n: usize,
    k: usize,
    voting: Voting,
) -> Vec<usize> {
    (0..n)
        .map(|i| {
            let rows: Vec<&[f64]> = probs.iter().map(|m| m[i].as_slice()).collect();
            combine(alphas, &rows, k, voting)
        })
        .collect()
}

fn write_predictions(
    path: &Path,
    labels: &[usize],
    member_preds: &[Vec<usize>],
    ensemble: &[usize],
    records: Option<&[ManifestRecord]>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["index".to_string(), "label".into(), "h1".into(), "h2".into()];
    header.extend((1..=member_preds.len()).map(|l| format!("member_{l}")));
    header.push("ensemble".into());
    w.write_record(&header)?;
    for (i, &y) in labels.iter().enumerate() {
        let (h1, h2) = match records.and_then(|r| r.get(i)) {
            Some(r) => (r.h1.map(|v| v.to_string()), r.h2.map(|v| v.to_string())),
            None => (None, None),
        };
        let mut row = vec![i.to_string(), y.to_string(), h1.unwrap_or_default(), h2.unwrap_or_default()];
        row.extend(member_preds.iter().map(|m| m[i].to_string()));
        row.push(ensemble[i].to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn boost_task<M: QuantumClassifier>(
    config: &ExperimentConfig,
    model: &M,
    arch: Architecture,
    train: &Split<M::Input>,
    test: &Split<M::Input>,
    records: Option<&[ManifestRecord]>,
    dir: &Path,
) -> Result<BoostSummary> {
    let b = &config.boost;
    let bc = BoostConfig { rounds: b.rounds, c_grid: b.c_grid, alpha_cap: b.alpha_cap, early_stop: b.early_stop };
    let mut learner = CircuitLearner {
        model,
        architecture: arch,
        train_inputs: &train.inputs,
        train_labels: &train.labels,
        test_inputs: Some(&test.inputs),
        config: config.train_config(),
    };
    let outcome = match b.algorithm {
        BoostAlgorithm::AdaboostQ => adaboost_q(&mut learner, &train.labels, Some(&test.labels), &bc)?,
        BoostAlgorithm::AdaboostM1 => adaboost_m1(&mut learner, &train.labels, Some(&test.labels), &bc, b.m1_voting)?,
    };
    let k = outcome.model.n_classes;
    let alphas = outcome.model.alphas();
    let member_preds: Vec<Vec<usize>> = outcome.test_probs.iter().map(|p| labels_of(p)).collect();
    let resamples = config.evaluate.bootstrap;
    let std_of = |preds: &[usize]| bootstrap_std(&correctness(preds, &test.labels), resamples, config.seed);

    let mut rows = Vec::with_capacity(outcome.rounds.len());
    let mut accepted = 0;
    for r in &outcome.rounds {
        let member_test_std = if r.accepted {
            accepted += 1;
            Some(std_of(&member_preds[accepted - 1]))
        } else {
            None
        };
        let ens = ensemble_test_predictions(
            &alphas[..accepted],
            &outcome.test_probs[..accepted],
            test.len(),
            k,
            outcome.model.voting,
        );
        rows.push(RoundRow {
            round: r.round,
            alpha: r.alpha,
            c: r.c,
            accepted: r.accepted,
            member_train_accuracy: r.member_train_accuracy,
            train_accuracy: r.train_accuracy,
            member_test_accuracy: r.member_test_accuracy,
            member_test_std,
            test_accuracy: r.test_accuracy,
            test_std: Some(std_of(&ens)),
            weight_entropy: r.weight_entropy,
        });
    }
    let steps: Vec<RoundStep> = outcome
        .metrics
        .iter()
        .enumerate()
        .flat_map(|(l, ms)| {
            ms.iter().map(move |m| RoundStep {
                round: l + 1,
                step: m.step,
                epoch: m.epoch,
                batch: m.batch,
                loss: m.loss,
                train_accuracy: m.train_accuracy,
            })
        })
        .collect();
    let ensemble = ensemble_test_predictions(&alphas, &outcome.test_probs, test.len(), k, outcome.model.voting);

    let checkpoint = Checkpoint {
        format_version: CHECKPOINT_VERSION,
        kind: CheckpointKind::Ensemble,
        task: config.task,
        algorithm: Some(b.algorithm),
        model: outcome.model.clone(),
        rng: RngInfo::new(config.seed),
        provenance: provenance(config)?,
    };
    let hash = checkpoint.save(&dir.join(CHECKPOINT_FILE))?;
    write_csv(&dir.join(ROUNDS_FILE), &rows, &[])?;
    write_csv(&dir.join(STEPS_FILE), &steps, &["round", "step", "epoch", "batch", "loss", "train_accuracy"])?;
    write_predictions(&dir.join(PREDICTIONS_FILE), &test.labels, &member_preds, &ensemble, records)?;
    let summary = BoostSummary {
        task: config.task,
        algorithm: b.algorithm,
        members: outcome.model.len(),
        stopped_early: outcome.stopped_early,
        single_test_accuracy: outcome.single_test_accuracy(),
        test_accuracy: outcome.test_accuracy(),
        rounds: rows,
        checkpoint_hash: hash,
    };
    write_json(&dir.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}

/// Run the configured boosting algorithm; writes `<out>/boost`.
pub fn cmd_boost(config: &ExperimentConfig) -> Result<BoostSummary> {
    let arch = models(config)?;
    let data = load_prepared(config)?;
    let dir = config.out.join("boost");
    fs::create_dir_all(&dir)?;
    match (&arch, &data) {
        (Architecture::Qnn(a), TaskData::Mnist { train, test }) => {
            boost_task(config, &QnnModel::new(a.clone())?, arch.clone(), train, test, None, &dir)
        }
        (Architecture::Qcnn(a), TaskData::Phase { train, test, test_records }) => {
            boost_task(config, &QcnnModel::new(a.clone())?, arch.clone(), train, test, Some(test_records), &dir)
        }
        _ => unreachable!("architecture follows the task"),
    }
}

/// Evaluation report written to `<out>/evaluate/evaluation.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub checkpoint: PathBuf,
    pub checkpoint_hash: String,
    pub members: usize,
    #[serde(flatten)]
    pub evaluation: Evaluation,
}

/// Default checkpoint for `evaluate`: the ensemble if one exists, else the
/// single classifier.
pub fn default_checkpoint(config: &ExperimentConfig) -> PathBuf {
    let boost = config.out.join("boost").join(CHECKPOINT_FILE);
    if boost.exists() {
        boost
    } else {
        config.out.join("train").join(CHECKPOINT_FILE)
    }
}

/// Evaluate an ensemble on a labelled split.
pub fn evaluate_model<M: QuantumClassifier>(
    model: &M,
    ensemble: &EnsembleModel,
    split: &Split<M::Input>,
    resamples: usize,
    seed: u64,
) -> Result<Evaluation> {
    if model.n_classes() != ensemble.n_classes {
        return Err(Error::domain(format!(
            "checkpoint has {} classes but the dataset has {}",
            ensemble.n_classes,
            model.n_classes()
        )));
    }
    let preds = ensemble.predict(model, &split.inputs)?;
    evaluate_predictions(&preds, &split.labels, ensemble.n_classes, resamples, seed)
}

pub fn cmd_evaluate(config: &ExperimentConfig, checkpoint: Option<&Path>) -> Result<EvaluationReport> {
    let path = checkpoint.map(Path::to_path_buf).unwrap_or_else(|| default_checkpoint(config));
    let ckpt = Checkpoint::load(&path)?;
    if ckpt.task != config.task {
        return Err(Error::domain(format!(
            "checkpoint was trained for {:?} but the config runs {:?}",
            ckpt.task, config.task
        )));
    }
    check_classes(&ckpt.model.architecture, config.task)?;
    let data = load_prepared(config)?;
    let (resamples, seed) = (config.evaluate.bootstrap, config.seed);
    let evaluation = match (&ckpt.model.architecture, &data) {
        (Architecture::Qnn(a), TaskData::Mnist { test, .. }) => {
            evaluate_model(&QnnModel::new(a.clone())?, &ckpt.model, test, resamples, seed)?
        }
        (Architecture::Qcnn(a), TaskData::Phase { test, .. }) => {
            evaluate_model(&QcnnModel::new(a.clone())?, &ckpt.model, test, resamples, seed)?
        }
        _ => unreachable!("architecture follows the task"),
    };
    let report = EvaluationReport {
        checkpoint: path,
        checkpoint_hash: ckpt.content_hash()?,
        members: ckpt.model.len(),
        evaluation,
    };
    let dir = config.out.join("evaluate");
    fs::create_dir_all(&dir)?;
    write_json(&dir.join(EVALUATION_FILE), &report)?;
    Ok(report)
}
