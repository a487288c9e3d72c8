use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::{OptimizerKind, OptimizerState};
use super::gradient::GradientMode;
use super::loss::sample_loss;
use super::model::QuantumClassifier;
use crate::circuits::Prediction;
use crate::rng::{derive, Stream};
use crate::{Error, Result};

/// Hyperparameters of one weak-classifier training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    pub gradient_mode: GradientMode,
    pub seed: u64,
}

impl TrainConfig {
    pub fn qnn_default() -> Self {
        Self {
            epochs: 7,
            batch_size: 30,
            learning_rate: 0.5,
            beta1: 0.9,
            beta2: 0.999,
            optimizer: OptimizerKind::Adam,
            gradient_mode: GradientMode::ParameterShift,
            seed: 0,
        }
    }

    pub fn qcnn_default() -> Self {
        Self {
            epochs: 5,
            batch_size: 29,
            learning_rate: 0.02,
            beta1: 0.9,
            beta2: 0.999,
            optimizer: OptimizerKind::Adam,
            gradient_mode: GradientMode::FiniteDifference { epsilon: 0.2 },
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::Config(format!("invalid learning rate {}", self.learning_rate)));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::Config(format!("{name} must lie in [0, 1), got {b}")));
            }
        }
        Ok(())
    }
}

/// Borrowed view of a training set with per-sample weights.
#[derive(Debug)]
pub struct WeightedDataset<'a, I> {
    pub inputs: &'a [I],
    pub labels: &'a [usize],
    pub weights: &'a [f64],
}

// Only references inside, so copyable whatever `I` is.
impl<I> Clone for WeightedDataset<'_, I> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<I> Copy for WeightedDataset<'_, I> {}

impl<'a, I> WeightedDataset<'a, I> {
    pub fn new(inputs: &'a [I], labels: &'a [usize], weights: &'a [f64]) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::domain("training set is empty"));
        }
        if labels.len() != inputs.len() || weights.len() != inputs.len() {
            return Err(Error::domain(format!(
                "dataset length mismatch: {} inputs, {} labels, {} weights",
                inputs.len(),
                labels.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::domain("sample weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::domain(format!("sample weights sum to {total}, expected 1")));
        }
        Ok(Self { inputs, labels, weights })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// One optimizer step of the metric log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMetric {
    pub step: usize,
    pub epoch: usize,
    pub batch: usize,
    /// Weighted loss summed over the batch, before the step.
    pub loss: f64,
    /// Fraction of the batch classified correctly, before the step.
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: Vec<f64>,
    pub metrics: Vec<StepMetric>,
    pub circuit_evaluations: usize,
}

/// Train from a seeded initialization; see [`train_classifier_with`].
pub fn train_classifier<M: QuantumClassifier>(
    model: &M,
    data: WeightedDataset<'_, M::Input>,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    train_classifier_with(model, data, config, None, |_, _| {})
}

/// Shuffle, split into `ceil(N / batch_size)` batches, and take one
/// optimizer step per batch on the summed per-sample gradients.
///
/// `init` overrides the seeded initialization. `on_step` sees every metric
/// row together with the parameters after that step.
pub fn train_classifier_with<M: QuantumClassifier>(
    model: &M,
    data: WeightedDataset<'_, M::Input>,
    config: &TrainConfig,
    init: Option<Vec<f64>>,
    mut on_step: impl FnMut(&StepMetric, &[f64]),
) -> Result<TrainOutcome> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::domain("training set is empty"));
    }
    let n_params = model.n_params();
    let mut params = match init {
        Some(p) if p.len() != n_params => {
            return Err(Error::domain(format!("initial parameters have {} entries, model needs {n_params}", p.len())))
        }
        Some(p) => p,
        None => model.init_params(&mut derive(config.seed, Stream::Init, 0)),
    };
    let mut optimizer =
        OptimizerState::new(config.optimizer, n_params, config.learning_rate, config.beta1, config.beta2);
    let mut shuffle_rng = derive(config.seed, Stream::Shuffle, 0);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut metrics = Vec::new();
    let mut evaluations = 0;
    let mut step = 0;

    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        for (batch, idx) in order.chunks(config.batch_size).enumerate() {
            let reports = idx
                .par_iter()
                .map(|&i| {
                    model.loss_gradient(&params, &data.inputs[i], data.labels[i], data.weights[i], config.gradient_mode)
                })
                .collect::<Result<Vec<_>>>()?;

            let mut grad = vec![0.0; n_params];
            let mut loss = 0.0;
            let mut correct = 0usize;
            for (report, &i) in reports.iter().zip(idx) {
                for (g, r) in grad.iter_mut().zip(report.flat()) {
                    *g += r;
                }
                loss += sample_loss(&report.class_probs, data.labels[i], data.weights[i]);
                if Prediction::from_class_probs(report.class_probs.clone()).label == data.labels[i] {
                    correct += 1;
                }
                evaluations += report.circuit_evaluations;
            }
            let delta = optimizer.step(&grad)?;
            for (p, d) in params.iter_mut().zip(&delta) {
                *p += d;
            }
            let metric = StepMetric { step, epoch, batch, loss, train_accuracy: correct as f64 / idx.len() as f64 };
            log::debug!("step {step} epoch {epoch} batch {batch}: loss {loss:.6} acc {:.3}", metric.train_accuracy);
            on_step(&metric, &params);
            metrics.push(metric);
            step += 1;
        }
    }
    Ok(TrainOutcome { params, metrics, circuit_evaluations: evaluations })
}
