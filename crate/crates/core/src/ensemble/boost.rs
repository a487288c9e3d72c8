use serde::{Deserialize, Serialize};

use super::model::{accuracy, combine, EnsembleModel, Voting, WeakClassifierRecord};
use super::weights::{
    alpha_from_masses, confidence_masses, init_weights, samme_alpha, update_weights, update_weights_m1, weight_entropy,
    weighted_error, DEFAULT_ALPHA_CAP,
};
use crate::circuits::{argmax, Architecture};
use crate::optim::{train_classifier, QuantumClassifier, StepMetric, TrainConfig, WeightedDataset};
use crate::{Error, Result};

/// Candidate values `lo, lo + step, …, hi` for the classifier-weight factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for CGrid {
    fn default() -> Self {
        Self { lo: 0.5, hi: 2.0, step: 0.01 }
    }
}

impl CGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.step.is_nan() || self.step <= 0.0 || self.hi < self.lo {
            return vec![1.0];
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub rounds: usize,
    #[serde(default)]
    pub c_grid: CGrid,
    #[serde(default = "default_cap")]
    pub alpha_cap: f64,
    /// Stop once a round's classifier weight is not positive. A first
    /// round without positive weight always stops.
    #[serde(default = "yes")]
    pub early_stop: bool,
}

fn default_cap() -> f64 {
    DEFAULT_ALPHA_CAP
}

fn yes() -> bool {
    true
}

impl BoostConfig {
    pub fn new(rounds: usize) -> Self {
        Self { rounds, c_grid: CGrid::default(), alpha_cap: DEFAULT_ALPHA_CAP, early_stop: true }
    }
}

/// A trained member with its cached class distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedMember {
    pub params: Vec<f64>,
    pub train_probs: Vec<Vec<f64>>,
    pub test_probs: Option<Vec<Vec<f64>>>,
    pub metrics: Vec<StepMetric>,
}

/// Produces one weak classifier per boosting round.
pub trait WeakLearner {
    fn architecture(&self) -> Architecture;

    /// Train on the weighted training set of `round` (0-based).
    fn fit(&mut self, round: usize, weights: &[f64]) -> Result<FittedMember>;
}

/// [`WeakLearner`] backed by [`train_classifier`] with a per-round seed.
pub struct CircuitLearner<'a, M: QuantumClassifier> {
    pub model: &'a M,
    pub architecture: Architecture,
    pub train_inputs: &'a [M::Input],
    pub train_labels: &'a [usize],
    pub test_inputs: Option<&'a [M::Input]>,
    pub config: TrainConfig,
}

impl<M: QuantumClassifier> WeakLearner for CircuitLearner<'_, M> {
    fn architecture(&self) -> Architecture {
        self.architecture.clone()
    }

    fn fit(&mut self, round: usize, weights: &[f64]) -> Result<FittedMember> {
        let data = WeightedDataset::new(self.train_inputs, self.train_labels, weights)?;
        let config =
            TrainConfig { seed: crate::rng::child_seed(self.config.seed, round as u64), ..self.config.clone() };
        let outcome = train_classifier(self.model, data, &config)?;
        let train_probs = super::model::member_probs(self.model, &outcome.params, self.train_inputs)?;
        let test_probs = match self.test_inputs {
            Some(x) => Some(super::model::member_probs(self.model, &outcome.params, x)?),
            None => None,
        };
        Ok(FittedMember { params: outcome.params, train_probs, test_probs, metrics: outcome.metrics })
    }
}

/// Per-round summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    /// 1-based round number.
    pub round: usize,
    pub alpha: f64,
    pub c: f64,
    /// Whether the member joined the ensemble.
    pub accepted: bool,
    pub member_train_accuracy: f64,
    pub train_accuracy: f64,
    pub member_test_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    /// Entropy of the weights the member was trained on.
    pub weight_entropy: f64,
}

#[derive(Debug, Clone)]
pub struct BoostOutcome {
    pub model: EnsembleModel,
    pub rounds: Vec<RoundLog>,
    /// Sample weights each round trained on, then the weights after the
    /// last accepted update.
    pub weights: Vec<Vec<f64>>,
    pub metrics: Vec<Vec<StepMetric>>,
    pub train_probs: Vec<Vec<Vec<f64>>>,
    pub test_probs: Vec<Vec<Vec<f64>>>,
    pub stopped_early: bool,
}

impl BoostOutcome {
    pub fn test_accuracy(&self) -> Option<f64> {
        self.rounds.iter().rev().find(|r| r.accepted).and_then(|r| r.test_accuracy)
    }

    /// Test accuracy of the first member alone.
    pub fn single_test_accuracy(&self) -> Option<f64> {
        self.rounds.first().and_then(|r| r.member_test_accuracy)
    }
}

/// Outcome of the `c` search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CTuning {
    pub c: f64,
    pub alpha: f64,
    pub correct: usize,
    pub correct_at_one: usize,
}

fn predictions_and_confidences(probs: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    probs
        .iter()
        .map(|p| {
            let k = argmax(p);
            (k, p[k])
        })
        .unzip()
}

/// Pick `c` maximizing ensemble training accuracy once the new member
/// joins with weight `ln(c · P_true / P_false)`. Ties go to the `c`
/// closest to 1, then to the smaller `c`.
pub fn tune_c(
    partial_alphas: &[f64],
    partial_probs: &[&[Vec<f64>]],
    new_probs: &[Vec<f64>],
    masses: (f64, f64),
    labels: &[usize],
    grid: &CGrid,
    cap: f64,
) -> CTuning {
    let k = new_probs.first().map_or(0, Vec::len);
    let base: Vec<Vec<f64>> = (0..labels.len())
        .map(|i| {
            let mut s = vec![0.0; k];
            for (&a, member) in partial_alphas.iter().zip(partial_probs) {
                s.iter_mut().zip(&member[i]).for_each(|(s, p)| *s += a * p);
            }
            s
        })
        .collect();
    let correct_for = |alpha: f64| -> usize {
        (0..labels.len())
            .filter(|&i| {
                let score: Vec<f64> = base[i].iter().zip(&new_probs[i]).map(|(b, p)| b + alpha * p).collect();
                argmax(&score) == labels[i]
            })
            .count()
    };
    let alpha_at = |c: f64| alpha_from_masses(masses.0, masses.1, c, cap);
    let correct_at_one = correct_for(alpha_at(1.0));
    let mut best = CTuning { c: 1.0, alpha: alpha_at(1.0), correct: correct_at_one, correct_at_one };
    for c in grid.values() {
        let alpha = alpha_at(c);
        let correct = correct_for(alpha);
        let closer = (c - 1.0).abs() < (best.c - 1.0).abs() - 1e-12;
        let as_close = ((c - 1.0).abs() - (best.c - 1.0).abs()).abs() <= 1e-12;
        if correct > best.correct || (correct == best.correct && (closer || (as_close && c < best.c))) {
            best = CTuning { c, alpha, correct, correct_at_one };
        }
    }
    best
}

fn check_inputs(labels: &[usize], config: &BoostConfig) -> Result<()> {
    if config.rounds == 0 {
        return Err(Error::Config("boosting needs at least one round".into()));
    }
    init_weights(labels.len()).map(|_| ())
}

fn ensemble_accuracy(alphas: &[f64], probs: &[Vec<Vec<f64>>], labels: &[usize], k: usize, voting: Voting) -> f64 {
    let preds: Vec<usize> = (0..labels.len())
        .map(|i| {
            let rows: Vec<&[f64]> = probs.iter().map(|m| m[i].as_slice()).collect();
            combine(alphas, &rows, k, voting)
        })
        .collect();
    accuracy(&preds, labels)
}

struct Progress {
    outcome: BoostOutcome,
    alphas: Vec<f64>,
}

impl Progress {
    fn new(architecture: Architecture, voting: Voting) -> Self {
        Self {
            outcome: BoostOutcome {
                model: EnsembleModel::new(architecture, voting),
                rounds: Vec::new(),
                weights: Vec::new(),
                metrics: Vec::new(),
                train_probs: Vec::new(),
                test_probs: Vec::new(),
                stopped_early: false,
            },
            alphas: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        round: usize,
        member: FittedMember,
        alpha: f64,
        c: f64,
        accepted: bool,
        entropy: f64,
        train_labels: &[usize],
        test_labels: Option<&[usize]>,
    ) {
        let k = self.outcome.model.n_classes;
        let voting = self.outcome.model.voting;
        let (preds, confs) = predictions_and_confidences(&member.train_probs);
        let member_test_accuracy = match (&member.test_probs, test_labels) {
            (Some(p), Some(y)) => Some(accuracy(&predictions_and_confidences(p).0, y)),
            _ => None,
        };
        // A first member with no positive weight still forms the ensemble on
        // its own; it votes with unit weight so the ensemble of one is the
        // classifier itself rather than its inversion.
        let vote = if round == 0 && alpha <= 0.0 { 1.0 } else { alpha };
        if accepted {
            self.alphas.push(vote);
            self.outcome.train_probs.push(member.train_probs.clone());
            if let Some(p) = &member.test_probs {
                self.outcome.test_probs.push(p.clone());
            }
            self.outcome.model.members.push(WeakClassifierRecord {
                params: member.params,
                alpha: vote,
                c,
                train_predictions: preds.clone(),
                train_confidences: confs,
            });
        }
        let train_accuracy = ensemble_accuracy(&self.alphas, &self.outcome.train_probs, train_labels, k, voting);
        let test_accuracy = match test_labels {
            Some(y) if self.outcome.test_probs.len() == self.alphas.len() && !self.alphas.is_empty() => {
                Some(ensemble_accuracy(&self.alphas, &self.outcome.test_probs, y, k, voting))
            }
            _ => None,
        };
        let log = RoundLog {
            round: round + 1,
            alpha,
            c,
            accepted,
            member_train_accuracy: accuracy(&preds, train_labels),
            train_accuracy,
            member_test_accuracy,
            test_accuracy,
            weight_entropy: entropy,
        };
        log::info!(
            "round {}: alpha {:.4} c {:.2} member acc {:.4} ensemble train {:.4} test {:?}",
            log.round,
            alpha,
            c,
            log.member_train_accuracy,
            train_accuracy,
            test_accuracy
        );
        self.outcome.metrics.push(member.metrics);
        self.outcome.rounds.push(log);
    }
}

/// Confidence-weighted boosting with soft voting.
pub fn adaboost_q(
    learner: &mut dyn WeakLearner,
    train_labels: &[usize],
    test_labels: Option<&[usize]>,
    config: &BoostConfig,
) -> Result<BoostOutcome> {
    check_inputs(train_labels, config)?;
    let mut w = init_weights(train_labels.len())?;
    let mut progress = Progress::new(learner.architecture(), Voting::Soft);
    for round in 0..config.rounds {
        progress.outcome.weights.push(w.clone());
        let member = learner.fit(round, &w)?;
        check_probs(&member, train_labels.len())?;
        let (preds, confs) = predictions_and_confidences(&member.train_probs);
        let masses = confidence_masses(&w, &preds, &confs, train_labels);
        let (c, alpha) = if round == 0 {
            (1.0, alpha_from_masses(masses.0, masses.1, 1.0, config.alpha_cap))
        } else {
            let partial: Vec<&[Vec<f64>]> = progress.outcome.train_probs.iter().map(Vec::as_slice).collect();
            let t = tune_c(
                &progress.alphas,
                &partial,
                &member.train_probs,
                masses,
                train_labels,
                &config.c_grid,
                config.alpha_cap,
            );
            (t.c, t.alpha)
        };
        let entropy = weight_entropy(&w);
        let stop = alpha <= 0.0 && (config.early_stop || round == 0);
        // The first member always joins so the ensemble is never empty.
        let accepted = round == 0 || !stop;
        if stop {
            log::warn!("round {}: classifier weight {alpha:.4} is not positive; stopping", round + 1);
        }
        let next = update_weights(&w, &preds, &confs, train_labels)?;
        progress.record(round, member, alpha, c, accepted, entropy, train_labels, test_labels);
        if stop {
            progress.outcome.stopped_early = true;
            break;
        }
        w = next;
    }
    progress.outcome.weights.push(w);
    Ok(progress.outcome)
}

/// Multiclass AdaBoost with `ln((1−e)/e) + ln(K−1)` weights.
pub fn adaboost_m1(
    learner: &mut dyn WeakLearner,
    train_labels: &[usize],
    test_labels: Option<&[usize]>,
    config: &BoostConfig,
    voting: Voting,
) -> Result<BoostOutcome> {
    check_inputs(train_labels, config)?;
    let mut w = init_weights(train_labels.len())?;
    let mut progress = Progress::new(learner.architecture(), voting);
    let k = progress.outcome.model.n_classes;
    for round in 0..config.rounds {
        progress.outcome.weights.push(w.clone());
        let member = learner.fit(round, &w)?;
        check_probs(&member, train_labels.len())?;
        let (preds, _) = predictions_and_confidences(&member.train_probs);
        let error = weighted_error(&w, &preds, train_labels);
        let alpha = samme_alpha(error, k, config.alpha_cap);
        let entropy = weight_entropy(&w);
        let stop = alpha <= 0.0 && (config.early_stop || round == 0);
        let accepted = round == 0 || !stop;
        if stop {
            log::warn!("round {}: weighted error {error:.4} violates the weak-learner condition; stopping", round + 1);
        }
        let next = update_weights_m1(&w, &preds, train_labels, alpha)?;
        progress.record(round, member, alpha, 1.0, accepted, entropy, train_labels, test_labels);
        if stop {
            progress.outcome.stopped_early = true;
            break;
        }
        w = next;
    }
    progress.outcome.weights.push(w);
    Ok(progress.outcome)
}

fn check_probs(member: &FittedMember, n: usize) -> Result<()> {
    if member.train_probs.len() != n {
        return Err(Error::domain(format!(
            "weak learner returned {} training rows for {n} samples",
            member.train_probs.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_151_points_including_one() {
        let v = CGrid::default().values();
        assert_eq!(v.len(), 151);
        assert!(v.iter().any(|&c| (c - 1.0).abs() < 1e-12));
        assert!((v[150] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_member_keeps_c_at_one() {
        let probs = vec![vec![0.7, 0.3], vec![0.4, 0.6], vec![0.8, 0.2]];
        let labels = [0, 0, 0];
        let t = tune_c(&[0.5], &[&probs], &probs, (0.6, 0.2), &labels, &CGrid::default(), DEFAULT_ALPHA_CAP);
        assert_eq!(t.c, 1.0);
        assert_eq!(t.correct, t.correct_at_one);
    }
}
