use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{argmax, Architecture};
use crate::optim::QuantumClassifier;
use crate::{Error, Result};

/// How members' outputs are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Voting {
    /// `argmax_k Σ_l α_l P_k^{(l)}`.
    #[default]
    Soft,
    /// `argmax_k Σ_l α_l [ỹ_l = k]`.
    Hard,
}

/// One trained member of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakClassifierRecord {
    pub params: Vec<f64>,
    pub alpha: f64,
    pub c: f64,
    pub train_predictions: Vec<usize>,
    pub train_confidences: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub architecture: Architecture,
    pub voting: Voting,
    pub n_classes: usize,
    pub members: Vec<WeakClassifierRecord>,
}

/// Combined label from per-member class distributions, ties to the lowest
/// class index.
pub fn combine(alphas: &[f64], member_probs: &[&[f64]], n_classes: usize, voting: Voting) -> usize {
    let mut score = vec![0.0; n_classes];
    for (&a, probs) in alphas.iter().zip(member_probs) {
        match voting {
            Voting::Soft => score.iter_mut().zip(probs.iter()).for_each(|(s, p)| *s += a * p),
            Voting::Hard => score[argmax(probs)] += a,
        }
    }
    argmax(&score)
}

impl EnsembleModel {
    pub fn new(architecture: Architecture, voting: Voting) -> Self {
        let n_classes = architecture.n_classes();
        Self { architecture, voting, n_classes, members: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.alpha).collect()
    }

    /// Label from one class-probability row per member.
    pub fn predict_from_probs(&self, member_probs: &[&[f64]]) -> Result<usize> {
        if member_probs.len() != self.members.len() {
            return Err(Error::domain(format!(
                "{} probability rows for {} members",
                member_probs.len(),
                self.members.len()
            )));
        }
        if member_probs.iter().any(|p| p.len() != self.n_classes) {
            return Err(Error::domain("probability row length differs from the class count"));
        }
        Ok(combine(&self.alphas(), member_probs, self.n_classes, self.voting))
    }

    /// `probs[l][i]` is member `l`'s class distribution for sample `i`.
    pub fn predict_cached(&self, probs: &[Vec<Vec<f64>>]) -> Result<Vec<usize>> {
        let n = probs.first().map_or(0, Vec::len);
        (0..n)
            .map(|i| {
                let rows: Vec<&[f64]> = probs.iter().map(|m| m[i].as_slice()).collect();
                self.predict_from_probs(&rows)
            })
            .collect()
    }

    /// Class distributions of every member on every input.
    pub fn member_probs<M: QuantumClassifier>(&self, model: &M, inputs: &[M::Input]) -> Result<Vec<Vec<Vec<f64>>>> {
        self.members.iter().map(|m| member_probs(model, &m.params, inputs)).collect()
    }

    pub fn predict<M: QuantumClassifier>(&self, model: &M, inputs: &[M::Input]) -> Result<Vec<usize>> {
        self.predict_cached(&self.member_probs(model, inputs)?)
    }
}

/// One classifier's class distributions over a batch of inputs.
pub fn member_probs<M: QuantumClassifier>(model: &M, params: &[f64], inputs: &[M::Input]) -> Result<Vec<Vec<f64>>> {
    inputs.par_iter().map(|x| model.class_probs(params, x)).collect()
}

/// Weighted-vote prediction for a single sample; thin wrapper over
/// [`EnsembleModel::predict_from_probs`].
pub fn ensemble_predict(model: &EnsembleModel, member_probs: &[&[f64]]) -> Result<usize> {
    model.predict_from_probs(member_probs)
}

pub fn accuracy(predictions: &[usize], labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    predictions.iter().zip(labels).filter(|(p, y)| p == y).count() as f64 / labels.len() as f64
}
