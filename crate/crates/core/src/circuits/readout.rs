use serde::{Deserialize, Serialize};

use crate::sim::{measure_probs, ParameterizedCircuit, StateVector};
use crate::{Error, Result};

/// Grouping of the `2^m` computational-basis outcomes of the measured
/// qubits into `K` contiguous classes of `⌊2^m/K⌋` outcomes each. The
/// trailing `2^m − K⌊2^m/K⌋` outcomes belong to no class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadoutSpec {
    pub measured_qubits: Vec<usize>,
    pub n_classes: usize,
    pub group_size: usize,
    pub discarded: usize,
}

impl ReadoutSpec {
    pub fn new(measured_qubits: Vec<usize>, n_classes: usize) -> Result<Self> {
        let m = measured_qubits.len();
        if n_classes < 2 {
            return Err(Error::domain(format!("need at least two classes, got {n_classes}")));
        }
        if m == 0 || m >= usize::BITS as usize || (1usize << m) < n_classes {
            return Err(Error::domain(format!("{m} measured qubits cannot separate {n_classes} classes")));
        }
        for (i, q) in measured_qubits.iter().enumerate() {
            if measured_qubits[..i].contains(q) {
                return Err(Error::domain(format!("qubit {q} measured twice")));
            }
        }
        let outcomes = 1usize << m;
        let group_size = outcomes / n_classes;
        Ok(Self { measured_qubits, n_classes, group_size, discarded: outcomes - n_classes * group_size })
    }

    pub fn m(&self) -> usize {
        self.measured_qubits.len()
    }

    /// Class of an outcome index, or `None` for a discarded outcome.
    pub fn group_of(&self, outcome: usize) -> Option<usize> {
        let k = outcome / self.group_size;
        (k < self.n_classes).then_some(k)
    }

    /// Sum outcome probabilities into per-class probabilities.
    pub fn class_probs(&self, outcome_probs: &[f64]) -> Vec<f64> {
        outcome_probs[..self.n_classes * self.group_size]
            .chunks_exact(self.group_size)
            .map(|g| g.iter().sum())
            .collect()
    }

    /// Probability mass that fell on discarded outcomes.
    pub fn discarded_mass(&self, outcome_probs: &[f64]) -> f64 {
        outcome_probs[self.n_classes * self.group_size..].iter().sum()
    }

    /// Per-class probabilities straight from a state.
    pub fn state_class_probs(&self, state: &StateVector) -> Result<Vec<f64>> {
        Ok(self.class_probs(&measure_probs(state, &self.measured_qubits)?))
    }
}

/// Readout grouping for the first `m` qubits.
pub fn pvm_groups(m: usize, n_classes: usize) -> Result<ReadoutSpec> {
    ReadoutSpec::new((0..m).collect(), n_classes)
}

/// Predicted label, its probability, and the full class distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: usize,
    pub confidence: f64,
    pub class_probs: Vec<f64>,
}

impl Prediction {
    /// Argmax with ties resolved toward the lowest class index.
    pub fn from_class_probs(class_probs: Vec<f64>) -> Self {
        let label = argmax(&class_probs);
        Self { label, confidence: class_probs[label], class_probs }
    }
}

/// Index of the first maximal entry.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn classify(state: &StateVector, readout: &ReadoutSpec) -> Result<Prediction> {
    Ok(Prediction::from_class_probs(readout.state_class_probs(state)?))
}

/// Run `circuit` on `input` and classify the output.
pub fn classify_circuit(
    circuit: &ParameterizedCircuit,
    input: &StateVector,
    bindings: &[f64],
    readout: &ReadoutSpec,
) -> Result<Prediction> {
    classify(&circuit.run(input, bindings)?, readout)
}
