use serde::{Deserialize, Serialize};

use super::readout::ReadoutSpec;
use crate::sim::{Angle, GateOp, ParameterizedCircuit};
use crate::{Error, Result};

/// Order of the two rotations each qubit receives per layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QnnGateOrder {
    /// `RX(x)` then `RZ(θ)`.
    #[default]
    DataFirst,
    /// `RZ(θ)` then `RX(x)`.
    TrainableFirst,
}

/// Layered chain classifier: every layer puts one data rotation and one
/// trainable rotation on each qubit, and consecutive layers are joined by
/// a nearest-neighbour CNOT layer (even pairs first, then odd pairs).
///
/// Slot layout of [`template`](Self::template): data angles occupy slots
/// `0..encoding_dim`, trainable angles `encoding_dim..2·encoding_dim`, both
/// indexed `layer · n_qubits + qubit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QnnArchitecture {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub n_classes: usize,
    /// Qubits read out for classification, low bit first.
    pub measured_qubits: Vec<usize>,
    #[serde(default)]
    pub gate_order: QnnGateOrder,
}

impl Default for QnnArchitecture {
    fn default() -> Self {
        Self {
            n_qubits: 10,
            n_layers: 3,
            n_classes: 10,
            measured_qubits: (0..10).collect(),
            gate_order: QnnGateOrder::DataFirst,
        }
    }
}

impl QnnArchitecture {
    pub fn encoding_dim(&self) -> usize {
        self.n_qubits * self.n_layers
    }

    pub fn n_params(&self) -> usize {
        self.n_qubits * self.n_layers
    }

    pub fn readout(&self) -> Result<ReadoutSpec> {
        for &q in &self.measured_qubits {
            if q >= self.n_qubits {
                return Err(Error::domain(format!("measured qubit {q} outside the QNN register")));
            }
        }
        ReadoutSpec::new(self.measured_qubits.clone(), self.n_classes)
    }

    pub fn data_slot(&self, i: usize) -> usize {
        i
    }

    pub fn theta_slot(&self, i: usize) -> usize {
        self.encoding_dim() + i
    }

    /// CNOT pairs inserted after layer `boundary`.
    pub fn entangler_pairs(&self, boundary: usize) -> Vec<(usize, usize)> {
        (boundary % 2..self.n_qubits.saturating_sub(1)).step_by(2).map(|q| (q, q + 1)).collect()
    }

    pub fn template(&self) -> Result<ParameterizedCircuit> {
        if self.n_qubits == 0 || self.n_layers == 0 {
            return Err(Error::domain("QNN needs at least one qubit and one layer"));
        }
        let mut c = ParameterizedCircuit::new(self.n_qubits);
        for layer in 0..self.n_layers {
            for q in 0..self.n_qubits {
                let i = layer * self.n_qubits + q;
                let data = GateOp::Rx(q, Angle::Param(self.data_slot(i)));
                let trainable = GateOp::Rz(q, Angle::Param(self.theta_slot(i)));
                match self.gate_order {
                    QnnGateOrder::DataFirst => {
                        c.push(data)?;
                        c.push(trainable)?;
                    }
                    QnnGateOrder::TrainableFirst => {
                        c.push(trainable)?;
                        c.push(data)?;
                    }
                }
            }
            if layer + 1 < self.n_layers {
                for (a, b) in self.entangler_pairs(layer) {
                    c.push(GateOp::Cnot { control: a, target: b })?;
                }
            }
        }
        Ok(c)
    }

    /// Concatenate data and trainable angles into a binding vector.
    pub fn bindings(&self, x: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.encoding_dim() {
            return Err(Error::domain(format!("QNN expects {} data angles, got {}", self.encoding_dim(), x.len())));
        }
        if theta.len() != self.n_params() {
            return Err(Error::domain(format!(
                "QNN expects {} trainable angles, got {}",
                self.n_params(),
                theta.len()
            )));
        }
        Ok(x.iter().chain(theta).copied().collect())
    }
}

/// The QNN circuit template and the bindings for `(x, θ)`.
pub fn build_qnn(arch: &QnnArchitecture, x: &[f64], theta: &[f64]) -> Result<(ParameterizedCircuit, Vec<f64>)> {
    let bindings = arch.bindings(x, theta)?;
    Ok((arch.template()?, bindings))
}
