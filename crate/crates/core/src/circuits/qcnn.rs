use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::readout::ReadoutSpec;
use crate::sim::{Angle, GateOp, ParameterizedCircuit};
use crate::{Error, Result};

/// Angles per two-qubit convolution kernel.
pub const KERNEL_PARAMS: usize = 15;

/// Convolutional classifier over a chain: `conv_layers` rounds of
/// (convolution, pooling) followed by a CZ between the two survivors.
///
/// Each convolution applies one shared 15-angle kernel to adjacent active
/// pairs twice: first on pairs starting at even positions of the active
/// list, then on pairs starting at odd positions. Pooling applies
/// `CNOT(active[2j] → active[2j+1])` and drops the controls; an unpaired
/// last qubit passes through.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QcnnArchitecture {
    pub n_qubits: usize,
    pub conv_layers: usize,
    pub n_classes: usize,
}

impl Default for QcnnArchitecture {
    fn default() -> Self {
        Self { n_qubits: 15, conv_layers: 3, n_classes: 3 }
    }
}

/// Gate-index spans of every kernel instance, grouped by conv layer.
#[derive(Debug, Clone)]
pub struct QcnnLayout {
    pub conv_kernels: Vec<Vec<Range<usize>>>,
    pub active_trace: Vec<usize>,
}

/// Append one kernel on `(a, b)` reading angles from slots
/// `offset..offset + 15`.
///
/// Slot order: `a` gets `RZ RY RZ` (0–2), `b` gets `RZ RY RZ` (3–5);
/// `CNOT(b→a)`; `RZ` on `a` (6) and `RY` on `b` (7); `CNOT(a→b)`; `RY` on
/// `b` (8); `CNOT(b→a)`; closing `RZ RY RZ` on `a` (9–11) and on `b`
/// (12–14). Seven single-qubit gates, three CNOTs.
pub fn conv_kernel(c: &mut ParameterizedCircuit, a: usize, b: usize, offset: usize) -> Result<()> {
    let p = |i: usize| Angle::Param(offset + i);
    let euler = |c: &mut ParameterizedCircuit, q: usize, first: usize| -> Result<()> {
        c.push(GateOp::Rz(q, p(first)))?;
        c.push(GateOp::Ry(q, p(first + 1)))?;
        c.push(GateOp::Rz(q, p(first + 2)))
    };
    euler(c, a, 0)?;
    euler(c, b, 3)?;
    c.push(GateOp::Cnot { control: b, target: a })?;
    c.push(GateOp::Rz(a, p(6)))?;
    c.push(GateOp::Ry(b, p(7)))?;
    c.push(GateOp::Cnot { control: a, target: b })?;
    c.push(GateOp::Ry(b, p(8)))?;
    c.push(GateOp::Cnot { control: b, target: a })?;
    euler(c, a, 9)?;
    euler(c, b, 12)
}

impl QcnnArchitecture {
    pub fn n_params(&self) -> usize {
        KERNEL_PARAMS * self.conv_layers
    }

    /// Active-qubit counts: input width, then after each pooling layer.
    pub fn active_trace(&self) -> Vec<usize> {
        let mut trace = vec![self.n_qubits];
        let mut n = self.n_qubits;
        for _ in 0..self.conv_layers {
            n = n.div_ceil(2);
            trace.push(n);
        }
        trace
    }

    fn final_active(&self) -> Vec<usize> {
        let mut active: Vec<usize> = (0..self.n_qubits).collect();
        for _ in 0..self.conv_layers {
            active = pool_survivors(&active);
        }
        active
    }

    pub fn readout(&self) -> Result<ReadoutSpec> {
        ReadoutSpec::new(self.final_active(), self.n_classes)
    }

    pub fn template(&self) -> Result<ParameterizedCircuit> {
        Ok(self.template_with_layout()?.0)
    }

    pub fn template_with_layout(&self) -> Result<(ParameterizedCircuit, QcnnLayout)> {
        if self.n_qubits < 2 || self.conv_layers == 0 {
            return Err(Error::domain("QCNN needs at least two qubits and one conv layer"));
        }
        let mut c = ParameterizedCircuit::new(self.n_qubits);
        let mut active: Vec<usize> = (0..self.n_qubits).collect();
        let mut layout = QcnnLayout { conv_kernels: Vec::new(), active_trace: vec![active.len()] };
        for layer in 0..self.conv_layers {
            let offset = layer * KERNEL_PARAMS;
            let mut spans = Vec::new();
            for start in [0usize, 1] {
                for j in (start..active.len().saturating_sub(1)).step_by(2) {
                    let from = c.len();
                    conv_kernel(&mut c, active[j], active[j + 1], offset)?;
                    spans.push(from..c.len());
                }
            }
            layout.conv_kernels.push(spans);
            for j in (0..active.len().saturating_sub(1)).step_by(2) {
                c.push(GateOp::Cnot { control: active[j], target: active[j + 1] })?;
            }
            active = pool_survivors(&active);
            layout.active_trace.push(active.len());
        }
        if active.len() == 2 {
            c.push(GateOp::Cz(active[0], active[1]))?;
        }
        c.reserve_slots(self.n_params());
        Ok((c, layout))
    }
}

fn pool_survivors(active: &[usize]) -> Vec<usize> {
    let mut next: Vec<usize> = active.chunks(2).map(|p| *p.last().unwrap()).collect();
    next.dedup();
    next
}

/// The QCNN circuit template and its bindings (the angles themselves).
pub fn build_qcnn(arch: &QcnnArchitecture, theta: &[f64]) -> Result<(ParameterizedCircuit, Vec<f64>)> {
    if theta.len() != arch.n_params() {
        return Err(Error::domain(format!("QCNN expects {} angles, got {}", arch.n_params(), theta.len())));
    }
    Ok((arch.template()?, theta.to_vec()))
}
