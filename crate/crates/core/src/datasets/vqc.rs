use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::eigen::SpinOperator;
use super::ising::{label_phase, order_parameters, Phase, StringPattern};
use crate::optim::{OptimizerKind, OptimizerState};
use crate::rng::{derive, Stream};
use crate::sim::{Angle, GateOp, ParameterizedCircuit, PauliString, StateVector};
use crate::{Error, Result};

/// Hardware-efficient preparation circuit acting on `|0…0⟩`.
///
/// Each block is `RZ RX RZ` on every qubit, CZ on pairs `(0,1), (2,3), …`,
/// `RZ RX RZ` again, then CZ on pairs `(1,2), (3,4), …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VqcAnsatz {
    pub n_qubits: usize,
    pub blocks: usize,
}

impl VqcAnsatz {
    pub fn new(n_qubits: usize, blocks: usize) -> Self {
        Self { n_qubits, blocks }
    }

    pub fn n_params(&self) -> usize {
        6 * self.n_qubits * self.blocks
    }

    pub fn circuit(&self) -> Result<ParameterizedCircuit> {
        let n = self.n_qubits;
        let mut c = ParameterizedCircuit::new(n);
        let mut slot = 0;
        let mut euler_layer = |c: &mut ParameterizedCircuit| -> Result<()> {
            for q in 0..n {
                c.push(GateOp::Rz(q, Angle::Param(slot)))?;
                c.push(GateOp::Rx(q, Angle::Param(slot + 1)))?;
                c.push(GateOp::Rz(q, Angle::Param(slot + 2)))?;
                slot += 3;
            }
            Ok(())
        };
        for _ in 0..self.blocks {
            euler_layer(&mut c)?;
            for a in (0..n.saturating_sub(1)).step_by(2) {
                c.push(GateOp::Cz(a, a + 1))?;
            }
            euler_layer(&mut c)?;
            for a in (1..n.saturating_sub(1)).step_by(2) {
                c.push(GateOp::Cz(a, a + 1))?;
            }
        }
        Ok(c)
    }
}

fn pauli_sandwich(lambda: &[Complex64], psi: &[Complex64], gate: &GateOp) -> f64 {
    // Im ⟨λ| P_q |ψ⟩ for the generator P of a rotation on qubit q.
    let ([q, _], _) = gate.qubits();
    let mask = 1usize << q;
    let mut acc = Complex64::new(0.0, 0.0);
    match gate {
        GateOp::Rx(..) => {
            for (b, l) in lambda.iter().enumerate() {
                acc += l.conj() * psi[b ^ mask];
            }
        }
        GateOp::Ry(..) => {
            for (b, l) in lambda.iter().enumerate() {
                let f = if b & mask != 0 { Complex64::i() } else { -Complex64::i() };
                acc += l.conj() * psi[b ^ mask] * f;
            }
        }
        GateOp::Rz(..) => {
            for (b, l) in lambda.iter().enumerate() {
                let s = if b & mask != 0 { -1.0 } else { 1.0 };
                acc += l.conj() * psi[b] * s;
            }
        }
        _ => unreachable!("only rotations carry parameters"),
    }
    acc.im
}

fn inverse(gate: &GateOp, bindings: &[f64]) -> Result<GateOp> {
    Ok(match gate.angle() {
        Some(a) => gate.with_angle(Angle::Fixed(-a.resolve(bindings)?)),
        None => *gate,
    })
}

/// `⟨H⟩` and its gradient over every slot, by one forward pass and one
/// adjoint sweep.
pub fn energy_and_gradient(
    circuit: &ParameterizedCircuit,
    op: &SpinOperator,
    theta: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let mut psi = circuit.run(&StateVector::zero(circuit.n_qubits()), theta)?;
    let mut hpsi = vec![Complex64::new(0.0, 0.0); psi.dim()];
    op.apply(psi.amplitudes(), &mut hpsi);
    let energy: f64 = psi.amplitudes().iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum();
    let mut lambda = StateVector::from_raw(hpsi);
    let mut grad = vec![0.0; circuit.n_slots()];
    for gate in circuit.gates().iter().rev() {
        if let Some(slot) = gate.angle().and_then(Angle::slot) {
            grad[slot] += pauli_sandwich(lambda.amplitudes(), psi.amplitudes(), gate);
        }
        let inv = inverse(gate, theta)?;
        psi.apply_gate(&inv, theta)?;
        lambda.apply_gate(&inv, theta)?;
    }
    Ok((energy, grad))
}

/// Stopping and acceptance rules for variational preparation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VqcConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Converged once `|ΔE|` stays below this for `patience` iterations.
    pub energy_tolerance: f64,
    pub patience: usize,
    /// Accept only if `E − E_g` is below this.
    pub energy_gap: f64,
    pub max_attempts: usize,
}

impl Default for VqcConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            max_iterations: 3000,
            energy_tolerance: 5e-5,
            patience: 20,
            energy_gap: 0.5,
            max_attempts: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VqcOutcome {
    Accepted(Box<VqcPrepared>),
    Rejected { attempts: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqcPrepared {
    pub theta: Vec<f64>,
    pub state: StateVector,
    pub energy: f64,
    pub phase: Phase,
    pub attempts: usize,
    pub iterations: usize,
}

fn minimize(
    circuit: &ParameterizedCircuit,
    op: &SpinOperator,
    mut theta: Vec<f64>,
    config: &VqcConfig,
) -> Result<(Vec<f64>, f64, usize, bool)> {
    let mut opt = OptimizerState::new(OptimizerKind::Nadam, theta.len(), config.learning_rate, 0.9, 0.999);
    let mut previous = f64::INFINITY;
    let mut calm = 0;
    let mut energy = f64::INFINITY;
    for it in 0..config.max_iterations {
        let (e, g) = energy_and_gradient(circuit, op, &theta)?;
        energy = e;
        calm = if (e - previous).abs() < config.energy_tolerance { calm + 1 } else { 0 };
        if calm >= config.patience {
            return Ok((theta, energy, it, true));
        }
        previous = e;
        let delta = opt.step(&g)?;
        theta.iter_mut().zip(&delta).for_each(|(t, d)| *t += d);
    }
    Ok((theta, energy, config.max_iterations, false))
}

/// Minimize `⟨H⟩` over the ansatz and accept the result only if it
/// converged, lies within `energy_gap` of `exact_energy`, and carries the
/// `expected` phase label. Up to `max_attempts` tries: the first from
/// `warm_start` when given, the rest from fresh uniform `[-π, π)` angles.
#[allow(clippy::too_many_arguments)]
pub fn vqc_prepare(
    hamiltonian: &[PauliString],
    ansatz: &VqcAnsatz,
    exact_energy: f64,
    expected: Phase,
    pattern: StringPattern,
    config: &VqcConfig,
    warm_start: Option<&[f64]>,
    seed: u64,
) -> Result<VqcOutcome> {
    check_ansatz(ansatz)?;
    let circuit = ansatz.circuit()?;
    let op = SpinOperator::new(ansatz.n_qubits, hamiltonian)?;
    let mut rng = derive(seed, Stream::Vqc, 0);
    let mut reasons = Vec::new();
    for attempt in 0..config.max_attempts.max(1) {
        let init = match (attempt, warm_start) {
            (0, Some(w)) if w.len() == ansatz.n_params() => w.to_vec(),
            _ => (0..ansatz.n_params()).map(|_| rng.random_range(-PI..PI)).collect(),
        };
        let (theta, energy, iterations, converged) = minimize(&circuit, &op, init, config)?;
        let state = circuit.run(&StateVector::zero(ansatz.n_qubits), &theta)?;
        let phase =
            if ansatz.n_qubits == 15 { label_phase(order_parameters(&state, pattern)?) } else { Some(expected) };
        let reason = if !converged {
            Some(format!("no convergence in {iterations} iterations"))
        } else if energy - exact_energy >= config.energy_gap {
            Some(format!("energy {energy:.6} is {:.4} above exact", energy - exact_energy))
        } else if phase != Some(expected) {
            Some(format!("phase {phase:?}, expected {expected:?}"))
        } else {
            None
        };
        match reason {
            None => {
                return Ok(VqcOutcome::Accepted(Box::new(VqcPrepared {
                    theta,
                    state,
                    energy,
                    phase: expected,
                    attempts: attempt + 1,
                    iterations,
                })))
            }
            Some(r) => {
                log::debug!("vqc attempt {attempt}: {r}");
                reasons.push(r);
            }
        }
    }
    Ok(VqcOutcome::Rejected {
        attempts: config.max_attempts.max(1),
        reason: reasons.last().cloned().unwrap_or_default(),
    })
}

fn check_ansatz(ansatz: &VqcAnsatz) -> Result<()> {
    if ansatz.n_qubits < 2 || ansatz.blocks == 0 {
        return Err(Error::domain("ansatz needs at least two qubits and one block"));
    }
    Ok(())
}
