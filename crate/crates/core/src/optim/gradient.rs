use std::f64::consts::FRAC_PI_2;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::loss::clamp_probability;
use crate::circuits::ReadoutSpec;
use crate::sim::{Angle, CompiledCircuit, ParameterizedCircuit, StateVector};
use crate::{Error, Result};

/// How the trainer differentiates the loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum GradientMode {
    /// Exact `±π/2` shift of every occurrence of a parameter.
    ParameterShift,
    /// Symmetric difference of `ln P_y` with step `epsilon`.
    FiniteDifference { epsilon: f64 },
}

/// A circuit, its input state, readout and the label whose probability is
/// being differentiated.
#[derive(Debug, Clone, Copy)]
pub struct ProbeTarget<'a> {
    pub circuit: &'a ParameterizedCircuit,
    pub input: &'a StateVector,
    pub readout: &'a ReadoutSpec,
    pub label: usize,
}

impl<'a> ProbeTarget<'a> {
    /// Class probabilities with an optional single-gate angle shift.
    pub fn class_probs(&self, bindings: &[f64], shift: Option<(usize, f64)>) -> Result<Vec<f64>> {
        let compiled = self.circuit.compile(bindings, shift)?;
        let mut state = self.input.clone();
        compiled.apply(&mut state);
        self.readout.state_class_probs(&state)
    }
}

/// The unshifted forward pass cut into segments, with the state entering
/// each segment kept so a shifted evaluation only replays the segments at
/// and after the shift.
struct Replay<'t, 'a> {
    target: &'t ProbeTarget<'a>,
    bindings: &'t [f64],
    bounds: Vec<Range<usize>>,
    compiled: Vec<CompiledCircuit>,
    entry: Vec<StateVector>,
    class_probs: Vec<f64>,
}

const SEGMENTS: usize = 32;

impl<'t, 'a> Replay<'t, 'a> {
    fn new(target: &'t ProbeTarget<'a>, bindings: &'t [f64]) -> Result<Self> {
        let len = target.circuit.len();
        let per = len.div_ceil(SEGMENTS).max(1);
        let bounds: Vec<Range<usize>> = (0..len).step_by(per).map(|s| s..(s + per).min(len)).collect();
        let mut compiled = Vec::with_capacity(bounds.len());
        let mut entry = Vec::with_capacity(bounds.len());
        let mut state = target.input.clone();
        for r in &bounds {
            let c = target.circuit.compile_range(bindings, r.clone(), None)?;
            entry.push(state.clone());
            c.apply(&mut state);
            compiled.push(c);
        }
        let class_probs = target.readout.state_class_probs(&state)?;
        Ok(Self { target, bindings, bounds, compiled, entry, class_probs })
    }

    fn segment_of(&self, gate: usize) -> usize {
        self.bounds.iter().position(|r| r.contains(&gate)).expect("gate inside the circuit")
    }

    fn label_prob(&self, state: &StateVector) -> Result<f64> {
        Ok(self.target.readout.state_class_probs(state)?[self.target.label])
    }

    /// `P_y` with one gate occurrence shifted by `delta`.
    fn shifted_gate(&self, gate: usize, delta: f64) -> Result<f64> {
        let s = self.segment_of(gate);
        let mut state = self.entry[s].clone();
        self.target
            .circuit
            .compile_range(self.bindings, self.bounds[s].clone(), Some((gate, delta)))?
            .apply(&mut state);
        for c in &self.compiled[s + 1..] {
            c.apply(&mut state);
        }
        self.label_prob(&state)
    }

    /// `P_y` under different bindings that agree with the originals on
    /// every gate before `first_gate`.
    fn rebound(&self, bindings: &[f64], first_gate: usize, slot: usize) -> Result<f64> {
        let s = self.segment_of(first_gate);
        let mut state = self.entry[s].clone();
        let gates = self.target.circuit.gates();
        for (t, r) in self.bounds.iter().enumerate().skip(s) {
            let touched = gates[r.clone()].iter().any(|g| g.angle().and_then(Angle::slot) == Some(slot));
            if touched {
                self.target.circuit.compile_range(bindings, r.clone(), None)?.apply(&mut state);
            } else {
                self.compiled[t].apply(&mut state);
            }
        }
        self.label_prob(&state)
    }
}

/// Loss gradient with respect to a list of slots, plus the unshifted
/// class distribution it was computed around.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotGradient {
    pub grad: Vec<f64>,
    pub class_probs: Vec<f64>,
    /// Shifted circuit evaluations spent (the unshifted one is not counted).
    pub evaluations: usize,
}

fn check_label(target: &ProbeTarget<'_>) -> Result<()> {
    if target.label >= target.readout.n_classes {
        return Err(Error::domain(format!("label {} outside {} classes", target.label, target.readout.n_classes)));
    }
    Ok(())
}

/// `∂(-w ln P_y)/∂θ_s` for each slot `s`, by the parameter-shift rule.
///
/// A slot that appears in several rotations is differentiated by the
/// product rule, shifting one occurrence at a time, so the cost is two
/// evaluations per occurrence.
pub fn grad_parameter_shift(
    target: &ProbeTarget<'_>,
    bindings: &[f64],
    slots: &[usize],
    weight: f64,
) -> Result<SlotGradient> {
    check_label(target)?;
    let replay = Replay::new(target, bindings)?;
    let p_y = clamp_probability(replay.class_probs[target.label]);
    let mut evaluations = 0;
    let mut grad = Vec::with_capacity(slots.len());
    for &slot in slots {
        let mut dp = 0.0;
        for gate in target.circuit.slot_occurrences(slot) {
            let plus = replay.shifted_gate(gate, FRAC_PI_2)?;
            let minus = replay.shifted_gate(gate, -FRAC_PI_2)?;
            dp += (plus - minus) / 2.0;
            evaluations += 2;
        }
        grad.push(-weight / p_y * dp);
    }
    Ok(SlotGradient { grad, class_probs: replay.class_probs, evaluations })
}

/// `∂(-w ln P_y)/∂θ_s` by the symmetric difference quotient of `ln P_y`
/// with step `epsilon`, shifting every occurrence of the slot together.
pub fn grad_finite_difference(
    target: &ProbeTarget<'_>,
    bindings: &[f64],
    slots: &[usize],
    weight: f64,
    epsilon: f64,
) -> Result<SlotGradient> {
    check_label(target)?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::domain(format!("finite-difference step must be positive, got {epsilon}")));
    }
    let replay = Replay::new(target, bindings)?;
    let mut shifted = bindings.to_vec();
    let mut grad = Vec::with_capacity(slots.len());
    for &slot in slots {
        let Some(&first) = target.circuit.slot_occurrences(slot).first() else {
            grad.push(0.0);
            continue;
        };
        let original = shifted[slot];
        shifted[slot] = original + epsilon;
        let plus = clamp_probability(replay.rebound(&shifted, first, slot)?);
        shifted[slot] = original - epsilon;
        let minus = clamp_probability(replay.rebound(&shifted, first, slot)?);
        shifted[slot] = original;
        grad.push(-weight * (plus.ln() - minus.ln()) / (2.0 * epsilon));
    }
    Ok(SlotGradient { grad, class_probs: replay.class_probs, evaluations: 2 * slots.len() })
}

/// Chain rule through `x = W v`: `∇_W = ∇_x vᵀ`, row-major
/// `grad_x.len() × v.len()`.
pub fn grad_encoding_matrix(grad_x: &[f64], v: &[f64], expected: (usize, usize)) -> Result<Vec<f64>> {
    if (grad_x.len(), v.len()) != expected {
        return Err(Error::domain(format!(
            "encoding gradient shape mismatch: got ({}, {}), expected {:?}",
            grad_x.len(),
            v.len(),
            expected
        )));
    }
    let mut out = Vec::with_capacity(grad_x.len() * v.len());
    for &g in grad_x {
        out.extend(v.iter().map(|&vj| g * vj));
    }
    Ok(out)
}
