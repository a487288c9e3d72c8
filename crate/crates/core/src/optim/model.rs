use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::gradient::{
    grad_encoding_matrix, grad_finite_difference, grad_parameter_shift, GradientMode, ProbeTarget, SlotGradient,
};
use crate::circuits::{Prediction, QcnnArchitecture, QnnArchitecture, ReadoutSpec};
use crate::datasets::{encode_pixels, ImageSample, PIXELS};
use crate::sim::{ParameterizedCircuit, StateVector};
use crate::{Error, Result};

/// Per-sample loss gradient of a classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    /// Gradient over the circuit's trainable angles.
    pub theta: Vec<f64>,
    /// Gradient over the encoding matrix (QNN only), row-major.
    pub encoding: Option<Vec<f64>>,
    /// Unshifted class probabilities of the sample.
    pub class_probs: Vec<f64>,
    /// Shifted circuit evaluations spent.
    pub circuit_evaluations: usize,
}

impl GradientReport {
    /// Gradient in the model's flat parameter layout.
    pub fn flat(&self) -> Vec<f64> {
        let mut g = self.theta.clone();
        if let Some(w) = &self.encoding {
            g.extend_from_slice(w);
        }
        g
    }
}

/// A trainable circuit classifier over a flat parameter vector.
pub trait QuantumClassifier: Send + Sync {
    type Input: Send + Sync;

    fn n_params(&self) -> usize;

    fn readout(&self) -> &ReadoutSpec;

    fn n_classes(&self) -> usize {
        self.readout().n_classes
    }

    /// Draw an initial parameter vector.
    fn init_params(&self, rng: &mut dyn rand::RngCore) -> Vec<f64>;

    fn class_probs(&self, params: &[f64], input: &Self::Input) -> Result<Vec<f64>>;

    fn predict(&self, params: &[f64], input: &Self::Input) -> Result<Prediction> {
        Ok(Prediction::from_class_probs(self.class_probs(params, input)?))
    }

    /// Gradient of `-weight · ln P_label` with respect to every parameter.
    fn loss_gradient(
        &self,
        params: &[f64],
        input: &Self::Input,
        label: usize,
        weight: f64,
        mode: GradientMode,
    ) -> Result<GradientReport>;
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::domain(format!("{what}: expected {want} parameters, got {got}")));
    }
    Ok(())
}

fn slot_gradient(
    target: &ProbeTarget<'_>,
    bindings: &[f64],
    slots: &[usize],
    weight: f64,
    mode: GradientMode,
) -> Result<SlotGradient> {
    match mode {
        GradientMode::ParameterShift => grad_parameter_shift(target, bindings, slots, weight),
        GradientMode::FiniteDifference { epsilon } => grad_finite_difference(target, bindings, slots, weight, epsilon),
    }
}

/// Image classifier: `x = W · pixels/255²` feeds the data rotations of a
/// [`QnnArchitecture`]. Parameters are laid out as `[θ | W]` with `W`
/// row-major `encoding_dim × 784`.
#[derive(Debug, Clone)]
pub struct QnnModel {
    arch: QnnArchitecture,
    template: ParameterizedCircuit,
    readout: ReadoutSpec,
    vacuum: StateVector,
}

impl QnnModel {
    pub fn new(arch: QnnArchitecture) -> Result<Self> {
        let template = arch.template()?;
        let readout = arch.readout()?;
        let vacuum = StateVector::zero(arch.n_qubits);
        Ok(Self { arch, template, readout, vacuum })
    }

    pub fn arch(&self) -> &QnnArchitecture {
        &self.arch
    }

    pub fn template(&self) -> &ParameterizedCircuit {
        &self.template
    }

    pub fn encoding_len(&self) -> usize {
        self.arch.encoding_dim() * PIXELS
    }

    /// Split a flat parameter vector into `(θ, W)`.
    pub fn split<'p>(&self, params: &'p [f64]) -> Result<(&'p [f64], &'p [f64])> {
        check_len("QNN", params.len(), self.n_params())?;
        Ok(params.split_at(self.arch.n_params()))
    }

    /// Binding vector `[x | θ]` for one image.
    pub fn bindings(&self, params: &[f64], image: &ImageSample) -> Result<(Vec<f64>, Vec<f64>)> {
        let (theta, w) = self.split(params)?;
        let v = image.normalized();
        let x = encode_pixels(&v, w, self.arch.encoding_dim())?;
        Ok((self.arch.bindings(&x, theta)?, v))
    }
}

impl QuantumClassifier for QnnModel {
    type Input = ImageSample;

    fn n_params(&self) -> usize {
        self.arch.n_params() + self.encoding_len()
    }

    fn readout(&self) -> &ReadoutSpec {
        &self.readout
    }

    /// θ ~ N(π, (π/3)²), W ~ N(π/60, (π/180)²) elementwise.
    fn init_params(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        let theta = Normal::new(PI, PI / 3.0).expect("valid normal");
        let w = Normal::new(PI / 60.0, PI / 180.0).expect("valid normal");
        let mut params: Vec<f64> = (0..self.arch.n_params()).map(|_| theta.sample(rng)).collect();
        params.extend((0..self.encoding_len()).map(|_| w.sample(rng)));
        params
    }

    fn class_probs(&self, params: &[f64], input: &ImageSample) -> Result<Vec<f64>> {
        let (bindings, _) = self.bindings(params, input)?;
        let compiled = self.template.compile(&bindings, None)?;
        let mut state = self.vacuum.clone();
        compiled.apply(&mut state);
        self.readout.state_class_probs(&state)
    }

    fn loss_gradient(
        &self,
        params: &[f64],
        input: &ImageSample,
        label: usize,
        weight: f64,
        mode: GradientMode,
    ) -> Result<GradientReport> {
        let (bindings, v) = self.bindings(params, input)?;
        let target = ProbeTarget { circuit: &self.template, input: &self.vacuum, readout: &self.readout, label };
        let dim = self.arch.encoding_dim();
        // Data slots first, then trainable slots: one gradient call covers both.
        let slots: Vec<usize> = (0..dim)
            .map(|i| self.arch.data_slot(i))
            .chain((0..self.arch.n_params()).map(|i| self.arch.theta_slot(i)))
            .collect();
        let g = slot_gradient(&target, &bindings, &slots, weight, mode)?;
        let (grad_x, grad_theta) = g.grad.split_at(dim);
        let encoding = grad_encoding_matrix(grad_x, &v, (dim, PIXELS))?;
        Ok(GradientReport {
            theta: grad_theta.to_vec(),
            encoding: Some(encoding),
            class_probs: g.class_probs,
            circuit_evaluations: g.evaluations,
        })
    }
}

/// Quantum-data classifier: the input state is fed straight into a
/// [`QcnnArchitecture`] circuit. Parameters are the 45 shared kernel angles.
#[derive(Debug, Clone)]
pub struct QcnnModel {
    arch: QcnnArchitecture,
    template: ParameterizedCircuit,
    readout: ReadoutSpec,
}

impl QcnnModel {
    pub fn new(arch: QcnnArchitecture) -> Result<Self> {
        let template = arch.template()?;
        let readout = arch.readout()?;
        Ok(Self { arch, template, readout })
    }

    pub fn arch(&self) -> &QcnnArchitecture {
        &self.arch
    }

    pub fn template(&self) -> &ParameterizedCircuit {
        &self.template
    }
}

impl QuantumClassifier for QcnnModel {
    type Input = StateVector;

    fn n_params(&self) -> usize {
        self.arch.n_params()
    }

    fn readout(&self) -> &ReadoutSpec {
        &self.readout
    }

    /// Uniform on `[-π, π)`.
    fn init_params(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        (0..self.n_params()).map(|_| rng.random_range(-PI..PI)).collect()
    }

    fn class_probs(&self, params: &[f64], input: &StateVector) -> Result<Vec<f64>> {
        check_len("QCNN", params.len(), self.n_params())?;
        self.readout.state_class_probs(&self.template.run(input, params)?)
    }

    fn loss_gradient(
        &self,
        params: &[f64],
        input: &StateVector,
        label: usize,
        weight: f64,
        mode: GradientMode,
    ) -> Result<GradientReport> {
        check_len("QCNN", params.len(), self.n_params())?;
        if input.n_qubits() != self.arch.n_qubits {
            return Err(Error::domain(format!(
                "QCNN expects {}-qubit inputs, got {}",
                self.arch.n_qubits,
                input.n_qubits()
            )));
        }
        let target = ProbeTarget { circuit: &self.template, input, readout: &self.readout, label };
        let slots: Vec<usize> = (0..self.n_params()).collect();
        let g = slot_gradient(&target, params, &slots, weight, mode)?;
        Ok(GradientReport {
            theta: g.grad,
            encoding: None,
            class_probs: g.class_probs,
            circuit_evaluations: g.evaluations,
        })
    }
}
