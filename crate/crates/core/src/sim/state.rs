use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::gate::GateOp;
use super::kernels;
use crate::{Error, Result};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 26;

/// Normalized amplitudes over the `2^n` computational basis states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        Self::new_basis_state(n_qubits, 0).expect("index 0 is always valid")
    }

    /// Computational basis state `|basis_index⟩`.
    pub fn new_basis_state(n_qubits: usize, basis_index: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::domain(format!("{n_qubits} qubits exceeds the simulator limit of {MAX_QUBITS}")));
        }
        let dim = 1usize << n_qubits;
        if basis_index >= dim {
            return Err(Error::domain(format!("basis index {basis_index} out of range for {n_qubits} qubits")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[basis_index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wrap raw amplitudes. The length must be a power of two and the
    /// squared norm must be 1 within `1e-8`.
    /// Wrap a power-of-two buffer without a norm check, for intermediate
    /// vectors such as `H|ψ⟩`.
    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        debug_assert!(amplitudes.len().is_power_of_two());
        Self { n_qubits: amplitudes.len().trailing_zeros() as usize, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::domain(format!("amplitude array length {len} is not a power of two")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::domain(format!("{n_qubits} qubits exceeds the simulator limit")));
        }
        let state = Self { n_qubits, amplitudes };
        let norm = state.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-8 {
            return Err(Error::domain(format!("state is not normalized (|ψ|² = {norm})")));
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales instead
    /// of rejecting an unnormalized (nonzero) vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amplitudes)
    }

    /// Haar-like random state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << n_qubits;
        let amps = (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        Self::normalized(amps).expect("gaussian vector is nonzero")
    }

    /// Tensor product of single-qubit states, `qubit_states[q]` being the
    /// `(amp0, amp1)` pair of qubit `q`.
    pub fn product(qubit_states: &[(Complex64, Complex64)]) -> Result<Self> {
        let n = qubit_states.len();
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for (q, &(a0, a1)) in qubit_states.iter().enumerate() {
            let mut next = vec![Complex64::new(0.0, 0.0); amps.len() * 2];
            let stride = 1usize << q;
            for (i, amp) in amps.iter().enumerate() {
                next[i] = amp * a0;
                next[i + stride] = amp * a1;
            }
            amps = next;
        }
        debug_assert_eq!(amps.len(), 1 << n);
        Self::normalized(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::domain(format!("qubit index {q} out of range for a {}-qubit state", self.n_qubits)));
        }
        Ok(())
    }

    /// Apply one gate in place. Symbolic angles are looked up in `bindings`.
    pub fn apply_gate(&mut self, gate: &GateOp, bindings: &[f64]) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            GateOp::Rx(q, angle) | GateOp::Ry(q, angle) => {
                let m = gate.matrix(angle.resolve(bindings)?).expect("rotation has a matrix");
                kernels::apply_mat2(&mut self.amplitudes, q, &m);
            }
            GateOp::Rz(q, angle) => {
                let (d0, d1) = super::gate::rz_phases(angle.resolve(bindings)?);
                kernels::apply_diag(&mut self.amplitudes, q, d0, d1);
            }
            GateOp::Cnot { control, target } => kernels::apply_cnot(&mut self.amplitudes, control, target),
            GateOp::Cz(a, b) => kernels::apply_cz(&mut self.amplitudes, a, b),
        }
        Ok(())
    }

    /// Born-rule probabilities of the measured qubits; see [`measure_probs`].
    pub fn measure_probs(&self, measured_qubits: &[usize]) -> Result<Vec<f64>> {
        measure_probs(self, measured_qubits)
    }
}

/// Marginal outcome distribution over `measured_qubits`.
///
/// Bit `b` of the outcome index is the value of `measured_qubits[b]`.
pub fn measure_probs(state: &StateVector, measured_qubits: &[usize]) -> Result<Vec<f64>> {
    let m = measured_qubits.len();
    if m == 0 {
        return Err(Error::domain("at least one qubit must be measured"));
    }
    for (i, &q) in measured_qubits.iter().enumerate() {
        state.check_qubit(q)?;
        if measured_qubits[..i].contains(&q) {
            return Err(Error::domain(format!("qubit {q} listed twice in the measurement")));
        }
    }
    let mut probs = vec![0.0; 1 << m];
    let identity = measured_qubits.iter().enumerate().all(|(b, &q)| b == q);
    if identity {
        // Measured qubits are the low bits in order: outcome = index mod 2^m.
        let mask = (1usize << m) - 1;
        for (i, a) in state.amplitudes.iter().enumerate() {
            probs[i & mask] += a.norm_sqr();
        }
    } else {
        for (i, a) in state.amplitudes.iter().enumerate() {
            let mut outcome = 0usize;
            for (b, &q) in measured_qubits.iter().enumerate() {
                outcome |= ((i >> q) & 1) << b;
            }
            probs[outcome] += a.norm_sqr();
        }
    }
    Ok(probs)
}
