use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// `coefficient · ⊗_q P_q`. An empty term map is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub terms: BTreeMap<usize, Pauli>,
    pub coefficient: f64,
}

impl PauliString {
    pub fn new(coefficient: f64, letters: &[(usize, Pauli)]) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for &(q, p) in letters {
            if terms.insert(q, p).is_some() {
                return Err(Error::domain(format!("qubit {q} appears twice in a Pauli string")));
            }
        }
        Ok(Self { terms, coefficient })
    }

    pub fn identity(coefficient: f64) -> Self {
        Self { terms: BTreeMap::new(), coefficient }
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    /// `(x_mask, z_mask, y_count)` with `P|b⟩ = i^{y} (-1)^{|b ∧ z|} |b ⊕ x⟩`.
    fn masks(&self) -> (usize, usize, u32) {
        let (mut x, mut z, mut y) = (0usize, 0usize, 0u32);
        for (&q, &p) in &self.terms {
            match p {
                Pauli::X => x |= 1 << q,
                Pauli::Z => z |= 1 << q,
                Pauli::Y => {
                    x |= 1 << q;
                    z |= 1 << q;
                    y += 1;
                }
            }
        }
        (x, z, y)
    }

    fn check(&self, n_qubits: usize) -> Result<()> {
        if let Some(q) = self.max_qubit() {
            if q >= n_qubits {
                return Err(Error::domain(format!("Pauli string touches qubit {q} of a {n_qubits}-qubit state")));
            }
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` without the coefficient.
    pub fn expectation_unit(&self, state: &StateVector) -> Result<f64> {
        self.check(state.n_qubits())?;
        let (x, z, y) = self.masks();
        let amps = state.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in amps.iter().enumerate() {
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += amps[b ^ x].conj() * a * sign;
        }
        Ok((acc * i_pow(y)).re)
    }

    /// `dst += scale · coefficient · P · src`.
    pub fn apply_add(&self, src: &[Complex64], dst: &mut [Complex64], scale: f64) {
        let (x, z, y) = self.masks();
        let phase = i_pow(y) * (scale * self.coefficient);
        for (b, a) in src.iter().enumerate() {
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            dst[b ^ x] += a * phase * sign;
        }
    }
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `Σ_terms coefficient · ⟨ψ|P|ψ⟩`.
pub fn expectation(state: &StateVector, observable: &[PauliString]) -> Result<f64> {
    observable.iter().map(|p| Ok(p.coefficient * p.expectation_unit(state)?)).sum()
}
