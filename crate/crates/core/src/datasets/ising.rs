use serde::{Deserialize, Serialize};

use crate::sim::{Pauli, PauliString, StateVector};
use crate::{Error, Result};

/// Field strengths of `H = -Σ Z_{j-1} X_j Z_{j+1} - h1 Σ X_j - h2 Σ X_j X_{j+1}`
/// on an open chain of `n_spins` spins. Spin `j` (1-based) is qubit `j - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterIsingParams {
    pub h1: f64,
    pub h2: f64,
    pub n_spins: usize,
}

impl ClusterIsingParams {
    pub fn new(h1: f64, h2: f64) -> Self {
        Self { h1, h2, n_spins: 15 }
    }
}

pub fn build_hamiltonian(p: &ClusterIsingParams) -> Result<Vec<PauliString>> {
    let n = p.n_spins;
    if n < 3 {
        return Err(Error::domain(format!("cluster-Ising chain needs at least 3 spins, got {n}")));
    }
    let mut terms = Vec::with_capacity(3 * n - 3);
    for j in 1..n - 1 {
        terms.push(PauliString::new(-1.0, &[(j - 1, Pauli::Z), (j, Pauli::X), (j + 1, Pauli::Z)])?);
    }
    for j in 0..n {
        terms.push(PauliString::new(-p.h1, &[(j, Pauli::X)])?);
    }
    for j in 0..n - 1 {
        terms.push(PauliString::new(-p.h2, &[(j, Pauli::X), (j + 1, Pauli::X)])?);
    }
    Ok(terms)
}

/// Site pattern of the string order parameter `Z_1 (Π X) Z_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StringPattern {
    /// X on every even site `2, 4, …, N-1`: the product of the cluster
    /// terms centred on even sites, so it equals 1 on the cluster state.
    #[default]
    EvenSites,
    /// X on even sites `4, 6, …, N-1`, leaving sites 2 and 3 bare.
    FromFour,
}

impl StringPattern {
    /// 1-based sites carrying an X.
    pub fn x_sites(self, n_spins: usize) -> Vec<usize> {
        let first = match self {
            StringPattern::EvenSites => 2,
            StringPattern::FromFour => 4,
        };
        (first..n_spins).step_by(2).collect()
    }

    pub fn operator(self, n_spins: usize) -> Result<PauliString> {
        if n_spins < 3 || n_spins % 2 == 0 {
            return Err(Error::domain(format!("string order needs an odd chain of at least 3 spins, got {n_spins}")));
        }
        let mut letters = vec![(0, Pauli::Z), (n_spins - 1, Pauli::Z)];
        letters.extend(self.x_sites(n_spins).into_iter().map(|s| (s - 1, Pauli::X)));
        PauliString::new(1.0, &letters)
    }
}

/// `(⟨S⟩, ⟨X_7 X_8⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderParameters {
    pub string: f64,
    pub x7x8: f64,
}

pub fn order_parameters(state: &StateVector, pattern: StringPattern) -> Result<OrderParameters> {
    if state.n_qubits() != 15 {
        return Err(Error::domain(format!("order parameters are defined on 15 spins, got {}", state.n_qubits())));
    }
    let s = pattern.operator(15)?;
    let xx = PauliString::new(1.0, &[(6, Pauli::X), (7, Pauli::X)])?;
    Ok(OrderParameters { string: s.expectation_unit(state)?, x7x8: xx.expectation_unit(state)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Spt,
    Paramagnetic,
    Ising,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Spt, Phase::Paramagnetic, Phase::Ising];

    /// Class index used by the classifiers.
    pub fn index(self) -> usize {
        match self {
            Phase::Spt => 0,
            Phase::Paramagnetic => 1,
            Phase::Ising => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Spt => "SPT",
            Phase::Paramagnetic => "PM",
            Phase::Ising => "Ising",
        }
    }
}

pub const STRING_THRESHOLD: f64 = 0.2;

/// Phase from the order parameters; `None` exactly on a threshold.
pub fn label_phase(order: OrderParameters) -> Option<Phase> {
    if order.string > STRING_THRESHOLD {
        Some(Phase::Spt)
    } else if order.string < STRING_THRESHOLD && order.x7x8 > 0.0 {
        Some(Phase::Paramagnetic)
    } else if order.string < STRING_THRESHOLD && order.x7x8 < 0.0 {
        Some(Phase::Ising)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn term_census() {
        let h = build_hamiltonian(&ClusterIsingParams { h1: 1.0, h2: 0.0, n_spins: 3 }).unwrap();
        assert_eq!(h.len(), 4 + 2);
        let nonzero: Vec<_> = h.iter().filter(|t| t.coefficient != 0.0).collect();
        assert_eq!(nonzero.len(), 4);
        assert_eq!(nonzero[0].terms.values().copied().collect::<Vec<_>>(), vec![Pauli::Z, Pauli::X, Pauli::Z]);
        assert_eq!(build_hamiltonian(&ClusterIsingParams::new(0.3, 0.2)).unwrap().len(), 13 + 15 + 14);
        assert!(build_hamiltonian(&ClusterIsingParams { h1: 0.0, h2: 0.0, n_spins: 2 }).is_err());
    }

    #[test]
    fn string_patterns() {
        assert_eq!(StringPattern::EvenSites.x_sites(15), vec![2, 4, 6, 8, 10, 12, 14]);
        assert_eq!(StringPattern::FromFour.x_sites(15), vec![4, 6, 8, 10, 12, 14]);
    }

    #[test]
    fn product_state_readings() {
        let plus = (Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0));
        let state = StateVector::product(&[plus; 15]).unwrap();
        let o = order_parameters(&state, StringPattern::default()).unwrap();
        assert!(o.string.abs() < 1e-12 && (o.x7x8 - 1.0).abs() < 1e-12);
        let o = order_parameters(&StateVector::zero(15), StringPattern::FromFour).unwrap();
        assert_eq!((o.string, o.x7x8), (0.0, 0.0));
        assert!(order_parameters(&StateVector::zero(5), StringPattern::default()).is_err());
    }

    #[test]
    fn labels() {
        let l = |s, x| label_phase(OrderParameters { string: s, x7x8: x });
        assert_eq!(l(0.9, 0.1), Some(Phase::Spt));
        assert_eq!(l(0.05, 0.8), Some(Phase::Paramagnetic));
        assert_eq!(l(0.05, -0.8), Some(Phase::Ising));
        assert_eq!(l(0.2, 0.5), None);
        assert_eq!(l(0.1, 0.0), None);
    }
}
