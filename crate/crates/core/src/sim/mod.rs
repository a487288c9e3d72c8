//! Dense statevector simulation.
//!
//! Basis index convention: qubit `q` is bit `q` of the basis index, so
//! qubit 0 is the least-significant bit. Rotations follow
//! `R_A(θ) = exp(-i θ A / 2)` for `A ∈ {X, Y, Z}`.

mod circuit;
mod gate;
mod kernels;
mod pauli;
mod state;

pub use circuit::{CompiledCircuit, ParameterizedCircuit};
pub use gate::{Angle, GateOp, Mat2};
pub use pauli::{expectation, Pauli, PauliString};
pub use state::{measure_probs, StateVector, MAX_QUBITS};

/// Convenience wrapper for the free-function form of gate application.
pub fn apply_gate(mut state: StateVector, gate: &GateOp) -> crate::Result<StateVector> {
    state.apply_gate(gate, &[])?;
    Ok(state)
}

/// Apply every gate of `circuit` in order, with symbolic slots bound from
/// `bindings` (slot `i` takes `bindings[i]`).
pub fn apply_circuit(
    mut state: StateVector,
    circuit: &ParameterizedCircuit,
    bindings: &[f64],
) -> crate::Result<StateVector> {
    circuit.apply(&mut state, bindings)?;
    Ok(state)
}
