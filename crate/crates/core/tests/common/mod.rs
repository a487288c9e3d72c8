//! Independent dense-matrix oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qboost::sim::{GateOp, Pauli, PauliString, StateVector};
use rand::Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn id2() -> DMatrix<C> {
    DMatrix::identity(2, 2)
}

pub fn pauli_matrix(p: Pauli) -> DMatrix<C> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

/// `exp(-iθA/2) = cos(θ/2) I - i sin(θ/2) A` for a Pauli `A`.
pub fn rotation(axis: Pauli, theta: f64) -> DMatrix<C> {
    id2() * c((theta / 2.0).cos(), 0.0) - pauli_matrix(axis) * c(0.0, (theta / 2.0).sin())
}

/// `ops[q]` acts on qubit `q`; qubit 0 is the rightmost Kronecker factor.
pub fn kron_chain(ops: &[DMatrix<C>]) -> DMatrix<C> {
    let mut out = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for op in ops.iter().rev() {
        out = out.kronecker(op);
    }
    out
}

pub fn embed(n: usize, q: usize, u: &DMatrix<C>) -> DMatrix<C> {
    let ops: Vec<DMatrix<C>> = (0..n).map(|k| if k == q { u.clone() } else { id2() }).collect();
    kron_chain(&ops)
}

/// `|0⟩⟨0|_a ⊗ I + |1⟩⟨1|_a ⊗ U_b`.
pub fn controlled(n: usize, control: usize, target: usize, u: &DMatrix<C>) -> DMatrix<C> {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    let p0 = DMatrix::from_row_slice(2, 2, &[l, o, o, o]);
    let p1 = DMatrix::from_row_slice(2, 2, &[o, o, o, l]);
    let id = id2();
    let mut a: Vec<DMatrix<C>> = vec![id.clone(); n];
    a[control] = p0;
    let mut b: Vec<DMatrix<C>> = vec![id; n];
    b[control] = p1;
    b[target] = u.clone();
    kron_chain(&a) + kron_chain(&b)
}

pub fn dense_gate(n: usize, gate: &GateOp, bindings: &[f64]) -> DMatrix<C> {
    let angle = |a: qboost::sim::Angle| a.resolve(bindings).expect("bound angle");
    match *gate {
        GateOp::Rx(q, a) => embed(n, q, &rotation(Pauli::X, angle(a))),
        GateOp::Ry(q, a) => embed(n, q, &rotation(Pauli::Y, angle(a))),
        GateOp::Rz(q, a) => embed(n, q, &rotation(Pauli::Z, angle(a))),
        GateOp::Cnot { control, target } => controlled(n, control, target, &pauli_matrix(Pauli::X)),
        GateOp::Cz(a, b) => controlled(n, a, b, &pauli_matrix(Pauli::Z)),
    }
}

pub fn dense_unitary(n: usize, gates: &[GateOp], bindings: &[f64]) -> DMatrix<C> {
    let mut u = DMatrix::identity(1 << n, 1 << n);
    for g in gates {
        u = dense_gate(n, g, bindings) * u;
    }
    u
}

pub fn dense_apply(u: &DMatrix<C>, state: &StateVector) -> Vec<C> {
    let v = DVector::from_column_slice(state.amplitudes());
    (u * v).iter().copied().collect()
}

pub fn dense_pauli(n: usize, p: &PauliString) -> DMatrix<C> {
    let ops: Vec<DMatrix<C>> = (0..n).map(|q| p.terms.get(&q).map_or_else(id2, |&l| pauli_matrix(l))).collect();
    kron_chain(&ops) * c(p.coefficient, 0.0)
}

pub fn max_amplitude_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Random gate on `n ≥ 2` qubits with a literal angle.
pub fn random_gate<R: Rng>(n: usize, rng: &mut R) -> GateOp {
    use qboost::sim::Angle;
    let q = rng.random_range(0..n);
    let mut other = rng.random_range(0..n - 1);
    if other >= q {
        other += 1;
    }
    let theta = Angle::Fixed(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI) * 2.0);
    match rng.random_range(0..5) {
        0 => GateOp::Rx(q, theta),
        1 => GateOp::Ry(q, theta),
        2 => GateOp::Rz(q, theta),
        3 => GateOp::Cnot { control: q, target: other },
        _ => GateOp::Cz(q, other),
    }
}

/// Marginal over `qubits` by looping over every basis index and reading bits.
pub fn brute_marginal(amplitudes: &[C], qubits: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << qubits.len()];
    for (i, a) in amplitudes.iter().enumerate() {
        let mut j = 0;
        for (b, &q) in qubits.iter().enumerate() {
            if (i >> q) & 1 == 1 {
                j |= 1 << b;
            }
        }
        out[j] += a.norm_sqr();
    }
    out
}

/// Gate-by-gate evolution with index arithmetic only, no fusion and no
/// library kernels. Works at any width where the dense oracle cannot.
pub fn naive_evolve(amplitudes: &[C], gates: &[GateOp], bindings: &[f64]) -> Vec<C> {
    let mut psi = amplitudes.to_vec();
    for g in gates {
        match *g {
            GateOp::Rx(q, a) | GateOp::Ry(q, a) | GateOp::Rz(q, a) => {
                let axis = match g {
                    GateOp::Rx(..) => Pauli::X,
                    GateOp::Ry(..) => Pauli::Y,
                    _ => Pauli::Z,
                };
                let u = rotation(axis, a.resolve(bindings).expect("bound angle"));
                for i in 0..psi.len() {
                    if (i >> q) & 1 == 0 {
                        let j = i | (1 << q);
                        let (a0, a1) = (psi[i], psi[j]);
                        psi[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                        psi[j] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
                    }
                }
            }
            GateOp::Cnot { control, target } => {
                for i in 0..psi.len() {
                    if (i >> control) & 1 == 1 && (i >> target) & 1 == 0 {
                        psi.swap(i, i | (1 << target));
                    }
                }
            }
            GateOp::Cz(a, b) => {
                for (i, amp) in psi.iter_mut().enumerate() {
                    if (i >> a) & 1 == 1 && (i >> b) & 1 == 1 {
                        *amp = -*amp;
                    }
                }
            }
        }
    }
    psi
}

/// Class probabilities from outcome probabilities by summing contiguous
/// groups of `⌊2^m / K⌋` outcomes.
pub fn group_probs(outcomes: &[f64], k: usize) -> Vec<f64> {
    let size = outcomes.len() / k;
    (0..k).map(|g| outcomes[g * size..(g + 1) * size].iter().sum()).collect()
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let amps: Vec<C> = (0..1usize << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    StateVector::normalized(amps).expect("non-zero vector")
}

/// `coefficient · word |ψ⟩`, one letter at a time with the 2×2 matrices.
pub fn naive_pauli_apply(amplitudes: &[C], p: &PauliString) -> Vec<C> {
    let mut phi = amplitudes.to_vec();
    for (&q, &l) in &p.terms {
        let u = pauli_matrix(l);
        for i in 0..phi.len() {
            if (i >> q) & 1 == 0 {
                let j = i | (1 << q);
                let (a, b) = (phi[i], phi[j]);
                phi[i] = u[(0, 0)] * a + u[(0, 1)] * b;
                phi[j] = u[(1, 0)] * a + u[(1, 1)] * b;
            }
        }
    }
    phi.iter_mut().for_each(|a| *a *= p.coefficient);
    phi
}

pub fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
