use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::{mat2_mul, Angle, GateOp, Mat2, MAT2_IDENTITY};
use super::kernels;
use super::state::StateVector;
use crate::{Error, Result};

/// Ordered gate list over `n_qubits` with `n_slots` symbolic parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterizedCircuit {
    n_qubits: usize,
    n_slots: usize,
    gates: Vec<GateOp>,
}

impl ParameterizedCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, n_slots: 0, gates: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of symbolic slots (one past the highest referenced slot).
    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if let Some(slot) = gate.angle().and_then(Angle::slot) {
            self.n_slots = self.n_slots.max(slot + 1);
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Reserve slots that no gate references yet.
    pub fn reserve_slots(&mut self, n_slots: usize) {
        self.n_slots = self.n_slots.max(n_slots);
    }

    pub fn extend(&mut self, other: &ParameterizedCircuit) -> Result<()> {
        for g in &other.gates {
            self.push(*g)?;
        }
        Ok(())
    }

    /// Indices of the gates whose angle is slot `slot`.
    pub fn slot_occurrences(&self, slot: usize) -> Vec<usize> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.angle().and_then(Angle::slot) == Some(slot))
            .map(|(i, _)| i)
            .collect()
    }

    fn check_bindings(&self, bindings: &[f64]) -> Result<()> {
        if bindings.len() < self.n_slots {
            return Err(Error::Binding { slot: bindings.len(), bound: bindings.len() });
        }
        Ok(())
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::domain(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        Ok(())
    }

    /// Gate-by-gate application in program order.
    pub fn apply(&self, state: &mut StateVector, bindings: &[f64]) -> Result<()> {
        self.check_state(state)?;
        self.check_bindings(bindings)?;
        for g in &self.gates {
            state.apply_gate(g, bindings)?;
        }
        Ok(())
    }

    /// Bind every slot and fuse the circuit into a short op list: runs of
    /// single-qubit gates become one 2×2 matrix, and a two-qubit gate absorbs
    /// the neighbouring gates on its pair into one 4×4 matrix.
    /// `shift = Some((gate_index, delta))` adds `delta` to the angle of one
    /// gate occurrence (used by parameter-shift rules).
    pub fn compile(&self, bindings: &[f64], shift: Option<(usize, f64)>) -> Result<CompiledCircuit> {
        self.compile_range(bindings, 0..self.gates.len(), shift)
    }

    /// [`compile`](Self::compile) restricted to `gates[range]`.
    pub fn compile_range(
        &self,
        bindings: &[f64],
        range: std::ops::Range<usize>,
        shift: Option<(usize, f64)>,
    ) -> Result<CompiledCircuit> {
        self.check_bindings(bindings)?;
        if range.end > self.gates.len() || range.start > range.end {
            return Err(Error::domain(format!("gate range {range:?} outside {} gates", self.gates.len())));
        }
        let mut fuser = Fuser::new(self.n_qubits);
        for i in range {
            let gate = self.gates[i];
            match gate {
                GateOp::Rx(q, a) | GateOp::Ry(q, a) | GateOp::Rz(q, a) => {
                    let mut theta = a.resolve(bindings)?;
                    if let Some((idx, delta)) = shift {
                        if idx == i {
                            theta += delta;
                        }
                    }
                    fuser.single(q, gate.matrix(theta).expect("rotation"));
                }
                GateOp::Cnot { control, target } => fuser.pair(Op::Cnot(control, target)),
                GateOp::Cz(a, b) => fuser.pair(Op::Cz(a, b)),
            }
        }
        Ok(CompiledCircuit { n_qubits: self.n_qubits, ops: fuser.finish() })
    }

    /// Bind, fuse and run on a copy of `input`.
    pub fn run(&self, input: &StateVector, bindings: &[f64]) -> Result<StateVector> {
        self.check_state(input)?;
        let compiled = self.compile(bindings, None)?;
        let mut state = input.clone();
        compiled.apply(&mut state);
        Ok(state)
    }
}

/// Row-major 4×4 matrix on a qubit pair `(a, b)`; local index
/// `bit_a + 2·bit_b`.
type Mat4 = [Complex64; 16];

#[derive(Debug, Clone)]
enum Op {
    Mat(usize, Mat2),
    Diag(usize, Complex64, Complex64),
    Cnot(usize, usize),
    Cz(usize, usize),
    Pair(usize, usize, Box<Mat4>),
}

impl Op {
    fn single(q: usize, m: Mat2) -> Op {
        if m[1] == Complex64::new(0.0, 0.0) && m[2] == Complex64::new(0.0, 0.0) {
            Op::Diag(q, m[0], m[3])
        } else {
            Op::Mat(q, m)
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [ZERO; 16];
    for r in 0..4 {
        for c in 0..4 {
            out[4 * r + c] = (0..4).map(|k| a[4 * r + k] * b[4 * k + c]).sum();
        }
    }
    out
}

/// `m` acting on local bit `bit` of a pair.
fn embed_single(m: &Mat2, bit: usize) -> Mat4 {
    let mut out = [ZERO; 16];
    for r in 0..4 {
        for c in 0..4 {
            let (rb, cb) = ((r >> bit) & 1, (c >> bit) & 1);
            if (r ^ c) & !(1 << bit) & 3 == 0 {
                out[4 * r + c] = m[2 * rb + cb];
            }
        }
    }
    out
}

/// A two-qubit gate as a matrix on the pair `(a, b)`.
fn embed_pair(op: &Op, a: usize) -> Mat4 {
    let local = |q: usize| usize::from(q != a);
    let mut out = [ZERO; 16];
    match *op {
        Op::Cnot(c, t) => {
            let (cb, tb) = (local(c), local(t));
            for col in 0..4 {
                let row = if (col >> cb) & 1 == 1 { col ^ (1 << tb) } else { col };
                out[4 * row + col] = ONE;
            }
        }
        Op::Cz(..) => {
            for k in 0..4 {
                out[5 * k] = if k == 3 { -ONE } else { ONE };
            }
        }
        _ => unreachable!("only two-qubit gates are embedded"),
    }
    out
}

/// Greedy fusion with one open two-qubit block at a time.
struct Fuser {
    ops: Vec<Op>,
    pending: Vec<Option<Mat2>>,
    block: Option<Block>,
}

struct Block {
    a: usize,
    b: usize,
    m: Mat4,
    /// The lone gate, while nothing else has been absorbed.
    lone: Option<Op>,
}

impl Fuser {
    fn new(n_qubits: usize) -> Self {
        Self { ops: Vec::new(), pending: vec![None; n_qubits], block: None }
    }

    fn single(&mut self, q: usize, m: Mat2) {
        if let Some(block) = self.block.as_mut() {
            if q == block.a || q == block.b {
                block.m = mat4_mul(&embed_single(&m, usize::from(q == block.b)), &block.m);
                block.lone = None;
                return;
            }
        }
        let acc = self.pending[q].unwrap_or(MAT2_IDENTITY);
        self.pending[q] = Some(mat2_mul(&m, &acc));
    }

    fn pair(&mut self, op: Op) {
        let (x, y) = match op {
            Op::Cnot(c, t) => (c, t),
            Op::Cz(a, b) => (a, b),
            _ => unreachable!("pair() takes two-qubit gates"),
        };
        if let Some(block) = self.block.as_mut() {
            if (x == block.a || x == block.b) && (y == block.a || y == block.b) {
                block.m = mat4_mul(&embed_pair(&op, block.a), &block.m);
                block.lone = None;
                return;
            }
        }
        self.close();
        let (a, b) = (x.min(y), x.max(y));
        let mut m = embed_pair(&op, a);
        let mut lone = Some(op);
        for (q, bit) in [(a, 0), (b, 1)] {
            if let Some(p) = self.pending[q].take() {
                m = mat4_mul(&m, &embed_single(&p, bit));
                lone = None;
            }
        }
        self.block = Some(Block { a, b, m, lone });
    }

    fn close(&mut self) {
        if let Some(block) = self.block.take() {
            self.ops.push(match block.lone {
                Some(op) => op,
                None => Op::Pair(block.a, block.b, Box::new(block.m)),
            });
        }
    }

    fn finish(mut self) -> Vec<Op> {
        self.close();
        for q in 0..self.pending.len() {
            if let Some(m) = self.pending[q].take() {
                self.ops.push(Op::single(q, m));
            }
        }
        self.ops
    }
}

/// A fully bound circuit with fused gate runs.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    n_qubits: usize,
    ops: Vec<Op>,
}

impl CompiledCircuit {
    pub fn n_ops(&self) -> usize {
        self.ops.len()
    }

    pub fn apply(&self, state: &mut StateVector) {
        assert_eq!(state.n_qubits(), self.n_qubits, "compiled circuit width mismatch");
        let amps = state.amplitudes_mut();
        for op in &self.ops {
            match *op {
                Op::Mat(q, ref m) => kernels::apply_mat2(amps, q, m),
                Op::Diag(q, d0, d1) => {
                    if d0 != Complex64::new(1.0, 0.0) || d1 != Complex64::new(1.0, 0.0) {
                        kernels::apply_diag(amps, q, d0, d1)
                    }
                }
                Op::Cnot(c, t) => kernels::apply_cnot(amps, c, t),
                Op::Cz(a, b) => kernels::apply_cz(amps, a, b),
                Op::Pair(a, b, ref m) => kernels::apply_mat4(amps, a, b, m),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_circuit(n: usize, len: usize, rng: &mut ChaCha8Rng) -> ParameterizedCircuit {
        let mut c = ParameterizedCircuit::new(n);
        for i in 0..len {
            let q = rng.random_range(0..n);
            let mut r = rng.random_range(0..n);
            while n > 1 && r == q {
                r = rng.random_range(0..n);
            }
            let a = if i % 3 == 0 { Angle::Param(i % 7) } else { Angle::Fixed(rng.random_range(-3.0..3.0)) };
            let g = match rng.random_range(0..5) {
                0 => GateOp::Rx(q, a),
                1 => GateOp::Ry(q, a),
                2 => GateOp::Rz(q, a),
                3 if n > 1 => GateOp::Cnot { control: q, target: r },
                _ if n > 1 => GateOp::Cz(q, r),
                _ => GateOp::Rz(q, a),
            };
            c.push(g).unwrap();
        }
        c
    }

    #[test]
    fn compiled_matches_gate_by_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            let c = random_circuit(n, 80, &mut rng);
            let bindings: Vec<f64> = (0..7).map(|_| rng.random_range(-3.0..3.0)).collect();
            let input = StateVector::random(n, &mut rng);
            let mut slow = input.clone();
            c.apply(&mut slow, &bindings).unwrap();
            let fast = c.run(&input, &bindings).unwrap();
            for (a, b) in slow.amplitudes().iter().zip(fast.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unbound_slot_is_an_error() {
        let mut c = ParameterizedCircuit::new(1);
        c.push(GateOp::Rx(0, Angle::Param(2))).unwrap();
        let mut s = StateVector::zero(1);
        assert!(matches!(c.apply(&mut s, &[0.1, 0.2]), Err(Error::Binding { .. })));
        assert!(c.compile(&[0.1], None).is_err());
    }

    #[test]
    fn empty_circuit_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = StateVector::random(3, &mut rng);
        let c = ParameterizedCircuit::new(3);
        assert_eq!(c.run(&s, &[]).unwrap(), s);
    }

    #[test]
    fn half_rotations_compose() {
        let theta = 1.234;
        let mut two = ParameterizedCircuit::new(1);
        two.push(GateOp::Rx(0, Angle::Fixed(theta / 2.0))).unwrap();
        two.push(GateOp::Rx(0, Angle::Fixed(theta / 2.0))).unwrap();
        let mut one = ParameterizedCircuit::new(1);
        one.push(GateOp::Rx(0, Angle::Fixed(theta))).unwrap();
        let s = StateVector::zero(1);
        let (mut a, mut b) = (s.clone(), s);
        two.apply(&mut a, &[]).unwrap();
        one.apply(&mut b, &[]).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn shift_moves_one_occurrence_only() {
        let mut c = ParameterizedCircuit::new(1);
        c.push(GateOp::Ry(0, Angle::Param(0))).unwrap();
        c.push(GateOp::Ry(0, Angle::Param(0))).unwrap();
        assert_eq!(c.slot_occurrences(0), vec![0, 1]);
        let mut s = StateVector::zero(1);
        c.compile(&[0.0], Some((1, std::f64::consts::PI))).unwrap().apply(&mut s);
        // RY(π)|0⟩ = |1⟩
        assert!((s.amplitudes()[1].re - 1.0).abs() < 1e-15);
    }
}
