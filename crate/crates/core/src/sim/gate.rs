use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row-major 2×2 complex matrix `[m00, m01, m10, m11]`.
pub type Mat2 = [Complex64; 4];

/// A rotation angle in radians: either a literal or a symbolic slot bound
/// at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    Fixed(f64),
    Param(usize),
}

impl Angle {
    pub fn resolve(self, bindings: &[f64]) -> Result<f64> {
        match self {
            Angle::Fixed(v) => Ok(v),
            Angle::Param(slot) => bindings.get(slot).copied().ok_or(Error::Binding { slot, bound: bindings.len() }),
        }
    }

    pub fn slot(self) -> Option<usize> {
        match self {
            Angle::Param(s) => Some(s),
            Angle::Fixed(_) => None,
        }
    }
}

/// One gate of the fixed gate set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateOp {
    Rx(usize, Angle),
    Ry(usize, Angle),
    Rz(usize, Angle),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl GateOp {
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            GateOp::Rx(q, _) | GateOp::Ry(q, _) | GateOp::Rz(q, _) => ([q, q], 1),
            GateOp::Cnot { control, target } => ([control, target], 2),
            GateOp::Cz(a, b) => ([a, b], 2),
        }
    }

    pub fn angle(&self) -> Option<Angle> {
        match *self {
            GateOp::Rx(_, a) | GateOp::Ry(_, a) | GateOp::Rz(_, a) => Some(a),
            _ => None,
        }
    }

    /// Same gate with its angle replaced.
    pub fn with_angle(&self, angle: Angle) -> GateOp {
        match *self {
            GateOp::Rx(q, _) => GateOp::Rx(q, angle),
            GateOp::Ry(q, _) => GateOp::Ry(q, angle),
            GateOp::Rz(q, _) => GateOp::Rz(q, angle),
            other => other,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let (qs, arity) = self.qubits();
        for &q in &qs[..arity] {
            if q >= n_qubits {
                return Err(Error::domain(format!("gate {self:?} addresses qubit {q} of a {n_qubits}-qubit register")));
            }
        }
        if arity == 2 && qs[0] == qs[1] {
            return Err(Error::domain(format!("gate {self:?} repeats qubit {}", qs[0])));
        }
        Ok(())
    }

    /// Matrix of a single-qubit rotation at angle `theta`.
    pub fn matrix(&self, theta: f64) -> Option<Mat2> {
        let (s, c) = (theta / 2.0).sin_cos();
        let z = Complex64::new(0.0, 0.0);
        match self {
            GateOp::Rx(..) => {
                Some([Complex64::new(c, 0.0), Complex64::new(0.0, -s), Complex64::new(0.0, -s), Complex64::new(c, 0.0)])
            }
            GateOp::Ry(..) => {
                Some([Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)])
            }
            GateOp::Rz(..) => {
                let (d0, d1) = rz_phases(theta);
                Some([d0, z, z, d1])
            }
            _ => None,
        }
    }
}

/// Diagonal of `RZ(θ)`: `(e^{-iθ/2}, e^{iθ/2})`.
pub fn rz_phases(theta: f64) -> (Complex64, Complex64) {
    let (s, c) = (theta / 2.0).sin_cos();
    (Complex64::new(c, -s), Complex64::new(c, s))
}

pub(crate) fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
}

pub(crate) const MAT2_IDENTITY: Mat2 =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
