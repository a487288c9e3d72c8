use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::{derive, Stream};
use crate::sim::{PauliString, StateVector};
use crate::{Error, Result};

/// A sum of Pauli strings prepared for repeated matrix-vector products.
#[derive(Debug, Clone)]
pub struct SpinOperator {
    n_qubits: usize,
    /// `(x_mask, z_mask, coefficient · i^{#Y})`.
    terms: Vec<(usize, usize, Complex64)>,
}

impl SpinOperator {
    pub fn new(n_qubits: usize, terms: &[PauliString]) -> Result<Self> {
        let mut packed = Vec::with_capacity(terms.len());
        for t in terms {
            if t.max_qubit().is_some_and(|q| q >= n_qubits) {
                return Err(Error::domain(format!("term acts outside {n_qubits} qubits")));
            }
            let (mut x, mut z, mut y) = (0usize, 0usize, 0u32);
            for (&q, &p) in &t.terms {
                match p {
                    crate::sim::Pauli::X => x |= 1 << q,
                    crate::sim::Pauli::Z => z |= 1 << q,
                    crate::sim::Pauli::Y => {
                        x |= 1 << q;
                        z |= 1 << q;
                        y += 1;
                    }
                }
            }
            let phase = Complex64::i().powu(y) * t.coefficient;
            if phase != Complex64::new(0.0, 0.0) {
                packed.push((x, z, phase));
            }
        }
        Ok(Self { n_qubits, terms: packed })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for &(x, z, phase) in &self.terms {
            for (b, a) in v.iter().enumerate() {
                let c = if (b & z).count_ones() & 1 == 0 { phase } else { -phase };
                out[b ^ x] += c * a;
            }
        }
    }

    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let mut hv = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply(v, &mut hv);
        dot(v, &hv).re
    }

    /// `‖H v − E v‖` with `E = ⟨v|H|v⟩`, for unit `v`.
    pub fn residual(&self, v: &[Complex64]) -> (f64, f64) {
        let mut hv = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply(v, &mut hv);
        let e = dot(v, &hv).re;
        let r = hv.iter().zip(v).map(|(h, a)| (h - a * e).norm_sqr()).sum::<f64>().sqrt();
        (e, r)
    }

    /// Dense matrix, for small oracles.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..dim {
            e[j] = Complex64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for i in 0..dim {
                m[(i, j)] = col[i];
            }
            e[j] = Complex64::new(0.0, 0.0);
        }
        m
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos settings for [`ground_state_exact`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self { krylov_dim: 100, max_restarts: 60, tolerance: 1e-9, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    pub residual: f64,
    pub matvecs: usize,
}

/// Lowest eigenpair of a Hermitian Pauli sum by restarted Lanczos with
/// full reorthogonalization. Each restart begins from the previous Ritz
/// vector.
pub fn ground_state_exact(terms: &[PauliString], n_qubits: usize, config: &LanczosConfig) -> Result<GroundState> {
    if n_qubits == 0 || n_qubits > 20 {
        return Err(Error::domain(format!("exact ground states support 1..=20 qubits, got {n_qubits}")));
    }
    let op = SpinOperator::new(n_qubits, terms)?;
    let dim = op.dim();
    let mut rng = derive(config.seed, Stream::Eigen, 0);
    let mut start: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let n0 = norm(&start);
    start.iter_mut().for_each(|a| *a /= n0);

    let krylov = config.krylov_dim.clamp(2, dim);
    let mut matvecs = 0;
    let mut last = (f64::NAN, f64::INFINITY);
    for restart in 0..config.max_restarts.max(1) {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            alpha.push(dot(&basis[j], &w).re);
            // Two Gram-Schmidt passes against the whole basis.
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if basis.len() == krylov || b < 1e-12 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }

        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let lowest =
            (0..k).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).expect("non-empty Krylov space");
        let y = eig.eigenvectors.column(lowest);
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (q, &c) in basis.iter().zip(y.iter()) {
            ritz.iter_mut().zip(q).for_each(|(r, x)| *r += x * c);
        }
        let n = norm(&ritz);
        ritz.iter_mut().for_each(|a| *a /= n);
        let (energy, residual) = op.residual(&ritz);
        matvecs += 1;
        log::trace!("lanczos restart {restart}: E = {energy:.12}, residual {residual:.3e}");
        last = (energy, residual);
        if residual < config.tolerance {
            return Ok(GroundState { energy, state: StateVector::from_amplitudes(ritz)?, residual, matvecs });
        }
        start = ritz;
    }
    Err(Error::Numerical(format!(
        "Lanczos did not converge after {} restarts: E = {}, residual {:.3e} (target {:.1e})",
        config.max_restarts, last.0, last.1, config.tolerance
    )))
}
