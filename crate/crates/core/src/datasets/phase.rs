use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{ground_state_exact, LanczosConfig};
use super::ising::{
    build_hamiltonian, label_phase, order_parameters, ClusterIsingParams, OrderParameters, Phase, StringPattern,
};
use super::vqc::{vqc_prepare, VqcAnsatz, VqcConfig, VqcOutcome};
use crate::rng::child_seed;
use crate::sim::StateVector;
use crate::{Error, Result};

/// Evenly spaced values `lo + (i + offset) · step`, where `step` spans
/// `[lo, hi]` with `points` values when `endpoint` is set and `points`
/// intervals otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    #[serde(default)]
    pub endpoint: bool,
    #[serde(default)]
    pub offset: f64,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 0 {
            return Vec::new();
        }
        let intervals = if self.endpoint { self.points.saturating_sub(1).max(1) } else { self.points };
        let step = (self.hi - self.lo) / intervals as f64;
        (0..self.points).map(|i| self.lo + (i as f64 + self.offset) * step).collect()
    }
}

/// Train and test grids over `(h1, h2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub n_spins: usize,
    pub train_h1: Axis,
    pub train_h2: Axis,
    pub test_h1: Axis,
    pub test_h2: Axis,
}

impl Default for PhaseGrid {
    /// 11 × 16 points each. Training: `h1 ∈ [0.05, 1)`, `h2` at interval
    /// midpoints of `(-2.3, 1.6]`. Test: `h1 ∈ [0.05, 1.2]`, `h2` at the
    /// right ends of the same intervals, so no point is shared.
    fn default() -> Self {
        Self {
            n_spins: 15,
            train_h1: Axis { lo: 0.05, hi: 1.0, points: 11, endpoint: false, offset: 0.0 },
            train_h2: Axis { lo: -2.3, hi: 1.6, points: 16, endpoint: false, offset: 0.5 },
            test_h1: Axis { lo: 0.05, hi: 1.2, points: 11, endpoint: true, offset: 0.0 },
            test_h2: Axis { lo: -2.3, hi: 1.6, points: 16, endpoint: false, offset: 1.0 },
        }
    }
}

fn cartesian(h1: &Axis, h2: &Axis, n_spins: usize) -> Vec<ClusterIsingParams> {
    let h2s = h2.values();
    h1.values()
        .into_iter()
        .flat_map(|a| h2s.iter().map(move |&b| ClusterIsingParams { h1: a, h2: b, n_spins }))
        .collect()
}

impl PhaseGrid {
    pub fn train_points(&self) -> Vec<ClusterIsingParams> {
        cartesian(&self.train_h1, &self.train_h2, self.n_spins)
    }

    pub fn test_points(&self) -> Vec<ClusterIsingParams> {
        cartesian(&self.test_h1, &self.test_h2, self.n_spins)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GenerationMode {
    #[default]
    Exact,
    Vqc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub mode: GenerationMode,
    #[serde(default)]
    pub pattern: StringPattern,
    /// VQC block count.
    pub blocks: usize,
    #[serde(default)]
    pub vqc: VqcConfig,
    pub seed: u64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            mode: GenerationMode::Exact,
            pattern: StringPattern::EvenSites,
            blocks: 3,
            vqc: VqcConfig::default(),
            seed: 0,
        }
    }
}

/// One labelled ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSample {
    pub params: ClusterIsingParams,
    pub phase: Phase,
    /// Energy of `state`.
    pub energy: f64,
    pub exact_energy: f64,
    pub order: OrderParameters,
    pub state: StateVector,
    pub mode: GenerationMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub params: ClusterIsingParams,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct PhaseDataset {
    pub samples: Vec<QuantumSample>,
    pub rejected: Vec<Rejection>,
}

impl PhaseDataset {
    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.phase.index()).collect()
    }

    pub fn states(&self) -> Vec<StateVector> {
        self.samples.iter().map(|s| s.state.clone()).collect()
    }

    pub fn phase_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        self.samples.iter().for_each(|s| c[s.phase.index()] += 1);
        c
    }
}

struct Exact {
    energy: f64,
    state: StateVector,
    order: OrderParameters,
    phase: Option<Phase>,
}

fn solve_exact(p: &ClusterIsingParams, pattern: StringPattern, seed: u64) -> Result<Exact> {
    let h = build_hamiltonian(p)?;
    let gs = ground_state_exact(&h, p.n_spins, &LanczosConfig { seed, ..LanczosConfig::default() })?;
    let order = order_parameters(&gs.state, pattern)?;
    Ok(Exact { energy: gs.energy, state: gs.state, order, phase: label_phase(order) })
}

/// Ground states and phase labels for every grid point. Points whose order
/// parameters sit exactly on a threshold, or whose variational preparation
/// fails, are listed in `rejected`.
pub fn generate_phase_dataset(grid: &[ClusterIsingParams], config: &GenerationConfig) -> Result<PhaseDataset> {
    if grid.iter().any(|p| p.n_spins != 15) {
        return Err(Error::domain("phase datasets use 15-spin chains"));
    }
    let exact: Vec<Result<Exact>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, p)| solve_exact(p, config.pattern, child_seed(config.seed, i as u64)))
        .collect();

    let mut out = PhaseDataset::default();
    let mut warm: Option<(f64, Vec<f64>)> = None;
    for (i, (p, e)) in grid.iter().zip(exact).enumerate() {
        let e = e?;
        let Some(phase) = e.phase else {
            out.rejected
                .push(Rejection { params: *p, reason: format!("order parameters on a threshold: {:?}", e.order) });
            continue;
        };
        match config.mode {
            GenerationMode::Exact => out.samples.push(QuantumSample {
                params: *p,
                phase,
                energy: e.energy,
                exact_energy: e.energy,
                order: e.order,
                state: e.state,
                mode: GenerationMode::Exact,
            }),
            GenerationMode::Vqc => {
                let h = build_hamiltonian(p)?;
                let ansatz = VqcAnsatz::new(p.n_spins, config.blocks);
                // Warm start from the previous accepted point on the same h1 line.
                let start = warm.as_ref().filter(|(h1, _)| *h1 == p.h1).map(|(_, t)| t.as_slice());
                let outcome = vqc_prepare(
                    &h,
                    &ansatz,
                    e.energy,
                    phase,
                    config.pattern,
                    &config.vqc,
                    start,
                    child_seed(config.seed, i as u64),
                )?;
                match outcome {
                    VqcOutcome::Accepted(v) => {
                        let order = order_parameters(&v.state, config.pattern)?;
                        log::info!(
                            "vqc h1={:.3} h2={:.3}: E={:.5} (exact {:.5}) after {} attempt(s)",
                            p.h1,
                            p.h2,
                            v.energy,
                            e.energy,
                            v.attempts
                        );
                        warm = Some((p.h1, v.theta.clone()));
                        out.samples.push(QuantumSample {
                            params: *p,
                            phase,
                            energy: v.energy,
                            exact_energy: e.energy,
                            order,
                            state: v.state,
                            mode: GenerationMode::Vqc,
                        });
                    }
                    VqcOutcome::Rejected { attempts, reason } => {
                        log::warn!("vqc h1={:.3} h2={:.3} discarded after {attempts} attempts: {reason}", p.h1, p.h2);
                        out.rejected.push(Rejection { params: *p, reason });
                    }
                }
            }
        }
    }
    Ok(out)
}
