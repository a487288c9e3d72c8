use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ising::{ClusterIsingParams, OrderParameters, Phase};
use super::phase::{GenerationMode, QuantumSample};
use crate::sim::StateVector;
use crate::{Error, Result};

pub const STATE_MAGIC: [u8; 4] = *b"QBSV";
pub const STATE_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

/// Write states as `magic, version: u32, n_qubits: u32, count: u64`
/// followed by interleaved little-endian `f64` `(re, im)` pairs.
pub fn write_states(path: &Path, states: &[StateVector]) -> Result<()> {
    let n_qubits = states.first().map_or(0, StateVector::n_qubits);
    if states.iter().any(|s| s.n_qubits() != n_qubits) {
        return Err(Error::domain("all states in one file must share a width"));
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(&STATE_MAGIC)?;
    w.write_all(&STATE_VERSION.to_le_bytes())?;
    w.write_all(&(n_qubits as u32).to_le_bytes())?;
    w.write_all(&(states.len() as u64).to_le_bytes())?;
    for s in states {
        for a in s.amplitudes() {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_states(path: &Path) -> Result<Vec<StateVector>> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => {
                Error::MissingInput { path: path.to_path_buf(), hint: "run `qboost prepare-data` first".into() }
            }
            _ => Error::Io(e),
        })?
        .read_to_end(&mut bytes)?;
    let fail = |offset: usize, message: String| Error::Format {
        path: path.display().to_string(),
        offset: offset as u64,
        message,
    };
    if bytes.len() < HEADER_LEN {
        return Err(fail(bytes.len(), "truncated header".into()));
    }
    if bytes[..4] != STATE_MAGIC {
        return Err(fail(0, "bad magic".into()));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let version = word(4);
    if version != STATE_VERSION {
        return Err(fail(4, format!("unsupported version {version}")));
    }
    let n_qubits = word(8) as usize;
    if n_qubits > crate::sim::MAX_QUBITS {
        return Err(fail(8, format!("{n_qubits} qubits is beyond the simulator limit")));
    }
    let count = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
    let dim = 1usize << n_qubits;
    let need = HEADER_LEN + count * dim * 16;
    if bytes.len() != need {
        return Err(fail(bytes.len().min(need), format!("expected {need} bytes, found {}", bytes.len())));
    }
    let f = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    (0..count)
        .map(|k| {
            let base = HEADER_LEN + k * dim * 16;
            let amps = (0..dim).map(|i| Complex64::new(f(base + 16 * i), f(base + 16 * i + 8))).collect();
            StateVector::from_amplitudes(amps).map_err(|e| fail(base, e.to_string()))
        })
        .collect()
}

/// One manifest row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: usize,
    pub source: String,
    pub label: usize,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub energy: Option<f64>,
    pub exact_energy: Option<f64>,
    pub string_order: Option<f64>,
    pub x7x8: Option<f64>,
    pub state_file: Option<String>,
    pub state_index: Option<usize>,
}

pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Manifest rows for quantum samples stored in `state_file` in order.
pub fn phase_records(samples: &[QuantumSample], state_file: &str) -> Vec<ManifestRecord> {
    samples
        .iter()
        .enumerate()
        .map(|(i, s)| ManifestRecord {
            id: i,
            source: match s.mode {
                GenerationMode::Exact => "exact".into(),
                GenerationMode::Vqc => "vqc".into(),
            },
            label: s.phase.index(),
            h1: Some(s.params.h1),
            h2: Some(s.params.h2),
            energy: Some(s.energy),
            exact_energy: Some(s.exact_energy),
            string_order: Some(s.order.string),
            x7x8: Some(s.order.x7x8),
            state_file: Some(state_file.to_string()),
            state_index: Some(i),
        })
        .collect()
}

/// Rebuild quantum samples from manifest rows and their state file.
pub fn load_phase_samples(dir: &Path, records: &[ManifestRecord]) -> Result<Vec<QuantumSample>> {
    let mut cache: Vec<(String, Vec<StateVector>)> = Vec::new();
    records
        .iter()
        .map(|r| {
            let missing = |what: &str| Error::Config(format!("manifest row {} lacks {what}", r.id));
            let file = r.state_file.clone().ok_or_else(|| missing("state_file"))?;
            if !cache.iter().any(|(f, _)| *f == file) {
                cache.push((file.clone(), read_states(&dir.join(&file))?));
            }
            let states = &cache.iter().find(|(f, _)| *f == file).expect("cached").1;
            let index = r.state_index.ok_or_else(|| missing("state_index"))?;
            let state = states
                .get(index)
                .cloned()
                .ok_or_else(|| Error::Config(format!("state index {index} beyond {file}")))?;
            let phase = Phase::from_index(r.label).ok_or_else(|| missing("a valid phase label"))?;
            Ok(QuantumSample {
                params: ClusterIsingParams {
                    h1: r.h1.ok_or_else(|| missing("h1"))?,
                    h2: r.h2.ok_or_else(|| missing("h2"))?,
                    n_spins: state.n_qubits(),
                },
                phase,
                energy: r.energy.unwrap_or(f64::NAN),
                exact_energy: r.exact_energy.unwrap_or(f64::NAN),
                order: OrderParameters { string: r.string_order.unwrap_or(f64::NAN), x7x8: r.x7x8.unwrap_or(f64::NAN) },
                state,
                mode: if r.source == "vqc" { GenerationMode::Vqc } else { GenerationMode::Exact },
            })
        })
        .collect()
}
