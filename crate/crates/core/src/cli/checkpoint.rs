use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{BoostAlgorithm, Task};
use crate::ensemble::EnsembleModel;
use crate::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckpointKind {
    Single,
    Ensemble,
}

/// Seeds the run was derived from. All randomness is a pure function of
/// the master seed, so this is the complete generator state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngInfo {
    pub generator: String,
    pub seed: u64,
}

impl RngInfo {
    pub fn new(seed: u64) -> Self {
        Self { generator: "chacha8".into(), seed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the experiment configuration.
    pub config_hash: String,
    /// Digest over the prepared dataset files; see [`hash_inputs`].
    pub input_hash: String,
}

/// A trained single classifier or ensemble. A single classifier is stored
/// as a one-member ensemble with `α = 1`, `c = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub kind: CheckpointKind,
    pub task: Task,
    pub algorithm: Option<BoostAlgorithm>,
    pub model: EnsembleModel,
    pub rng: RngInfo,
    pub provenance: Provenance,
}

impl Checkpoint {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Checkpoint = serde_json::from_str(text)?;
        if c.format_version != CHECKPOINT_VERSION {
            return Err(Error::Config(format!(
                "checkpoint format version {} is not supported (expected {CHECKPOINT_VERSION})",
                c.format_version
            )));
        }
        if c.model.members.is_empty() {
            return Err(Error::Config("checkpoint holds no classifiers".into()));
        }
        let n = c.model.architecture.n_classes();
        if c.model.n_classes != n {
            return Err(Error::Config(format!(
                "checkpoint declares {} classes but its architecture has {n}",
                c.model.n_classes
            )));
        }
        Ok(c)
    }

    /// SHA-256 of the serialized form.
    pub fn content_hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_json()?.as_bytes())))
    }

    /// Write `path` and a sibling `<path>.sha256`; returns the hash.
    pub fn save(&self, path: &Path) -> Result<String> {
        let text = self.to_json()?;
        let hash = hex::encode(Sha256::digest(text.as_bytes()));
        fs::write(path, &text)?;
        fs::write(hash_path(path), format!("{hash}\n"))?;
        Ok(hash)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingInput {
                path: path.to_path_buf(),
                hint: "run `qboost train` or `qboost boost` first".into(),
            },
            _ => Error::Io(e),
        })?;
        Self::from_json(&text)
    }
}

fn hash_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".sha256");
    PathBuf::from(s)
}

/// Git-style digest of a set of files: each file is hashed as
/// `blob <len>\0<bytes>`, then the sorted `name\0digest\n` lines are hashed.
pub fn hash_inputs(dir: &Path, names: &[&str]) -> Result<String> {
    let mut names: Vec<&str> = names.to_vec();
    names.sort_unstable();
    let mut tree = Sha256::new();
    for name in names {
        let path = dir.join(name);
        let bytes = fs::read(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => {
                Error::MissingInput { path: path.clone(), hint: "run `qboost prepare-data` first".into() }
            }
            _ => Error::Io(e),
        })?;
        let mut blob = Sha256::new();
        blob.update(format!("blob {}\0", bytes.len()).as_bytes());
        blob.update(&bytes);
        tree.update(name.as_bytes());
        tree.update([0]);
        tree.update(hex::encode(blob.finalize()).as_bytes());
        tree.update(b"\n");
    }
    Ok(hex::encode(tree.finalize()))
}
