use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuits::{Architecture, QcnnArchitecture, QnnArchitecture};
use crate::datasets::{GenerationMode, KMeansInit, PhaseGrid, StringPattern, VqcConfig};
use crate::ensemble::{CGrid, Voting, DEFAULT_ALPHA_CAP};
use crate::optim::TrainConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    MnistQnn,
    PhaseQcnn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BoostAlgorithm {
    #[default]
    AdaboostQ,
    AdaboostM1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MnistDataConfig {
    /// Directory with the four IDX files; `$QBOOST_MNIST_DIR` or
    /// `data/mnist` when absent.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "d_clusters")]
    pub clusters_per_digit: usize,
    #[serde(default = "d_restarts")]
    pub kmeans_restarts: usize,
    #[serde(default = "d_max_iter")]
    pub kmeans_max_iter: usize,
    #[serde(default)]
    pub kmeans_init: KMeansInit,
    /// Cluster only the first `n` training images of each digit.
    #[serde(default)]
    pub pool_per_digit: Option<usize>,
    /// Use only the first `n` test images.
    #[serde(default)]
    pub test_limit: Option<usize>,
    #[serde(default = "d_monitor")]
    pub monitor_per_digit: usize,
}

fn d_clusters() -> usize {
    360
}
fn d_restarts() -> usize {
    4
}
fn d_max_iter() -> usize {
    100
}
fn d_monitor() -> usize {
    100
}

impl Default for MnistDataConfig {
    fn default() -> Self {
        Self {
            dir: None,
            clusters_per_digit: d_clusters(),
            kmeans_restarts: d_restarts(),
            kmeans_max_iter: d_max_iter(),
            kmeans_init: KMeansInit::default(),
            pool_per_digit: None,
            test_limit: None,
            monitor_per_digit: d_monitor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDataConfig {
    #[serde(default)]
    pub grid: PhaseGrid,
    #[serde(default)]
    pub mode: GenerationMode,
    #[serde(default)]
    pub pattern: StringPattern,
    #[serde(default = "d_train_blocks")]
    pub train_blocks: usize,
    #[serde(default = "d_test_blocks")]
    pub test_blocks: usize,
    #[serde(default)]
    pub vqc: VqcConfig,
}

fn d_train_blocks() -> usize {
    3
}
fn d_test_blocks() -> usize {
    4
}

impl Default for PhaseDataConfig {
    fn default() -> Self {
        Self {
            grid: PhaseGrid::default(),
            mode: GenerationMode::Exact,
            pattern: StringPattern::default(),
            train_blocks: d_train_blocks(),
            test_blocks: d_test_blocks(),
            vqc: VqcConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostSection {
    #[serde(default = "d_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub algorithm: BoostAlgorithm,
    #[serde(default)]
    pub c_grid: CGrid,
    #[serde(default = "d_cap")]
    pub alpha_cap: f64,
    #[serde(default = "d_true")]
    pub early_stop: bool,
    /// Vote rule for AdaBoost.M1; AdaBoost.Q always votes softly.
    #[serde(default = "d_hard")]
    pub m1_voting: Voting,
}

fn d_rounds() -> usize {
    4
}
fn d_cap() -> f64 {
    DEFAULT_ALPHA_CAP
}
fn d_true() -> bool {
    true
}
fn d_hard() -> Voting {
    Voting::Hard
}

impl Default for BoostSection {
    fn default() -> Self {
        Self {
            rounds: d_rounds(),
            algorithm: BoostAlgorithm::AdaboostQ,
            c_grid: CGrid::default(),
            alpha_cap: d_cap(),
            early_stop: true,
            m1_voting: Voting::Hard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSection {
    #[serde(default = "d_bootstrap")]
    pub bootstrap: usize,
}

fn d_bootstrap() -> usize {
    1000
}

impl Default for EvaluateSection {
    fn default() -> Self {
        Self { bootstrap: d_bootstrap() }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub mnist: MnistDataConfig,
    #[serde(default)]
    pub phase: PhaseDataConfig,
    /// Architecture override; the task default when absent.
    #[serde(default)]
    pub qnn: Option<QnnArchitecture>,
    #[serde(default)]
    pub qcnn: Option<QcnnArchitecture>,
    /// Training override; the task default when absent. Its `seed` is
    /// replaced by the experiment seed.
    #[serde(default)]
    pub train: Option<TrainConfig>,
    #[serde(default)]
    pub boost: BoostSection,
    #[serde(default)]
    pub evaluate: EvaluateSection,
}

fn d_out() -> PathBuf {
    PathBuf::from("runs/default")
}

impl ExperimentConfig {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            seed: 0,
            out: d_out(),
            mnist: MnistDataConfig::default(),
            phase: PhaseDataConfig::default(),
            qnn: None,
            qcnn: None,
            train: None,
            boost: BoostSection::default(),
            evaluate: EvaluateSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => {
                Error::MissingInput { path: path.to_path_buf(), hint: "pass an existing --config file".into() }
            }
            _ => Error::Io(e),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn architecture(&self) -> Architecture {
        match self.task {
            Task::MnistQnn => Architecture::Qnn(self.qnn.clone().unwrap_or_default()),
            Task::PhaseQcnn => Architecture::Qcnn(self.qcnn.clone().unwrap_or_default()),
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let base = self.train.clone().unwrap_or_else(|| match self.task {
            Task::MnistQnn => TrainConfig::qnn_default(),
            Task::PhaseQcnn => TrainConfig::qcnn_default(),
        });
        base.with_seed(self.seed)
    }

    pub fn mnist_dir(&self) -> PathBuf {
        self.mnist.dir.clone().unwrap_or_else(crate::datasets::default_mnist_dir)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn data_dir(&self) -> PathBuf {
        self.out.join("data")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_task_defaults() {
        let c = ExperimentConfig::from_toml("task = \"mnist-qnn\"\nseed = 3\n").unwrap();
        assert_eq!(c.train_config().epochs, 7);
        assert_eq!(c.train_config().seed, 3);
        let c = ExperimentConfig::from_toml("task = \"phase-qcnn\"").unwrap();
        assert_eq!(c.train_config().batch_size, 29);
        assert_eq!(c.architecture().n_classes(), 3);
    }

    #[test]
    fn toml_round_trip_and_unknown_keys() {
        let mut c = ExperimentConfig::new(Task::PhaseQcnn);
        c.boost.rounds = 2;
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert!(ExperimentConfig::from_toml("task = \"mnist-qnn\"\nbogus = 1").is_err());
    }
}
