use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::checkpoint::hash_inputs;
use super::config::{ExperimentConfig, Task};
use crate::datasets::{
    generate_phase_dataset, kmeans_select, load_mnist, load_phase_samples, phase_records, read_manifest,
    write_manifest, write_mnist_idx, write_states, GenerationConfig, ImageSample, KMeansConfig, ManifestRecord,
    MnistSplit, Phase, PhaseDataset, QuantumSample,
};
use crate::rng::{child_seed, derive, Stream};
use crate::sim::StateVector;
use crate::{Error, Result};

pub const TRAIN_MANIFEST: &str = "train_manifest.csv";
pub const TEST_MANIFEST: &str = "test_manifest.csv";
pub const TRAIN_STATES: &str = "train_states.bin";
pub const TEST_STATES: &str = "test_states.bin";
pub const DATA_SUMMARY: &str = "summary.json";

const MNIST_FILES: [&str; 6] = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
    TRAIN_MANIFEST,
    TEST_MANIFEST,
];
const PHASE_FILES: [&str; 4] = [TRAIN_STATES, TEST_STATES, TRAIN_MANIFEST, TEST_MANIFEST];

/// Files that make up a prepared dataset.
pub fn input_files(task: Task) -> &'static [&'static str] {
    match task {
        Task::MnistQnn => &MNIST_FILES,
        Task::PhaseQcnn => &PHASE_FILES,
    }
}

/// Per-split counts written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub task: Task,
    pub train_size: usize,
    pub test_size: usize,
    /// Counts keyed by class name.
    pub train_counts: BTreeMap<String, usize>,
    pub test_counts: BTreeMap<String, usize>,
    pub rejected: Vec<String>,
    pub input_hash: String,
}

#[derive(Debug, Clone)]
pub struct Split<I> {
    pub inputs: Vec<I>,
    pub labels: Vec<usize>,
}

impl<I> Split<I> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// A prepared dataset loaded back from disk.
#[derive(Debug, Clone)]
pub enum TaskData {
    Mnist { train: Split<ImageSample>, test: Split<ImageSample> },
    Phase { train: Split<StateVector>, test: Split<StateVector>, test_records: Vec<ManifestRecord> },
}

fn class_name(task: Task, k: usize) -> String {
    match task {
        Task::MnistQnn => k.to_string(),
        Task::PhaseQcnn => Phase::from_index(k).map_or_else(|| k.to_string(), |p| p.name().to_string()),
    }
}

fn counts(task: Task, labels: impl Iterator<Item = usize>) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for k in labels {
        *m.entry(class_name(task, k)).or_insert(0) += 1;
    }
    m
}

fn mnist_records(images: &[ImageSample], origin: &str, indices: &[usize]) -> Vec<ManifestRecord> {
    indices
        .iter()
        .enumerate()
        .map(|(id, &i)| ManifestRecord {
            id,
            source: format!("{origin}:{i}"),
            label: images[i].label(),
            h1: None,
            h2: None,
            energy: None,
            exact_energy: None,
            string_order: None,
            x7x8: None,
            state_file: None,
            state_index: None,
        })
        .collect()
}

/// Indices of the first `limit` images of each digit.
fn digit_pool(images: &[ImageSample], limit: Option<usize>) -> Vec<usize> {
    let mut seen = [0usize; 10];
    (0..images.len())
        .filter(|&i| {
            let d = images[i].label();
            seen[d] += 1;
            limit.is_none_or(|l| seen[d] <= l)
        })
        .collect()
}

fn prepare_mnist(config: &ExperimentConfig, dir: &Path) -> Result<DataSummary> {
    let source = config.mnist_dir();
    let train = load_mnist(&source, MnistSplit::Train)?;
    let test = load_mnist(&source, MnistSplit::Test)?;
    let m = &config.mnist;
    let pool = digit_pool(&train, m.pool_per_digit);
    let pooled: Vec<ImageSample> = pool.iter().map(|&i| train[i].clone()).collect();
    let kconf = KMeansConfig {
        clusters: m.clusters_per_digit,
        restarts: m.kmeans_restarts,
        max_iter: m.kmeans_max_iter,
        init: m.kmeans_init,
    };
    log::info!("selecting {} representatives per digit from {} training images", m.clusters_per_digit, pooled.len());
    let chosen: Vec<usize> =
        kmeans_select(&pooled, &kconf, child_seed(config.seed, 0))?.into_iter().map(|i| pool[i]).collect();
    let coreset: Vec<ImageSample> = chosen.iter().map(|&i| train[i].clone()).collect();
    let test_idx: Vec<usize> = match m.test_limit {
        Some(n) => (0..n.min(test.len())).collect(),
        None => (0..test.len()).collect(),
    };
    let test_kept: Vec<ImageSample> = test_idx.iter().map(|&i| test[i].clone()).collect();

    write_mnist_idx(&coreset, &dir.join(MNIST_FILES[0]), &dir.join(MNIST_FILES[1]))?;
    write_mnist_idx(&test_kept, &dir.join(MNIST_FILES[2]), &dir.join(MNIST_FILES[3]))?;
    write_manifest(&dir.join(TRAIN_MANIFEST), &mnist_records(&train, "mnist-train", &chosen))?;
    write_manifest(&dir.join(TEST_MANIFEST), &mnist_records(&test, "mnist-test", &test_idx))?;
    Ok(DataSummary {
        task: Task::MnistQnn,
        train_size: coreset.len(),
        test_size: test_kept.len(),
        train_counts: counts(Task::MnistQnn, coreset.iter().map(ImageSample::label)),
        test_counts: counts(Task::MnistQnn, test_kept.iter().map(ImageSample::label)),
        rejected: Vec::new(),
        input_hash: hash_inputs(dir, &MNIST_FILES)?,
    })
}

fn write_phase_split(dir: &Path, data: &PhaseDataset, states: &str, manifest: &str) -> Result<()> {
    write_states(&dir.join(states), &data.states())?;
    write_manifest(&dir.join(manifest), &phase_records(&data.samples, states))
}

fn prepare_phase(config: &ExperimentConfig, dir: &Path) -> Result<DataSummary> {
    let p = &config.phase;
    let generation = |blocks: usize, index: u64| GenerationConfig {
        mode: p.mode,
        pattern: p.pattern,
        blocks,
        vqc: p.vqc,
        seed: child_seed(config.seed, index),
    };
    let train_grid = p.grid.train_points();
    let test_grid = p.grid.test_points();
    log::info!("solving {} training and {} test grid points", train_grid.len(), test_grid.len());
    let train = generate_phase_dataset(&train_grid, &generation(p.train_blocks, 1))?;
    let test = generate_phase_dataset(&test_grid, &generation(p.test_blocks, 2))?;
    write_phase_split(dir, &train, TRAIN_STATES, TRAIN_MANIFEST)?;
    write_phase_split(dir, &test, TEST_STATES, TEST_MANIFEST)?;
    let rejected = train
        .rejected
        .iter()
        .map(|r| ("train", r))
        .chain(test.rejected.iter().map(|r| ("test", r)))
        .map(|(split, r)| format!("{split} h1={} h2={}: {}", r.params.h1, r.params.h2, r.reason))
        .collect();
    Ok(DataSummary {
        task: Task::PhaseQcnn,
        train_size: train.samples.len(),
        test_size: test.samples.len(),
        train_counts: counts(Task::PhaseQcnn, train.labels().into_iter()),
        test_counts: counts(Task::PhaseQcnn, test.labels().into_iter()),
        rejected,
        input_hash: hash_inputs(dir, &PHASE_FILES)?,
    })
}

/// Generate the task's dataset under `<out>/data`.
pub fn prepare_data(config: &ExperimentConfig) -> Result<DataSummary> {
    let dir = config.data_dir();
    fs::create_dir_all(&dir)?;
    let summary = match config.task {
        Task::MnistQnn => prepare_mnist(config, &dir)?,
        Task::PhaseQcnn => prepare_phase(config, &dir)?,
    };
    fs::write(dir.join(DATA_SUMMARY), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}

fn phase_split(dir: &Path, manifest: &str) -> Result<(Split<StateVector>, Vec<ManifestRecord>)> {
    let records = read_manifest(&dir.join(manifest))?;
    let samples: Vec<QuantumSample> = load_phase_samples(dir, &records)?;
    let labels = samples.iter().map(|s| s.phase.index()).collect();
    let inputs = samples.into_iter().map(|s| s.state).collect();
    Ok((Split { inputs, labels }, records))
}

/// Load a dataset written by [`prepare_data`].
pub fn load_prepared(config: &ExperimentConfig) -> Result<TaskData> {
    let dir = config.data_dir();
    for name in input_files(config.task) {
        let path = dir.join(name);
        if !path.exists() {
            return Err(Error::MissingInput {
                path,
                hint: "run `qboost prepare-data` with the same --config and --out first".into(),
            });
        }
    }
    match config.task {
        Task::MnistQnn => {
            let split = |s| -> Result<Split<ImageSample>> {
                let inputs = load_mnist(&dir, s)?;
                let labels = inputs.iter().map(ImageSample::label).collect();
                Ok(Split { inputs, labels })
            };
            Ok(TaskData::Mnist { train: split(MnistSplit::Train)?, test: split(MnistSplit::Test)? })
        }
        Task::PhaseQcnn => {
            let (train, _) = phase_split(&dir, TRAIN_MANIFEST)?;
            let (test, test_records) = phase_split(&dir, TEST_MANIFEST)?;
            Ok(TaskData::Phase { train, test, test_records })
        }
    }
}

/// Up to `per_class` indices of each class, drawn without replacement from
/// the seed's monitor stream and returned in ascending order.
pub fn monitor_indices(labels: &[usize], n_classes: usize, per_class: usize, seed: u64) -> Vec<usize> {
    let mut rng = derive(seed, Stream::Monitor, 0);
    let mut picked = Vec::new();
    for k in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == k).collect();
        members.shuffle(&mut rng);
        members.truncate(per_class);
        picked.extend(members);
    }
    picked.sort_unstable();
    picked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monitor_set_is_balanced_and_seeded() {
        let labels: Vec<usize> = (0..500).map(|i| i % 10).collect();
        let m = monitor_indices(&labels, 10, 7, 4);
        assert_eq!(m.len(), 70);
        for k in 0..10 {
            assert_eq!(m.iter().filter(|&&i| labels[i] == k).count(), 7);
        }
        assert_eq!(m, monitor_indices(&labels, 10, 7, 4));
        assert_ne!(m, monitor_indices(&labels, 10, 7, 5));
    }

    #[test]
    fn missing_data_names_expected_path() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::new(Task::PhaseQcnn);
        c.out = dir.path().to_path_buf();
        match load_prepared(&c) {
            Err(Error::MissingInput { path, .. }) => assert!(path.ends_with(TRAIN_STATES)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
