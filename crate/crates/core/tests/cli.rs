use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use qboost::circuits::QnnArchitecture;
use qboost::cli::{
    cmd_boost, cmd_evaluate, cmd_report, cmd_train, prepare_data, BoostAlgorithm, Checkpoint, ExperimentConfig, Task,
};
use qboost::datasets::{write_mnist_idx, ImageSample};
use qboost::optim::{QnnModel, QuantumClassifier, TrainConfig};
use qboost::rng::{child_seed, derive, Stream};
use rand::Rng;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn shipped_configs_parse() {
    let mut seen = 0;
    for entry in fs::read_dir(repo_root().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let c = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
            seen += 1;
        }
    }
    assert!(seen >= 2);
}

/// Digit `d` lights a band of rows starting at `2d + 4`, with speckle.
fn synthetic_digit<R: Rng>(d: u8, rng: &mut R) -> ImageSample {
    let mut px = vec![0u8; 784];
    for r in 0..4 {
        for c in 4..24 {
            px[(2 * d as usize + 4 + r) * 28 + c] = rng.random_range(150..=255);
        }
    }
    for _ in 0..20 {
        px[rng.random_range(0..784)] = rng.random_range(0..=255);
    }
    ImageSample::new(px, d).unwrap()
}

fn synthetic_mnist(dir: &Path, train_per_digit: usize, test_per_digit: usize) {
    let mut rng = derive(51, Stream::Corpus, 0);
    let mut make =
        |n: usize| -> Vec<ImageSample> { (0..n * 10).map(|i| synthetic_digit((i % 10) as u8, &mut rng)).collect() };
    let (train, test) = (make(train_per_digit), make(test_per_digit));
    fs::create_dir_all(dir).unwrap();
    write_mnist_idx(&train, &dir.join("train-images-idx3-ubyte"), &dir.join("train-labels-idx1-ubyte")).unwrap();
    write_mnist_idx(&test, &dir.join("t10k-images-idx3-ubyte"), &dir.join("t10k-labels-idx1-ubyte")).unwrap();
}

fn small_config(root: &Path, epochs: usize, rounds: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(Task::MnistQnn);
    c.seed = 17;
    c.out = root.join("run");
    c.mnist.dir = Some(root.join("mnist"));
    c.mnist.clusters_per_digit = 3;
    c.mnist.kmeans_restarts = 2;
    c.mnist.monitor_per_digit = 2;
    c.qnn = Some(QnnArchitecture { n_layers: 1, ..QnnArchitecture::default() });
    c.train = Some(TrainConfig { epochs, batch_size: 10, ..TrainConfig::qnn_default() });
    c.boost.rounds = rounds;
    c.evaluate.bootstrap = 50;
    c
}

fn setup(epochs: usize, rounds: usize) -> (tempfile::TempDir, ExperimentConfig) {
    let tmp = tempfile::tempdir().unwrap();
    synthetic_mnist(&tmp.path().join("mnist"), 6, 3);
    let config = small_config(tmp.path(), epochs, rounds);
    prepare_data(&config).unwrap();
    (tmp, config)
}

#[test]
fn zero_epochs_checkpoint_the_initialization() {
    let (_tmp, config) = setup(0, 1);
    let summary = cmd_train(&config).unwrap();
    assert_eq!(summary.steps, 0);
    let metrics = fs::read_to_string(config.out.join("train/metrics.csv")).unwrap();
    assert_eq!(metrics.trim(), "step,epoch,batch,loss,train_accuracy");
    let ck = Checkpoint::load(&config.out.join("train/checkpoint.json")).unwrap();
    let model = QnnModel::new(config.qnn.clone().unwrap()).unwrap();
    let init = model.init_params(&mut derive(child_seed(config.seed, 0), Stream::Init, 0));
    assert_eq!(ck.model.members[0].params, init);
}

#[test]
fn one_round_boost_reproduces_the_single_classifier() {
    let (_tmp, config) = setup(1, 1);
    let single = cmd_train(&config).unwrap();
    let boosted = cmd_boost(&config).unwrap();
    let a = Checkpoint::load(&config.out.join("train/checkpoint.json")).unwrap();
    let b = Checkpoint::load(&config.out.join("boost/checkpoint.json")).unwrap();
    assert_eq!(a.model.members[0].params, b.model.members[0].params);
    assert_eq!(boosted.test_accuracy, Some(single.test_accuracy));
    assert_eq!(boosted.single_test_accuracy, Some(single.test_accuracy));
}

#[test]
fn reruns_are_byte_identical() {
    let (_tmp, mut config) = setup(1, 2);
    config.boost.algorithm = BoostAlgorithm::AdaboostM1;
    let files =
        ["train/metrics.csv", "train/monitor.csv", "boost/rounds.csv", "boost/steps.csv", "boost/predictions.csv"];
    let run = |config: &ExperimentConfig| {
        let t = cmd_train(config).unwrap();
        let b = cmd_boost(config).unwrap();
        let bytes: Vec<Vec<u8>> = files.iter().map(|f| fs::read(config.out.join(f)).unwrap()).collect();
        (t.checkpoint_hash, b.checkpoint_hash, bytes)
    };
    let first = run(&config);
    let second = run(&config);
    assert_eq!(first, second);
    let sidecar = fs::read_to_string(config.out.join("boost/checkpoint.json.sha256")).unwrap();
    assert!(sidecar.starts_with(&first.1));
}

#[test]
fn evaluate_and_report_read_the_run() {
    let (_tmp, config) = setup(1, 2);
    let boosted = cmd_boost(&config).unwrap();
    let report = cmd_evaluate(&config, None).unwrap();
    assert_eq!(report.checkpoint_hash, boosted.checkpoint_hash);
    assert_eq!(Some(report.evaluation.accuracy), boosted.test_accuracy);
    let summary = cmd_report(&config.out).unwrap();
    assert!(summary.figures.iter().any(|f| f.ends_with("rounds.svg")));
    assert!(config.out.join("report/rounds.svg").exists());
}

#[test]
fn binary_reports_missing_config() {
    let bin = env!("CARGO_BIN_EXE_qboost");
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert!(help.status.success());
    assert!(String::from_utf8_lossy(&help.stdout).contains("prepare-data"));
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(bin).args(["train", "--config"]).arg(tmp.path().join("absent.toml")).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.toml"));
}
