//! Experiment datasets: MNIST digits with k-means coreset selection and
//! linear angle encoding, and labelled cluster-Ising ground states.

mod eigen;
mod ising;
mod kmeans;
mod mnist;
mod phase;
mod store;
mod vqc;

pub use eigen::{ground_state_exact, GroundState, LanczosConfig, SpinOperator};
pub use ising::{
    build_hamiltonian, label_phase, order_parameters, ClusterIsingParams, OrderParameters, Phase, StringPattern,
    STRING_THRESHOLD,
};
pub use kmeans::{kmeans, kmeans_select, lloyd, representatives, KMeansConfig, KMeansInit, KMeansRun, Points};
pub use mnist::{
    default_mnist_dir, encode_image, encode_pixels, load_mnist, load_mnist_idx, write_mnist_idx, EncodingMatrix,
    ImageSample, MnistSplit, IMAGE_SIDE, MNIST_DIR_ENV, PIXELS,
};
pub use phase::{
    generate_phase_dataset, Axis, GenerationConfig, GenerationMode, PhaseDataset, PhaseGrid, QuantumSample, Rejection,
};
pub use store::{
    load_phase_samples, phase_records, read_manifest, read_states, write_manifest, write_states, ManifestRecord,
    STATE_MAGIC, STATE_VERSION,
};
pub use vqc::{energy_and_gradient, vqc_prepare, VqcAnsatz, VqcConfig, VqcOutcome, VqcPrepared};
