//! Boosted quantum circuit classifiers on a dense statevector simulator.
//!
//! The crate is organised bottom-up:
//!
//! * [`sim`]: statevector, gates, parameterized circuits, Pauli observables.
//! * [`circuits`]: the layered QNN and the convolutional QCNN classifiers,
//!   projective readout grouping and label/confidence prediction.
//! * [`optim`]: weighted cross-entropy, parameter-shift and finite-difference
//!   gradients, Adam/Nadam, and the epoch/batch training loop.
//! * [`ensemble`]: confidence-weighted boosting (AdaBoost.Q) and the
//!   AdaBoost.M1/SAMME baseline.
//! * [`datasets`]: MNIST IDX input, k-means coresets, cluster-Ising ground
//!   states, order parameters and variational state preparation.
//! * [`cli`]: experiment configuration, checkpoints, metrics and the
//!   `qboost` command line driver.

pub mod circuits;
pub mod cli;
pub mod datasets;
pub mod ensemble;
pub mod error;
pub mod optim;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
