//! Classifier circuits and their projective readout.

mod qcnn;
mod qnn;
mod readout;

pub use qcnn::{build_qcnn, conv_kernel, QcnnArchitecture, KERNEL_PARAMS};
pub use qnn::{build_qnn, QnnArchitecture, QnnGateOrder};
pub use readout::{argmax, classify, classify_circuit, pvm_groups, Prediction, ReadoutSpec};

use serde::{Deserialize, Serialize};

/// Serializable descriptor of either classifier family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Architecture {
    Qnn(QnnArchitecture),
    Qcnn(QcnnArchitecture),
}

impl Architecture {
    pub fn readout(&self) -> crate::Result<ReadoutSpec> {
        match self {
            Architecture::Qnn(a) => a.readout(),
            Architecture::Qcnn(a) => a.readout(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Architecture::Qnn(a) => a.n_classes,
            Architecture::Qcnn(a) => a.n_classes,
        }
    }
}
