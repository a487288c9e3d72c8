//! Loss, gradients, optimizers and the single-classifier training loop.

mod adam;
mod gradient;
mod loss;
mod model;
mod train;

pub use adam::{adam_step, nadam_step, OptimizerKind, OptimizerState, ADAM_EPSILON};
pub use gradient::{
    grad_encoding_matrix, grad_finite_difference, grad_parameter_shift, GradientMode, ProbeTarget, SlotGradient,
};
pub use loss::{batch_loss, clamp_probability, sample_loss, PROB_FLOOR};
pub use model::{GradientReport, QcnnModel, QnnModel, QuantumClassifier};
pub use train::{train_classifier, train_classifier_with, StepMetric, TrainConfig, TrainOutcome, WeightedDataset};
