//! Boosting: confidence-weighted AdaBoost over circuit classifiers and the
//! multiclass AdaBoost.M1 (SAMME) baseline.

mod boost;
mod model;
mod weights;

pub use boost::{
    adaboost_m1, adaboost_q, tune_c, BoostConfig, BoostOutcome, CGrid, CTuning, CircuitLearner, FittedMember, RoundLog,
    WeakLearner,
};
pub use model::{accuracy, combine, ensemble_predict, member_probs, EnsembleModel, Voting, WeakClassifierRecord};
pub use weights::{
    alpha_from_masses, classifier_weight, confidence_masses, init_weights, samme_alpha, update_weights,
    update_weights_m1, weight_entropy, weighted_error, DEFAULT_ALPHA_CAP,
};
