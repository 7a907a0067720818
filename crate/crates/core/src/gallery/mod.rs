//! Concrete models: Born-rule boxes, the PR box, and ontological models.

mod ontic;
mod quantum;

pub use ontic::{
    adaptive_c_model, local_deterministic_model, ontic_model, outcome_revealing_model,
    premise_model_random, AlphabetSizes, OntModelSpec, ResponseFunction, ZSource,
};
pub use quantum::{
    chsh_correlator, chsh_settings, chsh_value, pr_box_kernel, two_qubit_kernel,
    with_uniform_settings, BlochSetting, TwoQubitState,
};
