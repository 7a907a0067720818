//! Finite-distribution laboratory for free-choice and no-signalling
//! assumptions in ontological models.
//!
//! * [`dist`]: scenarios, joint tables (exact rational or `f64`), kernels.
//! * [`independence`]: sup-norm deviations from FR, FR′, NS, ST and the FR′
//!   factorization.
//! * [`gallery`]: Born-rule boxes, the PR box, and ontological models,
//!   including non-static readouts that keep free choice and no-signalling.
//! * [`lab`]: implication sweeps, derivation traces, penalized searches.

pub mod dist;
pub mod error;
pub mod gallery;
pub mod independence;
pub mod lab;
pub mod prob;

pub use dist::{
    compose_product, names, random_kernel, Assignment, ConditionalKernel, JointTable, Role,
    Scenario, VariableSpec,
};
pub use error::{Error, Result};
pub use independence::{
    assumption_deviation, ci_deviation, AssumptionId, CiQuery, Component, ViolationReport,
};
pub use prob::{Backend, Prob, Rational};
