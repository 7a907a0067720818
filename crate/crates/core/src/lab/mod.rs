//! Certification of the implication from FR′, NS and ST to FR: random sweeps,
//! a step-by-step derivation trace, and penalized searches probing each premise.

mod search;
mod sweep;
mod trace;

pub use search::{
    penalized_search, DeviationProfile, SearchConfig, SearchMode, SearchResult, DEFAULT_MASS_FLOOR,
    DEFAULT_PENALTY_WEIGHT, PENALTY_ESCALATION,
};
pub use sweep::{sweep_model_seed, verify_implication_sweep, Quantiles, SweepReport};
pub use trace::{derivation_trace, DerivationTrace, StepResidual, TraceStep};
