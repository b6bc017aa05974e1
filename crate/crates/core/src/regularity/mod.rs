//! Hölder-norm estimation, the displacement inequality, verification of
//! (k,u)-nesting witnesses with the Nesting Lemma quantities, and the ℤ²
//! orbit diagnostic.
//!
//! Hölder norms are grid maxima, hence lower bounds; they are inflated by
//! [`HOLDER_INFLATION`] wherever an inequality needs the true norm on its
//! large side.

mod holder;
mod knest;
mod witness;
mod z2;

use thiserror::Error;

pub use holder::{
    check_displacement, holder_norm, holder_norm_local, holder_norm_of, uniform_grid, DisplacementReport,
    HolderEstimate, HOLDER_INFLATION,
};
pub use knest::{k_tau_lower_bound, knest_contradiction_quantities, min_k_for_tau, KnestReport, KnestRow};
pub use witness::{
    check_condition_ii, verify_nesting_witness, ConditionFailure, FailureKind, MapKind, NestingReport, NestingWitness,
    SmoothMap, WitnessMap, SMOOTH_SLACK,
};
pub use z2::{z2_sequence_diagnostic, Horn, Z2Report, Z2Row};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegularityError {
    #[error("bad samples: {0}")]
    Samples(String),
    #[error("malformed nesting witness: {0}")]
    MalformedWitness(String),
    #[error("configuration violated: {0}")]
    Configuration(String),
}
