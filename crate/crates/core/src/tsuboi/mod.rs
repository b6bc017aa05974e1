//! The nested action of `(ℤ≀ℤ)×ℤ` on [0,1]: the three-level interval
//! structure, block diffeomorphisms `a`, `b`, `t`, and structural checks.

mod action;
mod params;
mod profile;
mod structure;
mod verify;

use thiserror::Error;

pub use action::{build_action, BlockDiffeo, ConstructedAction, Generator};
pub use params::Params;
pub use profile::Chart;
pub use structure::{raw_length, raw_sum, LevelStructure3, Piece, REFERENCE_HALF_WIDTH, V3};
pub use verify::{
    block_displacement, check_log_deriv_lipschitz, column_displacement, derivative_holder, displacement_check,
    junction_report, nested_support_check, nested_support_report, tsuboi_nesting_witness, verify_commutations,
    BlockDisplacement, ColumnDisplacement, CommutationReport, DerivativeHolder, JunctionReport, LipschitzReport,
    NestedSupportReport, VALID_MARGIN,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TsuboiError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("lengths are not summable: {0}")]
    NotSummable(String),
    #[error("truncation N = {0} must be at least 2")]
    Truncation(usize),
}
