//! Exact piecewise-linear homeomorphisms of [0,1], Thompson's group F, and
//! word machinery for bounded searches.

mod homeo;
mod interval;
pub mod rational;
mod thompson;
mod word;

use thiserror::Error;

pub use homeo::{bump, PLHomeo};
pub use interval::Interval;
pub use rational::Rational;
pub use thompson::{half_copy, standard_genset, thompson_generators};
pub use word::{enumerate_elements, find_relation, for_each_reduced_word, GenSet, GroupWord, WordElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("point {0} lies outside [0,1]")]
    Domain(String),
    #[error("invalid PL homeomorphism: {0}")]
    InvalidHomeo(String),
    #[error("empty interval ({0}, {1})")]
    EmptyInterval(String, String),
    #[error("interval {0} is not invariant under the map")]
    NotInvariant(String),
    #[error("unbound generator {0:?}")]
    UnboundGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
}
