//! Bounded-budget combinatorial dynamics of finitely generated PL actions:
//! two-chains, crossed pairs, Conradian diagnostics, support classification,
//! centralizer obstructions and nesting extraction.
//!
//! Every finder is sound (returned witnesses are exact and re-validate) and
//! complete only up to the word budget.

mod classify;
mod crossed;
mod nesting;

use std::fmt;

use thiserror::Error;

use crate::exact_pl::{enumerate_elements, GenSet, GroupWord, Interval, PLHomeo, PlError};

pub use classify::{check_nested_or_disjoint, classify_supports, is_overlapping_pair, SupportClassification};
pub use crossed::{
    conradian_diagnostic, find_boundary_crossed_pair, find_crossed_pair, find_ping_pair, find_two_chain,
    find_two_chain_among, ping_from_two_chain, ConradianVerdict, CrossedPairWitness, CrossedVariant, TwoChain,
};
pub use nesting::{
    centralizer_obstruction, extract_nesting_witness, f_disjoint_commutators_check, f_seed, periodic_model, periodize,
    tower_seed, translation_example_witness, translation_like, CentralizerCertificate, FCheckReport,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("action needs at least one generator")]
    NoGenerators,
    #[error("word budget must be at least 1")]
    ZeroBudget,
    #[error("element does not commute with generator {0:?} on the window")]
    NotCentralizing(String),
    #[error("centralizing element has a fixed point at {0} inside the support")]
    CentralFixedPoint(String),
    #[error("nesting depth k must be at least 2")]
    DepthTooSmall,
    #[error("invalid nesting witness: {0}")]
    Witness(String),
    #[error(transparent)]
    Pl(#[from] PlError),
}

/// A finitely generated group acting on [0,1] by PL homeomorphisms, together
/// with the word budget for bounded searches.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    generators: GenSet,
    word_budget: usize,
}

impl ActionSpec {
    pub fn new(generators: GenSet, word_budget: usize) -> Result<Self, DynamicsError> {
        if generators.is_empty() {
            return Err(DynamicsError::NoGenerators);
        }
        if word_budget == 0 {
            return Err(DynamicsError::ZeroBudget);
        }
        Ok(ActionSpec { generators, word_budget })
    }

    pub fn generators(&self) -> &GenSet {
        &self.generators
    }

    pub fn word_budget(&self) -> usize {
        self.word_budget
    }

    pub fn with_budget(&self, word_budget: usize) -> Result<Self, DynamicsError> {
        ActionSpec::new(self.generators.clone(), word_budget)
    }

    /// Distinct nontrivial elements of word length ≤ budget.
    pub fn elements(&self) -> Vec<(GroupWord, PLHomeo)> {
        enumerate_elements(&self.generators, self.word_budget)
    }

    pub fn evaluate(&self, w: &GroupWord) -> Result<PLHomeo, DynamicsError> {
        Ok(w.evaluate(&self.generators)?)
    }
}

/// One support component together with a word whose evaluation has it as a
/// component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub interval: Interval,
    pub word: GroupWord,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} of [{}]", self.interval, self.word)
    }
}

/// All distinct component intervals of elements up to the budget, each tagged
/// with the first word (length-lex) realizing it.
pub(crate) fn component_catalogue(elements: &[(GroupWord, PLHomeo)]) -> Vec<Component> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (w, g) in elements {
        for j in g.support_components() {
            if seen.insert(j.clone()) {
                out.push(Component { interval: j, word: w.clone() });
            }
        }
    }
    out
}
