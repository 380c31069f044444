//! Relational term rewriting over bounded term universes.
//!
//! Terms and rules live in [`term`]; [`universe`] enumerates finite
//! carriers; [`rel`] holds extensional relations and the fixed-point
//! engine; [`ops`] builds the rewriting operators on top; [`reduce`]
//! computes the same reductions as unbounded reduct sets; [`lambda`]
//! covers de Bruijn β; [`analyze`] runs confluence checks and law suites.

pub mod analyze;
pub mod lambda;
pub mod ops;
pub mod reduce;
pub mod rel;
pub mod syntax;
pub mod term;
pub mod universe;

pub use rel::Rel;
pub use term::{ESystem, Position, Rule, Signature, Subst, Term, TermError, VarSet};
pub use universe::Universe;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("relations live over different universes")]
    UniverseMismatch,
    #[error("term `{0}` is not in the universe")]
    NotInUniverse(String),
    #[error("operator is not monotone: iterate {iteration} is not above its predecessor")]
    NonMonotone { iteration: usize },
    #[error("fixed-point iteration exceeded its bound of {bound} steps")]
    IterationBound { bound: usize },
    #[error("rule {index} has depth {rule_depth}, deeper than the universe bound {depth}")]
    RuleTooDeep {
        index: usize,
        rule_depth: usize,
        depth: usize,
    },
    #[error("universe signature differs from the system's signature")]
    SignatureMismatch,
    #[error("rule {index} mentions variables outside the universe")]
    RuleNotEmbeddable { index: usize },
    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),
    #[error("enumeration would produce {size} terms, exceeding the cardinality cap of {cap}")]
    LamCapExceeded { size: u128, cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
