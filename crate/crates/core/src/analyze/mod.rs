//! Confluence techniques, critical pairs, sequentialisation and law suites.

pub mod confluence;
pub mod critical;
pub mod laws;
pub mod random;
pub mod seqn;

pub use confluence::{
    diamond_check, kleisli_premise_check, nesting_check, orthogonality_check, DiamondReport,
    DiamondWitness, KleisliReport, Outcome, OrthogonalityReport, Technique,
};
pub use critical::{critical_pairs, left_linear, CriticalPair};
pub use laws::{law_suite, Counterexample, LawConfig, LawReport, LawResult};
pub use seqn::sequentialisation_check;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::lambda::{enumerate_lams, lam_full_image, lam_parallel_image, LamTerm};

/// One named check with its pass/fail status, as emitted by reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub anchor: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, pass: bool, witness: Option<String>) -> Self {
        Verdict {
            name: name.into(),
            anchor: anchor.into(),
            pass,
            witness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LamMode {
    Parallel,
    Full,
}

impl LamMode {
    pub fn image(self, t: &LamTerm) -> BTreeSet<LamTerm> {
        match self {
            LamMode::Parallel => lam_parallel_image(t),
            LamMode::Full => lam_full_image(t),
        }
    }
}

/// Diamond check of a β-reduction over every term with at most `size`
/// nodes and free indices below `scope`.
pub fn lambda_diamond(scope: usize, size: usize, mode: LamMode) -> crate::Result<DiamondReport<LamTerm>> {
    let terms = enumerate_lams(scope, size)?;
    Ok(diamond_check(|t| mode.image(t), &terms))
}
