//! Diamond checks over image functions, and the extensional premises of the
//! parallel-moves and Tait–Martin-Löf arguments.
//!
//! Inclusions are computed over the bounded universe first. A pair that
//! fails there is then rechecked on unbounded reduct sets: if the join or
//! witness exists outside the universe the failure was a truncation
//! artifact and is counted, not reported.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::ops::{compreff, full_ext, ground_instances, parallel_ext, rules_subst};
use crate::reduce::{full_image, ground_image, parallel_image, reachable};
use crate::rel::Rel;
use crate::term::{match_term, ESystem, Term};
use crate::universe::Universe;
use crate::Result;

/// Bound on terms visited when joining peaks through reduction sequences.
pub const JOIN_SEARCH_LIMIT: usize = 2_000;
/// Reducts deeper than the universe by more than this are not explored.
pub const JOIN_DEPTH_SLACK: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiamondWitness<T> {
    pub peak: T,
    pub left: T,
    pub right: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiamondReport<T> {
    pub terms: usize,
    pub peaks: usize,
    pub failure: Option<DiamondWitness<T>>,
}

impl<T> DiamondReport<T> {
    pub fn pass(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that every pair of one-step reducts of every term has a common
/// one-step reduct. Reports the first failing peak in input order.
pub fn diamond_check<T: Ord + Clone>(
    image: impl Fn(&T) -> BTreeSet<T>,
    terms: &[T],
) -> DiamondReport<T> {
    let mut memo: BTreeMap<T, BTreeSet<T>> = BTreeMap::new();
    let mut peaks = 0;
    for t in terms {
        let reducts: Vec<T> = image(t).into_iter().collect();
        for s in &reducts {
            if !memo.contains_key(s) {
                memo.insert(s.clone(), image(s));
            }
        }
        for (i, left) in reducts.iter().enumerate() {
            for right in &reducts[i..] {
                peaks += 1;
                let joins = memo[left].intersection(&memo[right]).next().is_some();
                if !joins {
                    return DiamondReport {
                        terms: terms.len(),
                        peaks,
                        failure: Some(DiamondWitness {
                            peak: t.clone(),
                            left: left.clone(),
                            right: right.clone(),
                        }),
                    };
                }
            }
        }
    }
    DiamondReport {
        terms: terms.len(),
        peaks,
        failure: None,
    }
}

/// Result of one inclusion check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub pass: bool,
    pub witness: Option<(Term, Term)>,
    /// Pairs that failed in the universe but hold on unbounded terms.
    pub truncation_artifacts: usize,
}

impl Outcome {
    pub fn witness_string(&self) -> Option<String> {
        self.witness.as_ref().map(|(t, s)| format!("({t}, {s})"))
    }
}

/// Checks `lhs ≤ rhs`, letting `holds` overrule pairs missing from `rhs`.
pub fn arbitrated_inclusion(
    lhs: &Rel,
    rhs: &Rel,
    mut holds: impl FnMut(&Term, &Term) -> bool,
) -> Result<Outcome> {
    let u = lhs.universe();
    let mut artifacts = 0;
    for (i, j) in lhs.minus(rhs)?.pairs() {
        let (t, s) = (u.term(i), u.term(j));
        if holds(t, s) {
            artifacts += 1;
        } else {
            return Ok(Outcome {
                pass: false,
                witness: Some((t.clone(), s.clone())),
                truncation_artifacts: artifacts,
            });
        }
    }
    Ok(Outcome {
        pass: true,
        witness: None,
        truncation_artifacts: artifacts,
    })
}

fn exact_inclusion(lhs: &Rel, rhs: &Rel) -> Result<Outcome> {
    arbitrated_inclusion(lhs, rhs, |_, _| false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Technique {
    /// Parallel reduction `a^SP`.
    ParallelMoves,
    /// Full reduction `a^SF`.
    Tml,
}

impl Technique {
    fn relation(self, es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
        match self {
            Technique::ParallelMoves => parallel_ext(es, u),
            Technique::Tml => full_ext(es, u),
        }
    }

    pub fn image(self, t: &Term, es: &ESystem) -> BTreeSet<Term> {
        match self {
            Technique::ParallelMoves => parallel_image(t, es),
            Technique::Tml => full_image(t, es),
        }
    }
}

/// Is `(x, z)` in `a°[R]` on unbounded terms, i.e. `x = rγ`, `z = lγ′` for
/// some rule `l -> r` with `γ(v) R γ′(v)`?
fn in_flipped_rule_subst(x: &Term, z: &Term, es: &ESystem, technique: Technique) -> bool {
    es.rules().iter().any(|rule| {
        let (Some(lower), Some(upper)) = (match_term(&rule.lhs, z), match_term(&rule.rhs, x)) else {
            return false;
        };
        let persists = upper.iter().all(|(v, before)| {
            let after = lower.get(v).expect("rhs variables occur in the lhs");
            technique.image(before, es).contains(after)
        });
        persists
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    /// `a[Δ]°;a[Δ] ≤ Δ`: root steps are unique.
    pub unique_root_steps: Outcome,
    /// `a[Δ]°;compreff(R) ≤ a°[R]`: reducing under a redex keeps it a redex.
    pub redexes_persist: Outcome,
}

impl OrthogonalityReport {
    pub fn pass(&self) -> bool {
        self.unique_root_steps.pass && self.redexes_persist.pass
    }
}

pub fn orthogonality_check(
    es: &ESystem,
    u: &Arc<Universe>,
    technique: Technique,
) -> Result<OrthogonalityReport> {
    let g = ground_instances(es, u)?;
    let peaks = g.converse().compose(&g)?;
    let unique_root_steps = exact_inclusion(&peaks, &Rel::identity(u))?;

    let r = technique.relation(es, u)?;
    let lhs = g.converse().compose(&compreff(&r))?;
    let rhs = rules_subst(es, u, &r, true)?;
    let redexes_persist =
        arbitrated_inclusion(&lhs, &rhs, |x, z| in_flipped_rule_subst(x, z, es, technique))?;
    Ok(OrthogonalityReport {
        unique_root_steps,
        redexes_persist,
    })
}

/// `a°[R] ≤ R;a°[Δ]`: reducing the substitution part of a redex can be
/// followed by a contraction of the reduced redex.
pub fn nesting_check(es: &ESystem, u: &Arc<Universe>, technique: Technique) -> Result<Outcome> {
    let r = technique.relation(es, u)?;
    let lhs = rules_subst(es, u, &r, true)?;
    let rhs = r.compose(&rules_subst(es, u, &Rel::identity(u), true)?)?;
    arbitrated_inclusion(&lhs, &rhs, |x, z| {
        let contracted = ground_image(z, es);
        technique.image(x, es).iter().any(|w| contracted.contains(w))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KleisliReport {
    pub weak: bool,
    /// `a[Δ]°;a^SP ≤ a^SP;a^SP°`, or with `(a^SP)*` on the right when weak.
    pub premise: Outcome,
    /// `a^SP°;a^SP ≤ a^SP;a^SP°` (or its starred form), checked when the premise holds.
    pub conclusion: Option<Outcome>,
}

impl KleisliReport {
    /// The premise fails, or both premise and conclusion hold.
    pub fn implication_holds(&self) -> bool {
        !self.premise.pass || self.conclusion.as_ref().is_some_and(|c| c.pass)
    }
}

pub fn kleisli_premise_check(es: &ESystem, u: &Arc<Universe>, weak: bool) -> Result<KleisliReport> {
    let g = ground_instances(es, u)?;
    let sp = parallel_ext(es, u)?;
    let target = if weak { sp.rtc() } else { sp.clone() };
    let joins = target.compose(&target.converse())?;
    let mut memo: BTreeMap<Term, BTreeSet<Term>> = BTreeMap::new();
    let mut joinable = |x: &Term, z: &Term| {
        let mut reach = |t: &Term| {
            memo.entry(t.clone())
                .or_insert_with(|| {
                    if weak {
                        let max_depth = u.depth() + JOIN_DEPTH_SLACK;
                        let mut step = |s: &Term| {
                            let mut next = parallel_image(s, es);
                            next.retain(|r| r.depth() <= max_depth);
                            next
                        };
                        reachable(t, JOIN_SEARCH_LIMIT, &mut step).0
                    } else {
                        parallel_image(t, es)
                    }
                })
                .clone()
        };
        let left = reach(x);
        let right = reach(z);
        left.intersection(&right).next().is_some()
    };
    let premise = arbitrated_inclusion(&g.converse().compose(&sp)?, &joins, &mut joinable)?;
    let conclusion = if premise.pass {
        Some(arbitrated_inclusion(
            &sp.converse().compose(&sp)?,
            &joins,
            &mut joinable,
        )?)
    } else {
        None
    };
    Ok(KleisliReport {
        weak,
        premise,
        conclusion,
    })
}
