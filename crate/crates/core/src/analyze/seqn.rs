//! Sequentialisation of the signature relator: `Γa` changes exactly one
//! argument, where `Σ̂a` changes all of them at once.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::analyze::laws::{check_equal, check_leq, run_trials, LawResult};
use crate::analyze::random::random_rel;
use crate::ops::eta_restrict;
use crate::rel::Rel;
use crate::term::ESystem;
use crate::universe::{enumerate, Shape, Universe};
use crate::Result;

/// One constructor layer with exactly one argument `a`-related and the rest
/// equal; variables related as in `a`; constants related to themselves.
pub fn gamma(a: &Rel) -> Rel {
    let u = a.universe();
    let mut out = eta_restrict(a);
    for t in 0..u.len() {
        let Shape::Node(sym, children) = u.shape(t) else {
            continue;
        };
        if children.is_empty() {
            out.insert(t, t);
            continue;
        }
        let mut target = children.clone();
        for (i, &c) in children.iter().enumerate() {
            for d in a.row(c) {
                target[i] = d;
                if let Some(s) = u.node_id(*sym, &target) {
                    out.insert(t, s);
                }
            }
            target[i] = c;
        }
    }
    out
}

/// One constructor layer with every argument `a`-related.
pub fn sigma_hat(a: &Rel) -> Rel {
    let u = a.universe();
    let mut out = eta_restrict(a);
    for t in 0..u.len() {
        let Shape::Node(sym, children) = u.shape(t) else {
            continue;
        };
        for &s in u.with_symbol(*sym) {
            let Shape::Node(_, targets) = u.shape(s) else {
                continue;
            };
            if children.iter().zip(targets).all(|(&c, &d)| a.contains(c, d)) {
                out.insert(t, s);
            }
        }
    }
    out
}

/// The five sequentialisation laws over random relations on terms of depth
/// `≤ depth - 1`, whose one-layer images live in the depth `depth` universe.
pub fn sequentialisation_check(
    es: &ESystem,
    depth: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<LawResult>> {
    let u: Arc<Universe> = enumerate(es.sig(), es.vars(), depth)?;
    let support = depth - 1;
    let fresh = |rng: &mut ChaCha8Rng| random_rel(&u, support, None, rng);
    let mut out = Vec::new();

    out.push(run_trials("seq-identity", "ΓΔ = Δ", 1, 1, seed, 100, |_| {
        let delta = Rel::identity_upto(&u, support);
        check_equal(&gamma(&delta), &Rel::identity(&u), &[])
    })?);
    out.push(run_trials("seq-converse", "Γ(a°) = (Γa)°", 1, trials, seed, 101, |rng| {
        let a = fresh(rng);
        check_equal(&gamma(&a.converse()), &gamma(&a).converse(), &[("a", &a)])
    })?);
    out.push(run_trials("seq-join", "Γ(a ∨ b) = Γa ∨ Γb", 1, trials, seed, 102, |rng| {
        let a = fresh(rng);
        let b = fresh(rng);
        check_equal(&gamma(&a.join(&b)?), &gamma(&a).join(&gamma(&b))?, &[("a", &a), ("b", &b)])
    })?);
    out.push(run_trials(
        "seq-below-relator",
        "Γa ≤ Σ̂a for reflexive a",
        1,
        trials,
        seed,
        103,
        |rng| {
            let a = fresh(rng).join(&Rel::identity_upto(&u, support))?;
            check_leq(&gamma(&a), &sigma_hat(&a), &[("a", &a)])
        },
    )?);
    out.push(run_trials("relator-below-seq-star", "Σ̂a ≤ (Γa)*", 1, trials, seed, 104, |rng| {
        let a = fresh(rng);
        check_leq(&sigma_hat(&a), &gamma(&a).rtc(), &[("a", &a)])
    })?);
    Ok(out)
}
