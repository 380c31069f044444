//! Seeded random relations and rewrite systems for property trials.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::rel::Rel;
use crate::term::{ESystem, Rule, Signature, Term, VarSet};
use crate::universe::Universe;

/// Each law draws from its own stream so that adding a law does not
/// disturb the inputs of the others.
pub fn law_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Expected out-degree used when no density is configured.
const AUTO_DEGREE: f64 = 2.0;

pub fn auto_density(support: usize) -> f64 {
    if support == 0 {
        0.0
    } else {
        (AUTO_DEGREE / support as f64).min(0.3)
    }
}

/// Random relation between terms of depth `≤ support_depth`, each pair
/// present with probability `density` (or an automatic density).
pub fn random_rel(
    u: &Arc<Universe>,
    support_depth: usize,
    density: Option<f64>,
    rng: &mut impl Rng,
) -> Rel {
    let n = u.layer_end(support_depth);
    let p = density.unwrap_or_else(|| auto_density(n));
    let mut r = Rel::bottom(u);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                r.insert(i, j);
            }
        }
    }
    r
}

/// Random relation between variable leaves.
pub fn random_var_rel(u: &Arc<Universe>, rng: &mut impl Rng) -> Rel {
    let mut r = Rel::bottom(u);
    for &i in u.var_ids() {
        for &j in u.var_ids() {
            if rng.gen_bool(0.5) {
                r.insert(i, j);
            }
        }
    }
    r
}

fn random_term(sig: &Signature, vars: &[String], depth: usize, allow_var: bool, rng: &mut impl Rng) -> Term {
    let symbols: Vec<&(String, usize)> = sig
        .entries()
        .iter()
        .filter(|(_, a)| depth > 1 || *a == 0)
        .collect();
    let choices = symbols.len() + if allow_var { vars.len() } else { 0 };
    let k = rng.gen_range(0..choices);
    if k >= symbols.len() {
        return Term::Var(vars[k - symbols.len()].clone());
    }
    let (name, arity) = symbols[k];
    let children = (0..*arity)
        .map(|_| random_term(sig, vars, depth - 1, true, rng))
        .collect();
    Term::Node(name.clone(), children)
}

/// A system over `{f/2, g/1, c/0}` with variables `{x, y}` and one to
/// three rules of depth at most 2.
pub fn random_esystem(seed: u64) -> ESystem {
    let sig = Signature::new([("f", 2), ("g", 1), ("c", 0)]).expect("distinct symbols");
    let vars = VarSet::new(["x", "y"]).expect("distinct names");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=3);
    let mut rules = Vec::with_capacity(count);
    while rules.len() < count {
        let lhs = random_term(&sig, vars.names(), 2, false, &mut rng);
        let bound: Vec<String> = lhs.vars().into_iter().map(str::to_string).collect();
        let rhs = random_term(&sig, &bound, 2, !bound.is_empty(), &mut rng);
        if lhs != rhs {
            rules.push(Rule::new(lhs, rhs).expect("rhs drawn from lhs variables"));
        }
    }
    ESystem::new(sig, vars, rules).expect("well-formed by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_systems_are_valid_and_deterministic() {
        for seed in 0..50 {
            let es = random_esystem(seed);
            assert_eq!(es, random_esystem(seed));
            assert!(es.max_rule_depth() <= 2);
        }
    }
}
