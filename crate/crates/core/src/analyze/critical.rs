//! Overlaps between left-hand sides.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::term::{apply_subst, positions, replace_at, subterm_at, unify, ESystem, Position, Subst, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPair {
    pub peak: Term,
    /// Contraction of the outer rule at the root.
    pub left: Term,
    /// Contraction of the inner rule at `position`.
    pub right: Term,
    pub position: Position,
    /// `(outer, inner)` rule indices.
    pub rules: (usize, usize),
    pub unifier: Subst,
}

/// No lhs repeats a variable.
pub fn left_linear(es: &ESystem) -> bool {
    es.rules().iter().all(|rule| {
        let mut seen = BTreeSet::new();
        rule.lhs.var_occurrences().into_iter().all(|v| seen.insert(v))
    })
}

/// Every overlap of an inner lhs onto a non-variable position of an outer
/// lhs, except a rule overlapping itself at the root.
pub fn critical_pairs(es: &ESystem) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    for (i, outer) in es.rules().iter().enumerate() {
        for p in positions(&outer.lhs) {
            let sub = subterm_at(&outer.lhs, &p).expect("position of the lhs");
            if sub.is_var() {
                continue;
            }
            for (j, inner) in es.rules().iter().enumerate() {
                if i == j && p.is_root() {
                    continue;
                }
                let rename = |v: &str| format!("{v}'");
                let inner_lhs = inner.lhs.rename_vars(&rename);
                let inner_rhs = inner.rhs.rename_vars(&rename);
                let Some(mgu) = unify(sub, &inner_lhs) else {
                    continue;
                };
                let peak = apply_subst(&outer.lhs, &mgu);
                let left = apply_subst(&outer.rhs, &mgu);
                let right = replace_at(&peak, &p, apply_subst(&inner_rhs, &mgu))
                    .expect("position survives instantiation");
                out.push(CriticalPair {
                    peak,
                    left,
                    right,
                    position: p.clone(),
                    rules: (i, j),
                    unifier: mgu,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_trs};

    #[test]
    fn add_has_no_overlaps() {
        let es = parse_trs(
            "sig add/2 succ/1 zero/0\nvars x y\nrule add(zero, y) -> y\n\
             rule add(succ(x), y) -> succ(add(x, y))\n",
        )
        .unwrap();
        assert!(left_linear(&es));
        assert!(critical_pairs(&es).is_empty());
    }

    #[test]
    fn nested_overlap() {
        let es = parse_trs("sig f/1 g/1 a/0 b/0\nvars x\nrule f(g(x)) -> x\nrule g(a) -> b\n").unwrap();
        let cps = critical_pairs(&es);
        assert_eq!(cps.len(), 1);
        let cp = &cps[0];
        assert_eq!(cp.peak, parse_term("f(g(a))").unwrap());
        assert_eq!(cp.left, parse_term("a").unwrap());
        assert_eq!(cp.right, parse_term("f(b)").unwrap());
        assert_eq!(cp.position, Position(vec![0]));
        assert_eq!(cp.rules, (0, 1));
    }

    #[test]
    fn repeated_variable_is_not_left_linear() {
        let es = parse_trs("sig f/2\nvars x\nrule f(x, x) -> x\n").unwrap();
        assert!(!left_linear(&es));
    }

    #[test]
    fn self_overlap_below_root_is_kept() {
        let es = parse_trs("sig f/1\nvars x\nrule f(f(x)) -> x\n").unwrap();
        let cps = critical_pairs(&es);
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].peak.to_string(), "f(f(f(x')))");
    }
}
