//! Reduct sets computed directly on terms, with no depth bound. These are
//! the ground truth the bounded relations in `ops` are checked against.

use std::collections::BTreeSet;

use crate::term::{apply_subst, match_term, positions, replace_at, subterm_at, ESystem, Term};

/// Root contractions: `{rγ : l -> r a rule, γ = match(l, t)}`.
pub fn ground_image(t: &Term, es: &ESystem) -> BTreeSet<Term> {
    es.rules()
        .iter()
        .filter_map(|rule| match_term(&rule.lhs, t).map(|g| apply_subst(&rule.rhs, &g)))
        .collect()
}

/// Root contractions of literal rule pairs only, without instantiation.
pub fn raw_ground_image(t: &Term, es: &ESystem) -> BTreeSet<Term> {
    es.rules()
        .iter()
        .filter(|rule| &rule.lhs == t)
        .map(|rule| rule.rhs.clone())
        .collect()
}

fn seq_image_by(t: &Term, root: impl Fn(&Term) -> BTreeSet<Term>) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for p in positions(t) {
        let sub = subterm_at(t, &p).expect("position comes from the term");
        for r in root(sub) {
            out.insert(replace_at(t, &p, r).expect("position comes from the term"));
        }
    }
    out
}

/// One contraction at one position.
pub fn seq_image(t: &Term, es: &ESystem) -> BTreeSet<Term> {
    seq_image_by(t, |s| ground_image(s, es))
}

/// One contraction of a literal rule pair at one position.
pub fn seq_image_raw(t: &Term, es: &ESystem) -> BTreeSet<Term> {
    seq_image_by(t, |s| raw_ground_image(s, es))
}

/// Every combination of one element per child set.
fn rebuild(symbol: &str, child_sets: &[BTreeSet<Term>]) -> Vec<Term> {
    let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
    for set in child_sets {
        let mut next = Vec::with_capacity(acc.len() * set.len());
        for prefix in &acc {
            for c in set {
                let mut v = prefix.clone();
                v.push(c.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|children| Term::Node(symbol.to_string(), children))
        .collect()
}

/// Disjoint redexes contracted simultaneously.
pub fn parallel_image(t: &Term, es: &ESystem) -> BTreeSet<Term> {
    match t {
        Term::Var(_) => BTreeSet::from([t.clone()]),
        Term::Node(f, children) => {
            let sets: Vec<BTreeSet<Term>> = children.iter().map(|c| parallel_image(c, es)).collect();
            let mut out: BTreeSet<Term> = rebuild(f, &sets).into_iter().collect();
            out.extend(ground_image(t, es));
            out
        }
    }
}

/// Arguments reduced first, then an optional contraction at the root, so
/// nested redexes can be contracted in one step.
pub fn full_image(t: &Term, es: &ESystem) -> BTreeSet<Term> {
    match t {
        Term::Var(_) => BTreeSet::from([t.clone()]),
        Term::Node(f, children) => {
            let sets: Vec<BTreeSet<Term>> = children.iter().map(|c| full_image(c, es)).collect();
            let mut out = BTreeSet::new();
            for u in rebuild(f, &sets) {
                out.extend(ground_image(&u, es));
                out.insert(u);
            }
            out
        }
    }
}

/// Rule instances whose substitution part is itself reduced.
pub fn scc_image(t: &Term, es: &ESystem) -> BTreeSet<Term> {
    match t {
        Term::Var(_) => BTreeSet::from([t.clone()]),
        Term::Node(f, children) => {
            let sets: Vec<BTreeSet<Term>> = children.iter().map(|c| scc_image(c, es)).collect();
            let mut out: BTreeSet<Term> = rebuild(f, &sets).into_iter().collect();
            for rule in es.rules() {
                let Some(gamma) = match_term(&rule.lhs, t) else {
                    continue;
                };
                let vars: Vec<&str> = gamma.domain().collect();
                let reducts: Vec<Vec<Term>> = vars
                    .iter()
                    .map(|v| scc_image(gamma.get(v).unwrap(), es).into_iter().collect())
                    .collect();
                let mut pick = vec![0usize; vars.len()];
                loop {
                    let reduced = crate::term::Subst::from_pairs(
                        vars.iter().zip(&pick).enumerate().map(|(k, (v, &p))| (*v, reducts[k][p].clone())),
                    );
                    out.insert(apply_subst(&rule.rhs, &reduced));
                    let mut k = pick.len();
                    let advanced = loop {
                        if k == 0 {
                            break false;
                        }
                        k -= 1;
                        pick[k] += 1;
                        if pick[k] < reducts[k].len() {
                            break true;
                        }
                        pick[k] = 0;
                    };
                    if !advanced {
                        break;
                    }
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Ground,
    Seq,
    Parallel,
    Full,
    Scc,
}

impl Mode {
    pub fn image(self, t: &Term, es: &ESystem) -> BTreeSet<Term> {
        match self {
            Mode::Ground => ground_image(t, es),
            Mode::Seq => seq_image(t, es),
            Mode::Parallel => parallel_image(t, es),
            Mode::Full => full_image(t, es),
            Mode::Scc => scc_image(t, es),
        }
    }
}

/// Every term reachable from `start` by `image`, breadth first, visiting
/// at most `limit` terms. The flag is false when the limit cut it short.
pub fn reachable<T: Ord + Clone>(
    start: &T,
    limit: usize,
    image: &mut impl FnMut(&T) -> BTreeSet<T>,
) -> (BTreeSet<T>, bool) {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut frontier = vec![start.clone()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for t in frontier {
            for s in image(&t) {
                if seen.contains(&s) {
                    continue;
                }
                if seen.len() >= limit {
                    return (seen, false);
                }
                seen.insert(s.clone());
                next.push(s);
            }
        }
        frontier = next;
    }
    (seen, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_trs};

    const ADD: &str = "sig add/2 succ/1 zero/0\nvars x y\n\
        rule add(zero, y) -> y\nrule add(succ(x), y) -> succ(add(x, y))\n";

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<Term> {
        items.iter().map(|s| t(s)).collect()
    }

    #[test]
    fn ground_image_examples() {
        let es = parse_trs(ADD).unwrap();
        assert_eq!(ground_image(&t("add(zero,zero)"), &es), set(&["zero"]));
        assert!(ground_image(&t("succ(add(zero,zero))"), &es).is_empty());
        assert!(ground_image(&t("x"), &es).is_empty());
    }

    #[test]
    fn seq_image_examples() {
        let es = parse_trs(ADD).unwrap();
        assert_eq!(seq_image(&t("succ(add(zero,zero))"), &es), set(&["succ(zero)"]));
        assert_eq!(
            seq_image(&t("add(add(zero,zero),add(zero,zero))"), &es),
            set(&["add(zero,add(zero,zero))", "add(add(zero,zero),zero)"])
        );
        assert!(seq_image(&t("zero"), &es).is_empty());
    }

    #[test]
    fn parallel_image_examples() {
        let es = parse_trs(ADD).unwrap();
        assert_eq!(
            parallel_image(&t("add(zero,zero)"), &es),
            set(&["add(zero,zero)", "zero"])
        );
        assert!(parallel_image(&t("add(add(zero,zero),add(zero,zero))"), &es)
            .contains(&t("add(zero,zero)")));
        assert_eq!(parallel_image(&t("x"), &es), set(&["x"]));
    }

    #[test]
    fn full_image_contracts_nested_redexes() {
        let es = parse_trs(ADD).unwrap();
        let img = full_image(&t("add(succ(add(zero,zero)),zero)"), &es);
        assert!(img.contains(&t("add(succ(zero),zero)")));
        assert!(img.contains(&t("succ(add(zero,zero))")));
        // the contractum of the root step is not reduced again
        assert!(!img.contains(&t("succ(zero)")));
        assert!(full_image(&t("add(zero,add(zero,zero))"), &es).contains(&t("zero")));
        assert_eq!(full_image(&t("zero"), &es), set(&["zero"]));
    }

    #[test]
    fn scc_image_reduces_inside_substitutions() {
        let es = parse_trs(ADD).unwrap();
        assert!(scc_image(&t("add(zero,add(zero,zero))"), &es).contains(&t("zero")));
        assert_eq!(scc_image(&t("x"), &es), set(&["x"]));
    }

    #[test]
    fn raw_mode_only_contracts_literal_pairs() {
        let es = parse_trs("sig f/1 a/0 b/0\nvars x\nrule f(a) -> b\nrule f(f(x)) -> x\n").unwrap();
        assert_eq!(seq_image_raw(&t("f(f(a))"), &es), set(&["f(b)"]));
        assert_eq!(seq_image(&t("f(f(a))"), &es), set(&["a", "f(b)"]));
    }
}
