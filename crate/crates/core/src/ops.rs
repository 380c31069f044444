//! Operators on relations over a term universe: compatible refinement,
//! relation substitution and its right adjoint, closures, the Barr lifting
//! of syntax, and the reduction relations built from an E-system.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::rel::{kleene_lfp, Rel};
use crate::term::{match_term, ESystem, Term};
use crate::universe::{Shape, Universe};
use crate::{Error, Result};

/// `{(v, v)}` for every variable leaf.
pub fn i_eta(u: &Arc<Universe>) -> Rel {
    Rel::from_pairs(u, u.var_ids().iter().map(|&v| (v, v)))
}

/// Calls `emit(s)` for every `s = o(s₁…sₙ)` with `t = o(t₁…tₙ)` and every
/// `(tᵢ, sᵢ) ∈ a`. Constants relate to themselves; variables to nothing.
fn compreff_row(a: &Rel, t: usize, emit: &mut impl FnMut(usize)) {
    let u = a.universe();
    let Shape::Node(sym, children) = u.shape(t) else {
        return;
    };
    if children.is_empty() {
        emit(t);
        return;
    }
    let rows: Vec<Vec<usize>> = children.iter().map(|&c| a.row(c).collect()).collect();
    if rows.iter().any(Vec::is_empty) {
        return;
    }
    let product: usize = rows.iter().fold(1usize, |acc, r| acc.saturating_mul(r.len()));
    let group = u.with_symbol(*sym);
    if product <= group.len() {
        let mut pick = vec![0usize; rows.len()];
        let mut target = vec![0usize; rows.len()];
        loop {
            for (k, &p) in pick.iter().enumerate() {
                target[k] = rows[k][p];
            }
            if let Some(s) = u.node_id(*sym, &target) {
                emit(s);
            }
            let mut k = pick.len();
            let advanced = loop {
                if k == 0 {
                    break false;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < rows[k].len() {
                    break true;
                }
                pick[k] = 0;
            };
            if !advanced {
                break;
            }
        }
    } else {
        for &s in group {
            let Shape::Node(_, targets) = u.shape(s) else {
                unreachable!("symbol group holds nodes only")
            };
            if children.iter().zip(targets).all(|(&c, &d)| a.contains(c, d)) {
                emit(s);
            }
        }
    }
}

/// Relates `o(t̄)` to `o(s̄)` when the arguments are pointwise `a`-related.
pub fn compreff(a: &Rel) -> Rel {
    let u = a.universe();
    let mut out = Rel::bottom(u);
    for t in 0..u.len() {
        compreff_row(a, t, &mut |s| out.insert(t, s));
    }
    out
}

pub fn compref(a: &Rel) -> Rel {
    let mut out = compreff(a);
    for &v in a.universe().var_ids() {
        out.insert(v, v);
    }
    out
}

/// Relates `o(t̄)` to `o(s̄)` when exactly one argument is `a`-related and
/// all the others are equal.
pub fn lin_compref(a: &Rel) -> Rel {
    let u = a.universe();
    let mut out = Rel::bottom(u);
    for t in 0..u.len() {
        let Shape::Node(sym, children) = u.shape(t) else {
            continue;
        };
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

/// `η°;a;η`: the pairs of `a` between variable leaves.
pub fn eta_restrict(a: &Rel) -> Rel {
    let u = a.universe();
    a.restrict(|i| u.is_var(i))
}

/// Precomputed view of the substitution relation `b` used by `a[b]`.
struct SubstSource<'a> {
    universe: &'a Universe,
    pairs: Vec<(usize, usize)>,
    sources: Vec<usize>,
    targets: Vec<usize>,
}

impl<'a> SubstSource<'a> {
    fn new(b: &'a Rel) -> Self {
        let pairs: Vec<(usize, usize)> = b.pairs().collect();
        let sources: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
        let targets: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
        SubstSource {
            universe: b.universe(),
            pairs,
            sources: sources.into_iter().collect(),
            targets: targets.into_iter().collect(),
        }
    }

    /// Visits `(pγ, qγ′)` for total substitutions with `γ(v) b γ′(v)` for
    /// every declared variable, keeping only instances inside the universe.
    /// Stops early, returning false, when `visit` returns false.
    fn instances(&self, p: usize, q: usize, visit: &mut impl FnMut(usize, usize) -> bool) -> bool {
        let u = self.universe;
        let nv = u.vars().len();
        if nv == 0 {
            return visit(p, q);
        }
        if self.pairs.is_empty() {
            return true;
        }
        let d = u.depth();
        // deepest value allowed per variable on each side
        let mut room_p = vec![usize::MAX; nv];
        let mut room_q = vec![usize::MAX; nv];
        for (v, level) in u.var_levels(p) {
            room_p[v] = room_p[v].min(d + 1 - level);
        }
        for (v, level) in u.var_levels(q) {
            room_q[v] = room_q[v].min(d + 1 - level);
        }
        let fits = |t: usize, room: usize| room == usize::MAX || u.term_depth(t) <= room;

        let mut options: Vec<Vec<(usize, usize)>> = Vec::with_capacity(nv);
        for v in 0..nv {
            let in_p = room_p[v] != usize::MAX;
            let in_q = room_q[v] != usize::MAX;
            let opts: Vec<(usize, usize)> = match (in_p, in_q) {
                (true, true) => self
                    .pairs
                    .iter()
                    .copied()
                    .filter(|&(s, t)| fits(s, room_p[v]) && fits(t, room_q[v]))
                    .collect(),
                (true, false) => self
                    .sources
                    .iter()
                    .filter(|&&s| fits(s, room_p[v]))
                    .map(|&s| (s, s))
                    .collect(),
                (false, true) => self
                    .targets
                    .iter()
                    .filter(|&&t| fits(t, room_q[v]))
                    .map(|&t| (t, t))
                    .collect(),
                (false, false) => vec![self.pairs[0]],
            };
            if opts.is_empty() {
                return true;
            }
            options.push(opts);
        }

        let mut pick = vec![0usize; nv];
        let mut left = vec![0usize; nv];
        let mut right = vec![0usize; nv];
        loop {
            for v in 0..nv {
                let (s, t) = options[v][pick[v]];
                left[v] = s;
                right[v] = t;
            }
            if let (Some(l), Some(r)) = (u.instantiate(p, &left), u.instantiate(q, &right)) {
                if !visit(l, r) {
                    return false;
                }
            }
            let mut k = nv;
            let advanced = loop {
                if k == 0 {
                    break false;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < options[k].len() {
                    break true;
                }
                pick[k] = 0;
            };
            if !advanced {
                return true;
            }
        }
    }
}

/// Relation substitution `a[b]`.
pub fn rel_subst(a: &Rel, b: &Rel) -> Result<Rel> {
    if a.universe().uid() != b.universe().uid() {
        return Err(Error::UniverseMismatch);
    }
    let src = SubstSource::new(b);
    let mut out = Rel::bottom(a.universe());
    for (p, q) in a.pairs() {
        src.instances(p, q, &mut |l, r| {
            out.insert(l, r);
            true
        });
    }
    Ok(out)
}

/// Right adjoint `b ≫ c`: the largest `x` with `x[b] ≤ c`, computed pairwise.
pub fn subst_adjoint(b: &Rel, c: &Rel) -> Result<Rel> {
    if b.universe().uid() != c.universe().uid() {
        return Err(Error::UniverseMismatch);
    }
    let u = b.universe();
    let src = SubstSource::new(b);
    let mut out = Rel::bottom(u);
    for t in 0..u.len() {
        for s in 0..u.len() {
            if src.instances(t, s, &mut |l, r| c.contains(l, r)) {
                out.insert(t, s);
            }
        }
    }
    Ok(out)
}

/// Context closure `μx. a ∨ compref(x)`.
pub fn ctx_closure(a: &Rel) -> Result<Rel> {
    kleene_lfp(a.universe(), |x| a.join(&compref(x)))
}

fn check_rules_fit(es: &ESystem, u: &Universe) -> Result<()> {
    if es.sig() != u.sig() {
        return Err(Error::SignatureMismatch);
    }
    for (index, rule) in es.rules().iter().enumerate() {
        if rule.depth() > u.depth() {
            return Err(Error::RuleTooDeep {
                index,
                rule_depth: rule.depth(),
                depth: u.depth(),
            });
        }
    }
    Ok(())
}

/// The rule pairs as a relation over `u`. Fails when a rule is deeper than
/// the universe or uses variables the universe does not declare.
pub fn embed_rules(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    check_rules_fit(es, u)?;
    let mut out = Rel::bottom(u);
    for (index, rule) in es.rules().iter().enumerate() {
        match (u.id(&rule.lhs), u.id(&rule.rhs)) {
            (Some(l), Some(r)) => out.insert(l, r),
            _ => return Err(Error::RuleNotEmbeddable { index }),
        }
    }
    Ok(out)
}

fn rules_embed(es: &ESystem, u: &Universe) -> bool {
    es.rules()
        .iter()
        .all(|r| u.id(&r.lhs).is_some() && u.id(&r.rhs).is_some())
}

/// `a[x]`, or `a°[x]` when `flip` holds, where `a` is the rule relation.
///
/// Uses relation substitution when the rules embed in `u`; otherwise
/// (e.g. a universe without variables) decomposes each term by matching.
pub fn rules_subst(es: &ESystem, u: &Arc<Universe>, x: &Rel, flip: bool) -> Result<Rel> {
    check_rules_fit(es, u)?;
    if x.universe().uid() != u.uid() {
        return Err(Error::UniverseMismatch);
    }
    if rules_embed(es, u) {
        let rules = embed_rules(es, u)?;
        let rules = if flip { rules.converse() } else { rules };
        return rel_subst(&rules, x);
    }
    let sources: Vec<usize> = (0..u.len()).filter(|&i| !x.row_is_empty(i)).collect();
    let targets: Vec<usize> = {
        let mut seen = vec![false; u.len()];
        for (_, j) in x.pairs() {
            seen[j] = true;
        }
        (0..u.len()).filter(|&j| seen[j]).collect()
    };
    let mut out = Rel::bottom(u);
    if x.is_empty() && !es.vars().is_empty() {
        return Ok(out);
    }
    let names = es.vars().names();
    for t in 0..u.len() {
        for rule in es.rules() {
            let (pat, other) = if flip {
                (&rule.rhs, &rule.lhs)
            } else {
                (&rule.lhs, &rule.rhs)
            };
            let Some(gamma) = match_term(pat, u.term(t)) else {
                continue;
            };
            let in_other = other.vars();
            let mut options: Vec<Vec<usize>> = Vec::new();
            let mut bound: Vec<&str> = Vec::new();
            let mut feasible = true;
            for name in names {
                let in_pat = gamma.get(name);
                let needed = in_other.contains(name.as_str());
                let opts: Vec<usize> = match (in_pat, needed) {
                    (Some(g), true) => x.row(u.id(g).expect("subterm of a universe term")).collect(),
                    (Some(g), false) => {
                        if x.row_is_empty(u.id(g).expect("subterm of a universe term")) {
                            Vec::new()
                        } else {
                            vec![0]
                        }
                    }
                    (None, true) => targets.clone(),
                    (None, false) => {
                        if sources.is_empty() {
                            Vec::new()
                        } else {
                            vec![0]
                        }
                    }
                };
                if opts.is_empty() {
                    feasible = false;
                    break;
                }
                if needed {
                    bound.push(name);
                    options.push(opts);
                }
            }
            if !feasible {
                continue;
            }
            let mut pick = vec![0usize; options.len()];
            loop {
                let value = |v: &str| {
                    bound
                        .iter()
                        .position(|b| *b == v)
                        .map(|k| options[k][pick[k]])
                };
                if let Some(s) = u.instantiate_term(other, &value) {
                    out.insert(t, s);
                }
                let lens: Vec<usize> = options.iter().map(Vec::len).collect();
                if !advance(&mut pick, &lens) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Mixed-radix odometer, last position fastest.
fn advance(pick: &mut [usize], lens: &[usize]) -> bool {
    for k in (0..pick.len()).rev() {
        pick[k] += 1;
        if pick[k] < lens[k] {
            return true;
        }
        pick[k] = 0;
    }
    false
}

/// Ground instances `a[Δ]` of the rules.
pub fn ground_instances(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    rules_subst(es, u, &Rel::identity(u), false)
}

/// `a[Δ]` through relation substitution only; requires embeddable rules.
pub fn ground_instances_via_subst(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    rel_subst(&embed_rules(es, u)?, &Rel::identity(u))
}

/// `a[Δ]` by matching every universe term against every lhs.
pub fn ground_instances_via_match(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    check_rules_fit(es, u)?;
    let mut out = Rel::bottom(u);
    for t in 0..u.len() {
        for rule in es.rules() {
            if let Some(gamma) = match_term(&rule.lhs, u.term(t)) {
                let value = |v: &str| gamma.get(v).and_then(|g| u.id(g));
                if let Some(s) = u.instantiate_term(&rule.rhs, &value) {
                    out.insert(t, s);
                }
            }
        }
    }
    Ok(out)
}

/// `a^SC = a[Δ]^C`.
pub fn subst_ctx_closure(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    ctx_closure(&ground_instances(es, u)?)
}

/// Barr lifting of syntax applied to a relation on variables: relates
/// terms of identical shape whose variable leaves are pointwise related.
/// Computed in one pass, children before parents.
pub fn barr_lift(a_vars: &Rel) -> Rel {
    let u = a_vars.universe();
    let mut out = Rel::bottom(u);
    for t in 0..u.len() {
        if u.is_var(t) {
            for s in a_vars.row(t).filter(|&s| u.is_var(s)).collect::<Vec<_>>() {
                out.insert(t, s);
            }
        } else {
            let mut found = Vec::new();
            compreff_row(&out, t, &mut |s| found.push(s));
            for s in found {
                out.insert(t, s);
            }
        }
    }
    out
}

/// `μx. η°aη ∨ compreff(x)`.
pub fn barr_lift_formula(a_vars: &Rel) -> Result<Rel> {
    let base = eta_restrict(a_vars);
    kleene_lfp(a_vars.universe(), |x| base.join(&compreff(x)))
}

/// Substitutive parallel reduction `a^SP`.
///
/// Decomposes each term into a context whose holes are contracted
/// redex instances: a single bottom-up pass over the universe.
pub fn parallel_ext(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    let g = ground_instances(es, u)?;
    let mut out = Rel::bottom(u);
    for t in 0..u.len() {
        let mut found: Vec<usize> = g.row(t).collect();
        if u.is_var(t) {
            found.push(t);
        } else {
            compreff_row(&out, t, &mut |s| found.push(s));
        }
        for s in found {
            out.insert(t, s);
        }
    }
    Ok(out)
}

/// `a^SP` as the fixed point `μx. a[Δ] ∨ compref(x)`.
pub fn parallel_ext_lfp(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    let g = ground_instances(es, u)?;
    kleene_lfp(u, |x| g.join(&compref(x)))
}

/// Full reduction `a^SF` as a catamorphism: reduce the arguments, rebuild,
/// then optionally contract at the root. One bottom-up pass.
pub fn full_ext(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    let g = ground_instances(es, u)?;
    let mut out = Rel::bottom(u);
    for t in 0..u.len() {
        let mut rebuilt = Vec::new();
        if u.is_var(t) {
            rebuilt.push(t);
        } else {
            compreff_row(&out, t, &mut |s| rebuilt.push(s));
        }
        for s in rebuilt {
            out.insert(t, s);
            for r in g.row(s).collect::<Vec<_>>() {
                out.insert(t, r);
            }
        }
    }
    Ok(out)
}

/// `a^SF` as the fixed point `μx. (I_η ∨ compreff(x)); a[Δ]^=`.
pub fn full_ext_lfp(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    let g = ground_instances(es, u)?.refl_close();
    let eta = i_eta(u);
    kleene_lfp(u, |x| eta.join(&compreff(x))?.compose(&g))
}

/// Howe extension `a^SH = μx. compref(x); a[Δ]^=`.
pub fn howe_ext(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    let g = ground_instances(es, u)?.refl_close();
    kleene_lfp(u, |x| compref(x).compose(&g))
}

/// `a^SCC = μx. a[x] ∨ compref(x)`.
pub fn scc_ext(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    check_rules_fit(es, u)?;
    kleene_lfp(u, |x| rules_subst(es, u, x, false)?.join(&compref(x)))
}

/// Single-step reduction: one rule instance at one position.
pub fn seq_ext(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    let g = ground_instances(es, u)?;
    kleene_lfp(u, |x| g.join(&lin_compref(x)))
}

/// Single-step reduction contracting literal rule pairs only.
pub fn seq_ext_raw(es: &ESystem, u: &Arc<Universe>) -> Result<Rel> {
    let a = embed_rules(es, u)?;
    kleene_lfp(u, |x| a.join(&lin_compref(x)))
}

/// Terms of `u` as a set, for diagnostics.
pub fn row_terms(r: &Rel, t: usize) -> BTreeSet<Term> {
    r.row(t).map(|s| r.universe().term(s).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_trs;
    use crate::term::{Signature, VarSet};
    use crate::universe::enumerate;

    const ADD: &str = "sig add/2 succ/1 zero/0\nvars x y\n\
        rule add(zero, y) -> y\nrule add(succ(x), y) -> succ(add(x, y))\n";

    fn t(s: &str) -> Term {
        crate::syntax::parse_term(s).unwrap()
    }

    fn add_u(depth: usize) -> (ESystem, Arc<Universe>) {
        let es = parse_trs(ADD).unwrap();
        let u = enumerate(es.sig(), es.vars(), depth).unwrap();
        (es, u)
    }

    #[test]
    fn i_eta_examples() {
        let (_, u) = add_u(2);
        assert_eq!(
            i_eta(&u),
            Rel::from_terms(&u, [(&t("x"), &t("x")), (&t("y"), &t("y"))]).unwrap()
        );
        let sig = Signature::new([("zero", 0)]).unwrap();
        let g = enumerate(&sig, &VarSet::empty(), 1).unwrap();
        assert!(i_eta(&g).is_empty());
    }

    #[test]
    fn compreff_examples() {
        let (_, u) = add_u(3);
        let a = Rel::from_terms(&u, [(&t("zero"), &t("succ(zero)"))]).unwrap();
        let c = compreff(&a);
        assert!(c.contains_terms(&t("succ(zero)"), &t("succ(succ(zero))")));
        assert!(c.contains_terms(&t("add(zero,zero)"), &t("add(succ(zero),succ(zero))")));
        assert!(c.contains_terms(&t("zero"), &t("zero")));
        let bot = compreff(&Rel::bottom(&u));
        assert_eq!(bot, Rel::from_terms(&u, [(&t("zero"), &t("zero"))]).unwrap());
    }

    #[test]
    fn rel_subst_examples() {
        let (_, u) = add_u(3);
        let a = Rel::from_terms(&u, [(&t("add(zero,y)"), &t("y"))]).unwrap();
        let r = rel_subst(&a, &Rel::identity(&u)).unwrap();
        assert!(r.contains_terms(&t("add(zero,succ(zero))"), &t("succ(zero)")));
        assert!(rel_subst(&a, &Rel::bottom(&u)).unwrap().is_empty());
        let xx = Rel::from_terms(&u, [(&t("x"), &t("x"))]).unwrap();
        let b = Rel::from_terms(&u, [(&t("zero"), &t("succ(y)")), (&t("y"), &t("x"))]).unwrap();
        assert!(rel_subst(&xx, &b).unwrap().leq(&b).unwrap());
    }

    #[test]
    fn adjoint_of_top_and_bottom() {
        let (_, u) = add_u(2);
        let a = Rel::from_terms(&u, [(&t("succ(x)"), &t("y"))]).unwrap();
        assert_eq!(subst_adjoint(&a, &Rel::top(&u)).unwrap(), Rel::top(&u));
        assert_eq!(
            subst_adjoint(&Rel::bottom(&u), &Rel::bottom(&u)).unwrap(),
            Rel::top(&u)
        );
    }

    #[test]
    fn ground_instance_examples() {
        let (es, u) = add_u(3);
        let g = ground_instances(&es, &u).unwrap();
        assert!(g.contains_terms(&t("add(zero,zero)"), &t("zero")));
        assert!(g.contains_terms(&t("add(succ(zero),zero)"), &t("succ(add(zero,zero))")));
        assert!(!g.contains_terms(&t("succ(add(zero,zero))"), &t("succ(zero)")));
        assert_eq!(g, ground_instances_via_match(&es, &u).unwrap());
        assert_eq!(g, ground_instances_via_subst(&es, &u).unwrap());
    }

    #[test]
    fn context_closure_examples() {
        let (es, u) = add_u(3);
        let sc = subst_ctx_closure(&es, &u).unwrap();
        assert!(sc.contains_terms(&t("succ(add(zero,zero))"), &t("succ(zero)")));
        assert_eq!(ctx_closure(&sc).unwrap(), sc);
        assert_eq!(ctx_closure(&Rel::bottom(&u)).unwrap(), Rel::identity(&u));
    }

    #[test]
    fn barr_lift_examples() {
        let (_, u) = add_u(3);
        let xy = Rel::from_terms(&u, [(&t("x"), &t("y"))]).unwrap();
        let lifted = barr_lift(&xy);
        assert!(lifted.contains_terms(&t("add(x,x)"), &t("add(y,y)")));
        assert_eq!(lifted, barr_lift_formula(&xy).unwrap());
        assert_eq!(barr_lift(&i_eta(&u)), Rel::identity(&u));
    }

    #[test]
    fn reduction_relations_agree() {
        let (es, u) = add_u(3);
        let sp = parallel_ext(&es, &u).unwrap();
        assert!(sp.contains_terms(&t("succ(add(zero,zero))"), &t("succ(zero)")));
        assert!(Rel::identity(&u).leq(&sp).unwrap());
        assert_eq!(sp, parallel_ext_lfp(&es, &u).unwrap());
        let sf = full_ext(&es, &u).unwrap();
        assert_eq!(sf, full_ext_lfp(&es, &u).unwrap());
        assert_eq!(sf, howe_ext(&es, &u).unwrap());
    }

    #[test]
    fn rules_too_deep_are_rejected() {
        let (es, u) = add_u(2);
        assert!(matches!(
            ground_instances(&es, &u),
            Err(Error::RuleTooDeep { index: 1, .. })
        ));
    }

    #[test]
    fn ground_universe_uses_matching() {
        let es = parse_trs(ADD).unwrap();
        let u = enumerate(es.sig(), &VarSet::empty(), 3).unwrap();
        let g = ground_instances(&es, &u).unwrap();
        assert!(g.contains_terms(&t("add(zero,succ(zero))"), &t("succ(zero)")));
        assert_eq!(g, ground_instances_via_match(&es, &u).unwrap());
        assert!(matches!(
            embed_rules(&es, &u),
            Err(Error::RuleNotEmbeddable { index: 0 })
        ));
    }
}
