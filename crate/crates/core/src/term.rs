//! First-order syntax: signatures, variables, terms, substitutions,
//! matching, unification and one-hole positions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("`{0}` is declared both as a variable and as a symbol")]
    VariableClashesWithSymbol(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("symbol `{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("lhs is a variable")]
    VariableLhs,
    #[error("rhs variable not bound: `{0}` does not occur in the lhs")]
    UnboundRhsVariable(String),
    #[error("rule {index}: {source}")]
    InRule {
        index: usize,
        #[source]
        source: Box<TermError>,
    },
    #[error("invalid position: no child at {prefix}")]
    InvalidPosition { prefix: Position },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("universe would contain {size} terms, exceeding the cardinality cap of {cap}")]
    CapExceeded { size: u128, cap: usize },
}

/// An ordered list of operation symbols with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    entries: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<I, S>(entries: I) -> Result<Self, TermError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Signature {
            entries: Vec::new(),
        };
        for (name, arity) in entries {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    pub fn empty() -> Self {
        Signature {
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, name: String, arity: usize) -> Result<(), TermError> {
        if self.index_of(&name).is_some() {
            return Err(TermError::DuplicateSymbol(name));
        }
        self.entries.push((name, arity));
        Ok(())
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.index_of(symbol).map(|i| self.entries[i].1)
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.entries.iter().position(|(s, _)| s == symbol)
    }

    pub fn entries(&self) -> &[(String, usize)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.entries.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }
}

/// The declared variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Self, TermError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vars = VarSet::default();
        for name in names {
            vars.push(name.into())?;
        }
        Ok(vars)
    }

    pub fn empty() -> Self {
        VarSet::default()
    }

    pub fn push(&mut self, name: String) -> Result<(), TermError> {
        if self.contains(&name) {
            return Err(TermError::DuplicateVariable(name));
        }
        self.names.push(name);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A first-order term. Constants are nodes without children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Node(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(symbol: impl Into<String>) -> Term {
        Term::Node(symbol.into(), Vec::new())
    }

    pub fn node(symbol: impl Into<String>, children: Vec<Term>) -> Term {
        Term::Node(symbol.into(), children)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Node(_, children) => 1 + children.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Node(_, children) => 1 + children.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Node(_, children) => children.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Variables in left-to-right order of occurrence, repeats included.
    pub fn var_occurrences(&self) -> Vec<&str> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => out.push(v.as_str()),
                Term::Node(_, children) => stack.extend(children.iter().rev()),
            }
        }
        out
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Node(_, children) => children.iter().any(|c| c.occurs(var)),
        }
    }

    /// Checks arities and that every variable is declared.
    pub fn check(&self, sig: &Signature, vars: &VarSet) -> Result<(), TermError> {
        match self {
            Term::Var(v) if vars.contains(v) => Ok(()),
            Term::Var(v) => Err(TermError::UndeclaredVariable(v.clone())),
            Term::Node(symbol, children) => {
                let expected = sig
                    .arity(symbol)
                    .ok_or_else(|| TermError::UndeclaredSymbol(symbol.clone()))?;
                if expected != children.len() {
                    return Err(TermError::ArityMismatch {
                        symbol: symbol.clone(),
                        expected,
                        found: children.len(),
                    });
                }
                children.iter().try_for_each(|c| c.check(sig, vars))
            }
        }
    }

    pub fn rename_vars(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::Node(s, children) => {
                Term::Node(s.clone(), children.iter().map(|c| c.rename_vars(f)).collect())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Node(s, children) if children.is_empty() => write!(f, "{s}"),
            Term::Node(s, children) => {
                write!(f, "{s}(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite map from variable names to terms, applied simultaneously.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Subst {
    binding: BTreeMap<String, Term>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Term)>,
        S: Into<String>,
    {
        Subst {
            binding: pairs.into_iter().map(|(v, t)| (v.into(), t)).collect(),
        }
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.binding.get(var)
    }

    pub fn insert(&mut self, var: impl Into<String>, t: Term) -> Option<Term> {
        self.binding.insert(var.into(), t)
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.binding.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.binding.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.binding.len()
    }

    pub fn is_empty(&self) -> bool {
        self.binding.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        apply_subst(t, self)
    }

    /// The substitution `t ↦ (t self) then`, i.e. `apply(t, self.then(o)) == apply(apply(t, self), o)`.
    pub fn then(&self, other: &Subst) -> Subst {
        let mut binding: BTreeMap<String, Term> = self
            .binding
            .iter()
            .map(|(v, t)| (v.clone(), apply_subst(t, other)))
            .collect();
        for (v, t) in &other.binding {
            binding.entry(v.clone()).or_insert_with(|| t.clone());
        }
        Subst { binding }
    }

    pub fn check(&self, sig: &Signature, vars: &VarSet) -> Result<(), TermError> {
        for (v, t) in &self.binding {
            if !vars.contains(v) {
                return Err(TermError::UndeclaredVariable(v.clone()));
            }
            t.check(sig, vars)?;
        }
        Ok(())
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.binding.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}↦{t}")?;
        }
        write!(f, "}}")
    }
}

pub fn apply_subst(t: &Term, subst: &Subst) -> Term {
    match t {
        Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Node(s, children) => Term::Node(
            s.clone(),
            children.iter().map(|c| apply_subst(c, subst)).collect(),
        ),
    }
}

/// Syntactic matching. Binds exactly the variables of `pattern`.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Subst> {
    let mut subst = Subst::new();
    match_into(pattern, subject, &mut subst).then_some(subst)
}

fn match_into(pattern: &Term, subject: &Term, subst: &mut Subst) -> bool {
    match (pattern, subject) {
        (Term::Var(v), _) => match subst.get(v) {
            Some(bound) => bound == subject,
            None => {
                subst.insert(v.clone(), subject.clone());
                true
            }
        },
        (Term::Node(f, ps), Term::Node(g, ss)) => {
            f == g
                && ps.len() == ss.len()
                && ps.iter().zip(ss).all(|(p, s)| match_into(p, s, subst))
        }
        (Term::Node(..), Term::Var(_)) => false,
    }
}

/// Most general unifier with occurs check. The result is idempotent.
pub fn unify(t1: &Term, t2: &Term) -> Option<Subst> {
    let mut subst = Subst::new();
    let mut work = vec![(t1.clone(), t2.clone())];
    while let Some((a, b)) = work.pop() {
        let a = apply_subst(&a, &subst);
        let b = apply_subst(&b, &subst);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs(&x) {
                    return None;
                }
                let single = Subst::from_pairs([(x.clone(), t.clone())]);
                subst = Subst {
                    binding: subst
                        .binding
                        .into_iter()
                        .map(|(v, u)| (v, apply_subst(&u, &single)))
                        .collect(),
                };
                subst.insert(x, t);
            }
            (Term::Node(f, fs), Term::Node(g, gs)) => {
                if f != g || fs.len() != gs.len() {
                    return None;
                }
                work.extend(fs.into_iter().zip(gs));
            }
        }
    }
    Some(subst)
}

/// A path of child indices from the root; empty is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut path = self.0.clone();
        path.push(i);
        Position(path)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

/// All positions of `t` in pre-order.
pub fn positions(t: &Term) -> Vec<Position> {
    fn walk(t: &Term, here: Position, out: &mut Vec<Position>) {
        if let Term::Node(_, children) = t {
            out.push(here.clone());
            for (i, c) in children.iter().enumerate() {
                walk(c, here.child(i), out);
            }
        } else {
            out.push(here);
        }
    }
    let mut out = Vec::new();
    walk(t, Position::root(), &mut out);
    out
}

pub fn subterm_at<'a>(t: &'a Term, p: &Position) -> Result<&'a Term, TermError> {
    let mut here = t;
    for (depth, &i) in p.0.iter().enumerate() {
        here = match here {
            Term::Node(_, children) if i < children.len() => &children[i],
            _ => {
                return Err(TermError::InvalidPosition {
                    prefix: Position(p.0[..=depth].to_vec()),
                })
            }
        };
    }
    Ok(here)
}

pub fn replace_at(t: &Term, p: &Position, s: Term) -> Result<Term, TermError> {
    fn go(t: &Term, path: &[usize], full: &Position, s: Term) -> Result<Term, TermError> {
        let Some((&i, rest)) = path.split_first() else {
            return Ok(s);
        };
        match t {
            Term::Node(f, children) if i < children.len() => {
                let mut children = children.clone();
                children[i] = go(&children[i], rest, full, s)?;
                Ok(Term::Node(f.clone(), children))
            }
            _ => {
                let failed = full.0.len() - rest.len();
                Err(TermError::InvalidPosition {
                    prefix: Position(full.0[..failed].to_vec()),
                })
            }
        }
    }
    go(t, &p.0, p, s)
}

/// A ground-reduction pair `lhs ↦ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Rule, TermError> {
        if lhs.is_var() {
            return Err(TermError::VariableLhs);
        }
        let bound = lhs.vars();
        if let Some(v) = rhs.vars().into_iter().find(|v| !bound.contains(v)) {
            return Err(TermError::UnboundRhsVariable(v.to_string()));
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn depth(&self) -> usize {
        self.lhs.depth().max(self.rhs.depth())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// Signature, variables and ground rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ESystem {
    sig: Signature,
    vars: VarSet,
    rules: Vec<Rule>,
}

impl ESystem {
    pub fn new(sig: Signature, vars: VarSet, rules: Vec<Rule>) -> Result<Self, TermError> {
        if let Some(v) = vars.names().iter().find(|v| sig.index_of(v).is_some()) {
            return Err(TermError::VariableClashesWithSymbol(v.clone()));
        }
        for (index, rule) in rules.iter().enumerate() {
            let wrap = |e| TermError::InRule {
                index,
                source: Box::new(e),
            };
            rule.lhs.check(&sig, &vars).map_err(wrap)?;
            rule.rhs.check(&sig, &vars).map_err(wrap)?;
            Rule::new(rule.lhs.clone(), rule.rhs.clone()).map_err(wrap)?;
        }
        Ok(ESystem { sig, vars, rules })
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn max_rule_depth(&self) -> usize {
        self.rules.iter().map(Rule::depth).max().unwrap_or(0)
    }

    pub fn check_term(&self, t: &Term) -> Result<(), TermError> {
        t.check(&self.sig, &self.vars)
    }

    /// The same system with a different rule set.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Result<Self, TermError> {
        ESystem::new(self.sig.clone(), self.vars.clone(), rules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn succ(t: Term) -> Term {
        Term::node("succ", vec![t])
    }
    fn add(a: Term, b: Term) -> Term {
        Term::node("add", vec![a, b])
    }

    #[test]
    fn apply_subst_examples() {
        let g = Subst::from_pairs([("y", succ(c("zero")))]);
        assert_eq!(
            apply_subst(&add(c("zero"), v("y")), &g),
            add(c("zero"), succ(c("zero")))
        );
        assert_eq!(apply_subst(&v("x"), &Subst::new()), v("x"));
        let g = Subst::from_pairs([("x", succ(v("y")))]);
        assert_eq!(
            apply_subst(&add(v("x"), v("x")), &g),
            add(succ(v("y")), succ(v("y")))
        );
    }

    #[test]
    fn simultaneous_application_does_not_resubstitute() {
        let g = Subst::from_pairs([("x", v("y")), ("y", v("x"))]);
        assert_eq!(apply_subst(&add(v("x"), v("y")), &g), add(v("y"), v("x")));
    }

    #[test]
    fn match_examples() {
        let m = match_term(&add(c("zero"), v("y")), &add(c("zero"), succ(c("zero")))).unwrap();
        assert_eq!(m, Subst::from_pairs([("y", succ(c("zero")))]));
        assert!(match_term(&add(succ(v("x")), v("y")), &add(c("zero"), c("zero"))).is_none());
        assert!(match_term(&add(v("x"), v("x")), &add(c("zero"), succ(c("zero")))).is_none());
        assert!(match_term(&c("zero"), &v("x")).is_none());
    }

    #[test]
    fn unify_examples() {
        let t1 = add(v("x"), c("zero"));
        let t2 = add(succ(v("y")), v("z"));
        let g = unify(&t1, &t2).unwrap();
        assert_eq!(
            g,
            Subst::from_pairs([("x", succ(v("y"))), ("z", c("zero"))])
        );
        assert_eq!(apply_subst(&t1, &g), apply_subst(&t2, &g));
        assert!(unify(&v("x"), &succ(v("x"))).is_none());
        assert_eq!(unify(&c("zero"), &c("zero")), Some(Subst::new()));
        assert!(unify(&c("zero"), &succ(c("zero"))).is_none());
    }

    #[test]
    fn unify_chains_are_resolved() {
        // x = y, y = succ(z): the mgu must be idempotent
        let t1 = add(v("x"), v("y"));
        let t2 = add(v("y"), succ(v("z")));
        let g = unify(&t1, &t2).unwrap();
        assert_eq!(apply_subst(&t1, &g), apply_subst(&t2, &g));
        assert_eq!(g.get("x"), Some(&succ(v("z"))));
        assert_eq!(apply_subst(&apply_subst(&t1, &g), &g), apply_subst(&t1, &g));
    }

    #[test]
    fn positions_and_replacement() {
        let t = succ(add(c("zero"), c("zero")));
        let ps: Vec<String> = positions(&t).iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["ε", "0", "0.0", "0.1"]);
        let p0 = Position(vec![0]);
        assert_eq!(subterm_at(&t, &p0).unwrap(), &add(c("zero"), c("zero")));
        assert_eq!(replace_at(&t, &p0, c("zero")).unwrap(), succ(c("zero")));
    }

    #[test]
    fn invalid_position_names_failing_prefix() {
        let t = succ(add(c("zero"), c("zero")));
        let err = subterm_at(&t, &Position(vec![0, 2])).unwrap_err();
        assert_eq!(
            err,
            TermError::InvalidPosition {
                prefix: Position(vec![0, 2])
            }
        );
        let err = replace_at(&t, &Position(vec![1, 0]), c("zero")).unwrap_err();
        assert_eq!(
            err,
            TermError::InvalidPosition {
                prefix: Position(vec![1])
            }
        );
    }

    #[test]
    fn depth_of_constant_is_one() {
        assert_eq!(c("zero").depth(), 1);
        assert_eq!(v("x").depth(), 1);
        assert_eq!(succ(add(c("zero"), v("x"))).depth(), 3);
    }

    #[test]
    fn rule_invariants() {
        assert_eq!(Rule::new(v("x"), c("zero")), Err(TermError::VariableLhs));
        assert_eq!(
            Rule::new(Term::node("f", vec![v("x")]), Term::node("g", vec![v("y")])),
            Err(TermError::UnboundRhsVariable("y".into()))
        );
    }

    #[test]
    fn esystem_rejects_clashes_and_bad_arity() {
        let sig = Signature::new([("zero", 0), ("succ", 1)]).unwrap();
        let vars = VarSet::new(["zero"]).unwrap();
        assert!(matches!(
            ESystem::new(sig.clone(), vars, vec![]),
            Err(TermError::VariableClashesWithSymbol(_))
        ));
        let vars = VarSet::new(["x"]).unwrap();
        let bad = Rule {
            lhs: Term::node("succ", vec![v("x"), v("x")]),
            rhs: v("x"),
        };
        let err = ESystem::new(sig, vars, vec![bad]).unwrap_err();
        assert!(matches!(err, TermError::InRule { index: 0, .. }));
    }

    #[test]
    fn signature_rejects_duplicates() {
        assert_eq!(
            Signature::new([("a", 0), ("a", 1)]),
            Err(TermError::DuplicateSymbol("a".into()))
        );
        assert_eq!(
            VarSet::new(["x", "x"]),
            Err(TermError::DuplicateVariable("x".into()))
        );
    }
}
