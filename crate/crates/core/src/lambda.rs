//! Well-scoped λ-terms with de Bruijn indices, β-substitution, parallel and
//! full β images, and checks that those images commute with renaming.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::{Error, Result};

pub const DEFAULT_LAM_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LamTerm {
    Var(usize),
    Lam(Box<LamTerm>),
    App(Box<LamTerm>, Box<LamTerm>),
}

use LamTerm::{App, Lam, Var};

pub fn lam(body: LamTerm) -> LamTerm {
    Lam(Box::new(body))
}

pub fn app(f: LamTerm, a: LamTerm) -> LamTerm {
    App(Box::new(f), Box::new(a))
}

impl LamTerm {
    pub fn size(&self) -> usize {
        match self {
            Var(_) => 1,
            Lam(b) => 1 + b.size(),
            App(f, a) => 1 + f.size() + a.size(),
        }
    }

    /// Smallest scope in which the term is well formed.
    pub fn min_scope(&self) -> usize {
        match self {
            Var(i) => i + 1,
            Lam(b) => b.min_scope().saturating_sub(1),
            App(f, a) => f.min_scope().max(a.min_scope()),
        }
    }

    pub fn is_scoped(&self, scope: usize) -> bool {
        self.min_scope() <= scope
    }

    /// Applies `f` to every free index, given the number of enclosing binders.
    fn map_free(&self, depth: usize, f: &impl Fn(usize) -> usize) -> LamTerm {
        match self {
            Var(i) if *i < depth => Var(*i),
            Var(i) => Var(f(i - depth) + depth),
            Lam(b) => lam(b.map_free(depth + 1, f)),
            App(g, a) => app(g.map_free(depth, f), a.map_free(depth, f)),
        }
    }

    /// Renames free index `i` to `rho[i]`.
    pub fn rename(&self, rho: &[usize]) -> LamTerm {
        self.map_free(0, &|i| rho[i])
    }

    pub fn shift(&self, by: usize) -> LamTerm {
        self.map_free(0, &|i| i + by)
    }
}

/// Replaces index `depth` by `arg` (shifted under binders) and lowers the
/// free indices above it.
fn subst_at(body: &LamTerm, depth: usize, arg: &LamTerm) -> LamTerm {
    match body {
        Var(i) if *i == depth => arg.shift(depth),
        Var(i) if *i > depth => Var(i - 1),
        Var(i) => Var(*i),
        Lam(b) => lam(subst_at(b, depth + 1, arg)),
        App(f, a) => app(subst_at(f, depth, arg), subst_at(a, depth, arg)),
    }
}

/// β-substitution without scope checks.
pub fn beta(body: &LamTerm, arg: &LamTerm) -> LamTerm {
    subst_at(body, 0, arg)
}

/// `body[arg/0]` for `body` at scope `scope + 1` and `arg` at scope `scope`.
pub fn lam_subst(body: &LamTerm, arg: &LamTerm, scope: usize) -> Result<LamTerm> {
    if !body.is_scoped(scope + 1) {
        return Err(Error::ScopeMismatch(format!(
            "body `{body}` is not well scoped at {}",
            scope + 1
        )));
    }
    if !arg.is_scoped(scope) {
        return Err(Error::ScopeMismatch(format!(
            "argument `{arg}` is not well scoped at {scope}"
        )));
    }
    Ok(beta(body, arg))
}

/// Number of well-scoped terms with exactly `size` nodes, by scope.
fn exact_counts(max_scope: usize, max_size: usize) -> Vec<Vec<u128>> {
    // table[k][n] = terms of size n at scope k, for k up to max_scope + max_size
    let scopes = max_scope + max_size + 1;
    let mut table = vec![vec![0u128; max_size + 1]; scopes];
    for n in 1..=max_size {
        for k in 0..scopes {
            let mut c = if n == 1 { k as u128 } else { 0 };
            if n >= 2 && k + 1 < scopes {
                c = c.saturating_add(table[k + 1][n - 1]);
            }
            for left in 1..n.saturating_sub(1) {
                let right = n - 1 - left;
                c = c.saturating_add(table[k][left].saturating_mul(table[k][right]));
            }
            table[k][n] = c;
        }
    }
    table
}

pub fn count_lams(scope: usize, size: usize) -> u128 {
    let table = exact_counts(scope, size);
    table[scope][1..=size].iter().fold(0u128, |a, &b| a.saturating_add(b))
}

pub fn enumerate_lams(scope: usize, size: usize) -> Result<Vec<LamTerm>> {
    enumerate_lams_with_cap(scope, size, DEFAULT_LAM_CAP)
}

/// All terms at `scope` with at most `size` nodes: ordered by size, then
/// variables, abstractions and applications.
pub fn enumerate_lams_with_cap(scope: usize, size: usize, cap: usize) -> Result<Vec<LamTerm>> {
    let total = count_lams(scope, size);
    if total > cap as u128 {
        return Err(Error::LamCapExceeded { size: total, cap });
    }
    let mut memo: BTreeMap<(usize, usize), Vec<LamTerm>> = BTreeMap::new();
    let mut out = Vec::with_capacity(total as usize);
    for n in 1..=size {
        out.extend(exact(scope, n, &mut memo));
    }
    Ok(out)
}

fn exact(scope: usize, n: usize, memo: &mut BTreeMap<(usize, usize), Vec<LamTerm>>) -> Vec<LamTerm> {
    if let Some(v) = memo.get(&(scope, n)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if n == 1 {
        out.extend((0..scope).map(Var));
    } else {
        out.extend(exact(scope + 1, n - 1, memo).into_iter().map(lam));
        for left in 1..n - 1 {
            let fs = exact(scope, left, memo);
            let args = exact(scope, n - 1 - left, memo);
            for f in &fs {
                for a in &args {
                    out.push(app(f.clone(), a.clone()));
                }
            }
        }
    }
    memo.insert((scope, n), out.clone());
    out
}

fn rebuild_app(fs: &BTreeSet<LamTerm>, args: &BTreeSet<LamTerm>, out: &mut BTreeSet<LamTerm>) {
    for f in fs {
        for a in args {
            out.insert(app(f.clone(), a.clone()));
        }
    }
}

/// Parallel β: contract any set of disjoint redexes. A root redex is
/// contracted with its unreduced body and argument.
pub fn lam_parallel_image(t: &LamTerm) -> BTreeSet<LamTerm> {
    match t {
        Var(_) => BTreeSet::from([t.clone()]),
        Lam(b) => lam_parallel_image(b).into_iter().map(lam).collect(),
        App(f, a) => {
            let mut out = BTreeSet::new();
            rebuild_app(&lam_parallel_image(f), &lam_parallel_image(a), &mut out);
            if let Lam(body) = f.as_ref() {
                out.insert(beta(body, a));
            }
            out
        }
    }
}

/// Full β: reduce both sides, then contract the root if it became a redex.
pub fn lam_full_image(t: &LamTerm) -> BTreeSet<LamTerm> {
    match t {
        Var(_) => BTreeSet::from([t.clone()]),
        Lam(b) => lam_full_image(b).into_iter().map(lam).collect(),
        App(f, a) => {
            let fs = lam_full_image(f);
            let args = lam_full_image(a);
            let mut out = BTreeSet::new();
            rebuild_app(&fs, &args, &mut out);
            for g in &fs {
                if let Lam(body) = g {
                    for arg in &args {
                        out.insert(beta(body, arg));
                    }
                }
            }
            out
        }
    }
}

/// Single-step β at one position.
pub fn lam_seq_image(t: &LamTerm) -> BTreeSet<LamTerm> {
    let mut out = BTreeSet::new();
    match t {
        Var(_) => {}
        Lam(b) => out.extend(lam_seq_image(b).into_iter().map(lam)),
        App(f, a) => {
            if let Lam(body) = f.as_ref() {
                out.insert(beta(body, a));
            }
            out.extend(lam_seq_image(f).into_iter().map(|g| app(g, (**a).clone())));
            out.extend(lam_seq_image(a).into_iter().map(|b| app((**f).clone(), b)));
        }
    }
    out
}

/// Normal-order normal form, giving up after `fuel` contractions.
pub fn normalize(t: &LamTerm, fuel: usize) -> Option<LamTerm> {
    fn step(t: &LamTerm) -> Option<LamTerm> {
        match t {
            Var(_) => None,
            Lam(b) => step(b).map(lam),
            App(f, a) => {
                if let Lam(body) = f.as_ref() {
                    return Some(beta(body, a));
                }
                if let Some(g) = step(f) {
                    return Some(app(g, (**a).clone()));
                }
                step(a).map(|b| app((**f).clone(), b))
            }
        }
    }
    let mut t = t.clone();
    for _ in 0..fuel {
        match step(&t) {
            Some(next) => t = next,
            None => return Some(t),
        }
    }
    None
}

/// Both terms normalize within `fuel` steps to the same normal form.
pub fn beta_convertible(t: &LamTerm, s: &LamTerm, fuel: usize) -> bool {
    matches!((normalize(t, fuel), normalize(s, fuel)), (Some(a), Some(b)) if a == b)
}

/// Relations indexed by scope.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScopedRel {
    pub family: BTreeMap<usize, BTreeSet<(LamTerm, LamTerm)>>,
}

impl ScopedRel {
    /// `{(t, s) : s ∈ image(t)}` for all terms up to the given scope and size.
    pub fn from_image(
        image: impl Fn(&LamTerm) -> BTreeSet<LamTerm>,
        max_scope: usize,
        max_size: usize,
    ) -> Result<ScopedRel> {
        let mut family = BTreeMap::new();
        for n in 0..=max_scope {
            let mut pairs = BTreeSet::new();
            for t in enumerate_lams(n, max_size)? {
                for s in image(&t) {
                    pairs.insert((t.clone(), s));
                }
            }
            family.insert(n, pairs);
        }
        Ok(ScopedRel { family })
    }

    pub fn contains(&self, scope: usize, t: &LamTerm, s: &LamTerm) -> bool {
        self.family
            .get(&scope)
            .is_some_and(|pairs| pairs.contains(&(t.clone(), s.clone())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenamingWitness {
    pub from_scope: usize,
    pub to_scope: usize,
    pub renaming: Vec<usize>,
    pub term: LamTerm,
    pub reduct: LamTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenamingReport {
    pub renamings: usize,
    pub pairs_checked: usize,
    pub failure: Option<RenamingWitness>,
}

impl RenamingReport {
    pub fn pass(&self) -> bool {
        self.failure.is_none()
    }
}

/// All maps `0..n → 0..m`.
pub fn renamings(n: usize, m: usize) -> Vec<Vec<usize>> {
    if n > 0 && m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut rho = vec![0usize; n];
    loop {
        out.push(rho.clone());
        if !crate::universe::next_tuple(&mut rho, m) {
            return out;
        }
    }
}

/// Checks that the image relation is closed under every renaming and
/// weakening `ρ: n → m` between scopes up to `max_scope`: each related pair
/// `(t, s)` at scope `n` gives the related pair `(tρ, sρ)` at scope `m`, and
/// the image of `tρ` holds nothing else.
pub fn renaming_closure_check(
    image: impl Fn(&LamTerm) -> BTreeSet<LamTerm>,
    max_scope: usize,
    max_size: usize,
) -> Result<RenamingReport> {
    let rel = ScopedRel::from_image(&image, max_scope, max_size)?;
    let mut renamings_seen = 0;
    let mut pairs_checked = 0;
    for n in 0..=max_scope {
        let terms = enumerate_lams(n, max_size)?;
        for m in 0..=max_scope {
            for rho in renamings(n, m) {
                renamings_seen += 1;
                for t in &terms {
                    let renamed = t.rename(&rho);
                    let expected: BTreeSet<LamTerm> =
                        image(t).iter().map(|s| s.rename(&rho)).collect();
                    let actual = image(&renamed);
                    pairs_checked += expected.len();
                    let missing = expected.iter().find(|s| !rel.contains(m, &renamed, s));
                    let extra = actual.difference(&expected).next();
                    if let Some(reduct) = missing.or(extra) {
                        return Ok(RenamingReport {
                            renamings: renamings_seen,
                            pairs_checked,
                            failure: Some(RenamingWitness {
                                from_scope: n,
                                to_scope: m,
                                renaming: rho,
                                term: t.clone(),
                                reduct: reduct.clone(),
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(RenamingReport {
        renamings: renamings_seen,
        pairs_checked,
        failure: None,
    })
}

impl fmt::Display for LamTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var(i) => write!(f, "{i}"),
            Lam(b) => write!(f, "\\.{b}"),
            App(g, a) => {
                match g.as_ref() {
                    Lam(_) => write!(f, "({g})")?,
                    _ => write!(f, "{g}")?,
                }
                write!(f, " ")?;
                match a.as_ref() {
                    Var(_) => write!(f, "{a}"),
                    _ => write!(f, "({a})"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct LamParseError {
    pub column: usize,
    pub message: String,
}

/// Parses `\.` abstraction, juxtaposition and integer indices, e.g.
/// `(\.(\.0) 0) ((\.0) 1)`. An abstraction extends as far right as possible.
pub fn parse_lam(text: &str) -> std::result::Result<LamTerm, LamParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = LamParser { chars, pos: 0 };
    let t = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(t)
}

struct LamParser {
    chars: Vec<char>,
    pos: usize,
}

impl LamParser {
    fn error(&self, message: &str) -> LamParseError {
        LamParseError {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> std::result::Result<LamTerm, LamParseError> {
        let mut acc: Option<LamTerm> = None;
        loop {
            self.skip_ws();
            let next = match self.chars.get(self.pos) {
                None | Some(')') => break,
                Some('\\') => {
                    self.pos += 1;
                    if self.chars.get(self.pos) != Some(&'.') {
                        return Err(self.error("expected `.` after `\\`"));
                    }
                    self.pos += 1;
                    let body = self.expr()?;
                    let l = lam(body);
                    acc = Some(match acc {
                        Some(f) => app(f, l),
                        None => l,
                    });
                    break;
                }
                Some('(') => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    self.skip_ws();
                    if self.chars.get(self.pos) != Some(&')') {
                        return Err(self.error("expected `)`"));
                    }
                    self.pos += 1;
                    inner
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos;
                    while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let digits: String = self.chars[start..self.pos].iter().collect();
                    Var(digits.parse().map_err(|_| self.error("index too large"))?)
                }
                Some(_) => return Err(self.error("unexpected character")),
            };
            acc = Some(match acc {
                Some(f) => app(f, next),
                None => next,
            });
        }
        acc.ok_or_else(|| self.error("expected a term"))
    }
}
