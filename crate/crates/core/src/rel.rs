//! Finite binary relations over a universe, stored as dense bit rows.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::term::Term;
use crate::universe::Universe;
use crate::{Error, Result};

#[derive(Clone)]
pub struct Rel {
    universe: Arc<Universe>,
    words: usize,
    bits: Vec<u64>,
}

impl PartialEq for Rel {
    fn eq(&self, other: &Self) -> bool {
        self.universe.uid() == other.universe.uid() && self.bits == other.bits
    }
}

impl Eq for Rel {}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(
                self.pairs()
                    .map(|(i, j)| format!("({}, {})", self.universe.term(i), self.universe.term(j))),
            )
            .finish()
    }
}

impl Rel {
    pub fn bottom(u: &Arc<Universe>) -> Rel {
        let words = u.len().div_ceil(64);
        Rel {
            universe: Arc::clone(u),
            words,
            bits: vec![0; words * u.len()],
        }
    }

    pub fn identity(u: &Arc<Universe>) -> Rel {
        let mut r = Rel::bottom(u);
        for i in 0..u.len() {
            r.insert(i, i);
        }
        r
    }

    pub fn top(u: &Arc<Universe>) -> Rel {
        let mut r = Rel::bottom(u);
        for i in 0..u.len() {
            for j in 0..u.len() {
                r.insert(i, j);
            }
        }
        r
    }

    /// Diagonal on the terms of depth `≤ d`.
    pub fn identity_upto(u: &Arc<Universe>, d: usize) -> Rel {
        let mut r = Rel::bottom(u);
        for i in 0..u.layer_end(d) {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(u: &Arc<Universe>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Rel {
        let mut r = Rel::bottom(u);
        for (i, j) in pairs {
            r.insert(i, j);
        }
        r
    }

    pub fn from_terms<'a>(
        u: &Arc<Universe>,
        pairs: impl IntoIterator<Item = (&'a Term, &'a Term)>,
    ) -> Result<Rel> {
        let mut r = Rel::bottom(u);
        for (t, s) in pairs {
            let i = u.id(t).ok_or_else(|| Error::NotInUniverse(t.to_string()))?;
            let j = u.id(s).ok_or_else(|| Error::NotInUniverse(s.to_string()))?;
            r.insert(i, j);
        }
        Ok(r)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    fn check_same(&self, other: &Rel) -> Result<()> {
        if self.universe.uid() == other.universe.uid() {
            Ok(())
        } else {
            Err(Error::UniverseMismatch)
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn contains_terms(&self, t: &Term, s: &Term) -> bool {
        match (self.universe.id(t), self.universe.id(s)) {
            (Some(i), Some(j)) => self.contains(i, j),
            _ => false,
        }
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(i).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn row_is_empty(&self, i: usize) -> bool {
        self.row_words(i).iter().all(|&w| w == 0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.universe.len()).flat_map(move |i| self.row(i).map(move |j| (i, j)))
    }

    pub fn term_pairs(&self) -> Vec<(Term, Term)> {
        self.pairs()
            .map(|(i, j)| (self.universe.term(i).clone(), self.universe.term(j).clone()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn compose(&self, other: &Rel) -> Result<Rel> {
        self.check_same(other)?;
        let mut out = Rel::bottom(&self.universe);
        for i in 0..self.universe.len() {
            let base = i * self.words;
            for k in self.row(i) {
                let src = other.row_words(k);
                for (w, &word) in src.iter().enumerate() {
                    out.bits[base + w] |= word;
                }
            }
        }
        Ok(out)
    }

    pub fn converse(&self) -> Rel {
        let mut out = Rel::bottom(&self.universe);
        for (i, j) in self.pairs() {
            out.insert(j, i);
        }
        out
    }

    fn zip_with(&self, other: &Rel, f: impl Fn(u64, u64) -> u64) -> Result<Rel> {
        self.check_same(other)?;
        Ok(Rel {
            universe: Arc::clone(&self.universe),
            words: self.words,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn meet(&self, other: &Rel) -> Result<Rel> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn join(&self, other: &Rel) -> Result<Rel> {
        self.zip_with(other, |a, b| a | b)
    }

    /// Pairs of `self` that are not in `other`.
    pub fn minus(&self, other: &Rel) -> Result<Rel> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn leq(&self, other: &Rel) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & !b == 0))
    }

    /// First pair of `self` missing from `other`, in id order.
    pub fn first_excess(&self, other: &Rel) -> Result<Option<(usize, usize)>> {
        Ok(self.minus(other)?.pairs().next())
    }

    pub fn refl_close(&self) -> Rel {
        let mut out = self.clone();
        for i in 0..self.universe.len() {
            out.insert(i, i);
        }
        out
    }

    /// Reflexive-transitive closure, as the least fixed point of `x ↦ Δ ∨ a;x`.
    pub fn rtc(&self) -> Rel {
        let id = Rel::identity(&self.universe);
        kleene_lfp(&self.universe, |x| id.join(&self.compose(x)?))
            .expect("Δ ∨ a;x is monotone on a shared universe")
    }

    /// Reflexive-transitive closure by breadth-first reachability.
    pub fn reachability(&self) -> Rel {
        let n = self.universe.len();
        let mut out = Rel::bottom(&self.universe);
        for i in 0..n {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([i]);
            seen[i] = true;
            while let Some(k) = queue.pop_front() {
                out.insert(i, k);
                for j in self.row(k) {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        out
    }

    /// Keeps the pairs whose source and target both satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Rel {
        Rel::from_pairs(
            &self.universe,
            self.pairs().filter(|&(i, j)| keep(i) && keep(j)),
        )
    }

    /// Keeps the pairs with both terms of depth `≤ d`.
    pub fn restrict_depth(&self, d: usize) -> Rel {
        let end = self.universe.layer_end(d);
        self.restrict(|i| i < end)
    }

    /// The same pairs over another universe holding all of their terms.
    pub fn transport(&self, to: &Arc<Universe>) -> Result<Rel> {
        let mut out = Rel::bottom(to);
        for (i, j) in self.pairs() {
            let t = self.universe.term(i);
            let s = self.universe.term(j);
            let i2 = to.id(t).ok_or_else(|| Error::NotInUniverse(t.to_string()))?;
            let j2 = to.id(s).ok_or_else(|| Error::NotInUniverse(s.to_string()))?;
            out.insert(i2, j2);
        }
        Ok(out)
    }
}

/// Least fixed point of `f` by Kleene iteration from bottom.
///
/// Every iterate must be above its predecessor; a shrinking step means `f`
/// is not monotone and aborts. The iteration is bounded by `|U|² + 1`.
pub fn kleene_lfp(u: &Arc<Universe>, mut f: impl FnMut(&Rel) -> Result<Rel>) -> Result<Rel> {
    let bound = u.len() * u.len() + 1;
    let mut x = Rel::bottom(u);
    for iteration in 1..=bound {
        let next = f(&x)?;
        if !x.leq(&next)? {
            return Err(Error::NonMonotone { iteration });
        }
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Err(Error::IterationBound { bound })
}
