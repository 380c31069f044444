//! Bounded term universes: every well-formed term up to a depth bound,
//! each with a stable integer id.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::term::{Signature, Term, TermError, VarSet};

pub const DEFAULT_CAP: usize = 20_000;

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

/// A term in id form: children are universe ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Var(usize),
    Node(usize, Vec<usize>),
}

/// All terms over `(sig, vars)` of depth at most `depth`.
///
/// Ids are layered by depth, so the terms of depth `≤ d` form the id
/// prefix `0..layer_end(d)`. Inside a layer come variables in declaration
/// order, then nodes in signature order, then by child ids.
#[derive(Debug)]
pub struct Universe {
    uid: u64,
    sig: Signature,
    vars: VarSet,
    depth: usize,
    terms: Vec<Term>,
    shapes: Vec<Shape>,
    depths: Vec<usize>,
    index: HashMap<Term, usize>,
    shape_index: HashMap<Shape, usize>,
    layer_ends: Vec<usize>,
    by_symbol: Vec<Vec<usize>>,
    var_ids: Vec<usize>,
}

/// Number of terms of depth `≤ d` for `d = 1..=depth`, saturating.
pub fn layer_sizes(sig: &Signature, vars: &VarSet, depth: usize) -> Vec<u128> {
    let leaves =
        vars.len() as u128 + sig.entries().iter().filter(|(_, a)| *a == 0).count() as u128;
    let mut out = Vec::with_capacity(depth);
    for d in 1..=depth {
        let n = if d == 1 {
            leaves
        } else {
            let prev: u128 = out[d - 2];
            sig.entries()
                .iter()
                .filter(|(_, a)| *a > 0)
                .fold(leaves, |acc: u128, (_, a)| {
                    acc.saturating_add(prev.saturating_pow(*a as u32))
                })
        };
        out.push(n);
    }
    out
}

pub fn enumerate(sig: &Signature, vars: &VarSet, depth: usize) -> Result<Arc<Universe>, TermError> {
    enumerate_with_cap(sig, vars, depth, DEFAULT_CAP)
}

pub fn enumerate_with_cap(
    sig: &Signature,
    vars: &VarSet,
    depth: usize,
    cap: usize,
) -> Result<Arc<Universe>, TermError> {
    if depth == 0 {
        return Err(TermError::ZeroDepth);
    }
    if let Some(v) = vars.names().iter().find(|v| sig.index_of(v).is_some()) {
        return Err(TermError::VariableClashesWithSymbol(v.clone()));
    }
    let size = *layer_sizes(sig, vars, depth).last().unwrap();
    if size > cap as u128 {
        return Err(TermError::CapExceeded { size, cap });
    }

    let mut u = Universe {
        uid: NEXT_UID.fetch_add(1, Ordering::Relaxed),
        sig: sig.clone(),
        vars: vars.clone(),
        depth,
        terms: Vec::with_capacity(size as usize),
        shapes: Vec::with_capacity(size as usize),
        depths: Vec::with_capacity(size as usize),
        index: HashMap::with_capacity(size as usize),
        shape_index: HashMap::with_capacity(size as usize),
        layer_ends: Vec::with_capacity(depth),
        by_symbol: vec![Vec::new(); sig.len()],
        var_ids: Vec::with_capacity(vars.len()),
    };

    for (i, name) in vars.names().iter().enumerate() {
        let id = u.push(Shape::Var(i), Term::Var(name.clone()), 1);
        u.var_ids.push(id);
    }
    for (s, (name, arity)) in sig.entries().iter().enumerate() {
        if *arity == 0 {
            u.push(Shape::Node(s, Vec::new()), Term::constant(name.clone()), 1);
        }
    }
    u.layer_ends.push(u.terms.len());

    for d in 2..=depth {
        let prev_end = u.layer_ends[d - 2];
        let prev_start = if d >= 3 { u.layer_ends[d - 3] } else { 0 };
        for (s, (_, arity)) in sig.entries().iter().enumerate() {
            let arity = *arity;
            if arity == 0 || prev_end == 0 {
                continue;
            }
            // children drawn from 0..prev_end, at least one of depth exactly d-1
            let mut children = vec![0usize; arity];
            loop {
                if children.iter().any(|&c| c >= prev_start) {
                    let term = Term::Node(
                        sig.entries()[s].0.clone(),
                        children.iter().map(|&c| u.terms[c].clone()).collect(),
                    );
                    u.push(Shape::Node(s, children.clone()), term, d);
                }
                if !next_tuple(&mut children, prev_end) {
                    break;
                }
            }
        }
        u.layer_ends.push(u.terms.len());
    }
    debug_assert_eq!(u.terms.len() as u128, size);
    Ok(Arc::new(u))
}

/// Advances `tuple` as an odometer over `0..bound`, last position fastest.
pub(crate) fn next_tuple(tuple: &mut [usize], bound: usize) -> bool {
    for k in (0..tuple.len()).rev() {
        tuple[k] += 1;
        if tuple[k] < bound {
            return true;
        }
        tuple[k] = 0;
    }
    false
}

impl Universe {
    fn push(&mut self, shape: Shape, term: Term, depth: usize) -> usize {
        let id = self.terms.len();
        if let Shape::Node(s, _) = &shape {
            self.by_symbol[*s].push(id);
        }
        self.index.insert(term.clone(), id);
        self.shape_index.insert(shape.clone(), id);
        self.terms.push(term);
        self.shapes.push(shape);
        self.depths.push(depth);
        id
    }

    pub fn uid(&self) -> u64 {
        self.uid
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term(&self, id: usize) -> &Term {
        &self.terms[id]
    }

    pub fn shape(&self, id: usize) -> &Shape {
        &self.shapes[id]
    }

    pub fn term_depth(&self, id: usize) -> usize {
        self.depths[id]
    }

    pub fn id(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn node_id(&self, symbol: usize, children: &[usize]) -> Option<usize> {
        self.shape_index
            .get(&Shape::Node(symbol, children.to_vec()))
            .copied()
    }

    /// Number of terms of depth `≤ d`; also the id bound of that prefix.
    pub fn layer_end(&self, d: usize) -> usize {
        if d == 0 {
            0
        } else {
            self.layer_ends[d.min(self.depth) - 1]
        }
    }

    pub fn with_symbol(&self, symbol: usize) -> &[usize] {
        &self.by_symbol[symbol]
    }

    pub fn var_ids(&self) -> &[usize] {
        &self.var_ids
    }

    pub fn is_var(&self, id: usize) -> bool {
        matches!(self.shapes[id], Shape::Var(_))
    }

    /// Instantiates term `id`, mapping the variable with index `i` to
    /// `assignment[i]`. Absent when the result is deeper than the bound.
    pub fn instantiate(&self, id: usize, assignment: &[usize]) -> Option<usize> {
        match &self.shapes[id] {
            Shape::Var(i) => Some(assignment[*i]),
            Shape::Node(_, children) if children.is_empty() => Some(id),
            Shape::Node(s, children) => {
                let mut inst = Vec::with_capacity(children.len());
                for &c in children {
                    inst.push(self.instantiate(c, assignment)?);
                }
                self.node_id(*s, &inst)
            }
        }
    }

    /// Instantiates an arbitrary term whose variables are bound by `binding`.
    pub fn instantiate_term(&self, t: &Term, binding: &dyn Fn(&str) -> Option<usize>) -> Option<usize> {
        match t {
            Term::Var(v) => binding(v),
            Term::Node(f, children) => {
                let s = self.sig.index_of(f)?;
                let mut inst = Vec::with_capacity(children.len());
                for c in children {
                    inst.push(self.instantiate_term(c, binding)?);
                }
                self.node_id(s, &inst)
            }
        }
    }

    /// Variable occurrences of term `id` as `(variable index, level)` where the root is level 1.
    pub fn var_levels(&self, id: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![(id, 1usize)];
        while let Some((t, level)) = stack.pop() {
            match &self.shapes[t] {
                Shape::Var(i) => out.push((*i, level)),
                Shape::Node(_, children) => {
                    stack.extend(children.iter().map(|&c| (c, level + 1)));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add_sig() -> Signature {
        Signature::new([("add", 2), ("succ", 1), ("zero", 0)]).unwrap()
    }

    #[test]
    fn depth_one_is_leaves() {
        let sig = Signature::new([("zero", 0)]).unwrap();
        let u = enumerate(&sig, &VarSet::new(["x"]).unwrap(), 1).unwrap();
        assert_eq!(u.terms(), &[Term::var("x"), Term::constant("zero")]);
    }

    #[test]
    fn unary_chain() {
        let sig = Signature::new([("zero", 0), ("succ", 1)]).unwrap();
        let u = enumerate(&sig, &VarSet::empty(), 3).unwrap();
        let shown: Vec<String> = u.terms().iter().map(|t| t.to_string()).collect();
        assert_eq!(shown, ["zero", "succ(zero)", "succ(succ(zero))"]);
    }

    #[test]
    fn add_depth_two_has_fifteen_terms() {
        let u = enumerate(&add_sig(), &VarSet::new(["x", "y"]).unwrap(), 2).unwrap();
        assert_eq!(u.len(), 15);
        assert_eq!(u.layer_end(1), 3);
    }

    #[test]
    fn layers_are_id_prefixes() {
        let vars = VarSet::new(["x", "y"]).unwrap();
        let u2 = enumerate(&add_sig(), &vars, 2).unwrap();
        let u3 = enumerate(&add_sig(), &vars, 3).unwrap();
        assert_eq!(&u3.terms()[..u2.len()], u2.terms());
        for (id, t) in u3.terms().iter().enumerate() {
            assert_eq!(u3.id(t), Some(id));
            assert_eq!(u3.term_depth(id), t.depth());
        }
    }

    #[test]
    fn cap_is_named_in_error() {
        let err = enumerate(&add_sig(), &VarSet::new(["x", "y"]).unwrap(), 4).unwrap_err();
        assert!(err.to_string().contains("20000"), "{err}");
        assert!(matches!(err, TermError::CapExceeded { cap: 20000, .. }));
    }

    #[test]
    fn instantiate_respects_bound() {
        let vars = VarSet::new(["x", "y"]).unwrap();
        let u = enumerate(&add_sig(), &vars, 2).unwrap();
        let succ_x = u.id(&Term::node("succ", vec![Term::var("x")])).unwrap();
        let zero = u.id(&Term::constant("zero")).unwrap();
        let succ_zero = u.id(&Term::node("succ", vec![Term::constant("zero")])).unwrap();
        assert_eq!(u.instantiate(succ_x, &[zero, zero]), Some(succ_zero));
        assert_eq!(u.instantiate(succ_x, &[succ_zero, zero]), None);
    }
}
