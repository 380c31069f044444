//! Randomized law suite with truncation margins.
//!
//! The carrier is the universe of depth `D`. A law with margin `m` draws its
//! random relations from terms of depth `≤ D - m`, which keeps every term
//! the law mentions inside the carrier. Laws about the reduction relations
//! are checked once on the whole carrier; where truncation can hide a
//! witness, failing pairs are rechecked against unbounded reduct sets.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analyze::confluence::arbitrated_inclusion;
use crate::analyze::random::{law_rng, random_rel, random_var_rel};
use crate::ops::{
    barr_lift, barr_lift_formula, compref, compreff, ctx_closure, full_ext, full_ext_lfp,
    ground_instances, howe_ext, i_eta, parallel_ext, parallel_ext_lfp, rel_subst, scc_ext,
    seq_ext, subst_adjoint,
};
use crate::reduce::{full_image, ground_image, parallel_image, scc_image, seq_image};
use crate::rel::{kleene_lfp, Rel};
use crate::term::{ESystem, Term};
use crate::universe::{enumerate, Universe};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawConfig {
    pub depth: usize,
    pub trials: usize,
    pub seed: u64,
    /// Pair density of random relations; `None` picks about two pairs per row.
    pub density: Option<f64>,
    /// Adds the uncorrected substitution law, which should fail.
    pub include_mutant: bool,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            depth: 3,
            trials: 100,
            seed: 0,
            density: None,
            include_mutant: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    /// The random inputs, as pair lists.
    pub inputs: Vec<(String, Vec<(String, String)>)>,
    /// A pair on the left side of the law but not on the right.
    pub witness: (String, String),
    pub side: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub name: String,
    pub anchor: String,
    pub trials: usize,
    pub margin: usize,
    pub pass: bool,
    /// Recorded for information; does not count towards the suite verdict.
    pub informational: bool,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub depth: usize,
    pub seed: u64,
    pub results: Vec<LawResult>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass || r.informational)
    }

    pub fn get(&self, name: &str) -> Option<&LawResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

type Inputs<'a> = [(&'a str, &'a Rel)];

fn describe(inputs: &Inputs<'_>) -> Vec<(String, Vec<(String, String)>)> {
    inputs
        .iter()
        .map(|(name, r)| {
            let pairs = r
                .term_pairs()
                .into_iter()
                .map(|(t, s)| (t.to_string(), s.to_string()))
                .collect();
            (name.to_string(), pairs)
        })
        .collect()
}

fn found(inputs: &Inputs<'_>, r: &Rel, pair: (usize, usize), side: &str) -> Counterexample {
    let u = r.universe();
    Counterexample {
        trial: 0,
        inputs: describe(inputs),
        witness: (u.term(pair.0).to_string(), u.term(pair.1).to_string()),
        side: side.to_string(),
    }
}

/// `lhs ≤ rhs`, with the first excess pair as witness.
pub fn check_leq(lhs: &Rel, rhs: &Rel, inputs: &Inputs<'_>) -> Result<Option<Counterexample>> {
    Ok(lhs
        .first_excess(rhs)?
        .map(|p| found(inputs, lhs, p, "left side only")))
}

/// `lhs = rhs`, with the first pair on one side only as witness.
pub fn check_equal(lhs: &Rel, rhs: &Rel, inputs: &Inputs<'_>) -> Result<Option<Counterexample>> {
    if let Some(p) = lhs.first_excess(rhs)? {
        return Ok(Some(found(inputs, lhs, p, "left side only")));
    }
    Ok(rhs
        .first_excess(lhs)?
        .map(|p| found(inputs, lhs, p, "right side only")))
}

fn check_arbitrated(
    lhs: &Rel,
    rhs: &Rel,
    holds: impl FnMut(&Term, &Term) -> bool,
) -> Result<Option<Counterexample>> {
    let outcome = arbitrated_inclusion(lhs, rhs, holds)?;
    Ok(outcome.witness.map(|(t, s)| Counterexample {
        trial: 0,
        inputs: Vec::new(),
        witness: (t.to_string(), s.to_string()),
        side: "left side only, also on unbounded terms".into(),
    }))
}

/// Runs `trial` up to `trials` times on a dedicated random stream and
/// keeps the first counterexample.
pub fn run_trials(
    name: &str,
    anchor: &str,
    margin: usize,
    trials: usize,
    seed: u64,
    stream: u64,
    mut trial: impl FnMut(&mut ChaCha8Rng) -> Result<Option<Counterexample>>,
) -> Result<LawResult> {
    let mut rng = law_rng(seed, stream);
    for k in 0..trials {
        if let Some(mut cx) = trial(&mut rng)? {
            cx.trial = k;
            return Ok(LawResult {
                name: name.into(),
                anchor: anchor.into(),
                trials: k + 1,
                margin,
                pass: false,
                informational: false,
                counterexample: Some(cx),
            });
        }
    }
    Ok(LawResult {
        name: name.into(),
        anchor: anchor.into(),
        trials,
        margin,
        pass: true,
        informational: false,
        counterexample: None,
    })
}

fn once(
    name: &str,
    anchor: &str,
    margin: usize,
    outcome: Result<Option<Counterexample>>,
) -> Result<LawResult> {
    let cx = outcome?;
    Ok(LawResult {
        name: name.into(),
        anchor: anchor.into(),
        trials: 1,
        margin,
        pass: cx.is_none(),
        informational: false,
        counterexample: cx,
    })
}

struct Ctx<'a> {
    u: &'a Arc<Universe>,
    config: &'a LawConfig,
    results: Vec<LawResult>,
    stream: u64,
}

impl Ctx<'_> {
    fn rel(&self, margin: usize, rng: &mut ChaCha8Rng) -> Rel {
        random_rel(self.u, self.config.depth - margin, self.config.density, rng)
    }

    fn law(
        &mut self,
        name: &str,
        anchor: &str,
        margin: usize,
        trial: impl FnMut(&mut ChaCha8Rng) -> Result<Option<Counterexample>>,
    ) -> Result<()> {
        self.stream += 1;
        let r = run_trials(name, anchor, margin, self.config.trials, self.config.seed, self.stream, trial)?;
        self.results.push(r);
        Ok(())
    }
}

/// Runs every law on `es` at the configured depth.
pub fn law_suite(es: &ESystem, config: &LawConfig) -> Result<LawReport> {
    let d = config.depth;
    let u = enumerate(es.sig(), es.vars(), d)?;
    let mut cx = Ctx {
        u: &u,
        config,
        results: Vec::new(),
        stream: 0,
    };
    rel_laws(&mut cx)?;
    relator_laws(&mut cx)?;
    subst_laws(&mut cx)?;
    adjoint_law(es, &mut cx)?;
    let mut results = cx.results;
    results.extend(closure_facts(es, &u)?);
    Ok(LawReport {
        depth: d,
        seed: config.seed,
        results,
    })
}

fn rel_laws(cx: &mut Ctx<'_>) -> Result<()> {
    let id = Rel::identity(cx.u);
    let gen = |rng: &mut ChaCha8Rng, cx: &Ctx<'_>| cx.rel(0, rng);
    let (a_, b_, c_) = ("a", "b", "c");

    let snapshot = Ctx { u: cx.u, config: cx.config, results: Vec::new(), stream: 0 };
    cx.law("modular-law", "a;b ∧ c ≤ (a ∧ c;b°);b", 0, |rng| {
        let (a, b, c) = (gen(rng, &snapshot), gen(rng, &snapshot), gen(rng, &snapshot));
        let lhs = a.compose(&b)?.meet(&c)?;
        let rhs = a.meet(&c.compose(&b.converse())?)?.compose(&b)?;
        check_leq(&lhs, &rhs, &[(a_, &a), (b_, &b), (c_, &c)])
    })?;
    cx.law("compose-distributes-over-join", "a;(b ∨ c) = a;b ∨ a;c", 0, |rng| {
        let (a, b, c) = (gen(rng, &snapshot), gen(rng, &snapshot), gen(rng, &snapshot));
        let lhs = a.compose(&b.join(&c)?)?;
        let rhs = a.compose(&b)?.join(&a.compose(&c)?)?;
        check_equal(&lhs, &rhs, &[(a_, &a), (b_, &b), (c_, &c)])
    })?;
    cx.law("converse-involution", "a°° = a", 0, |rng| {
        let a = gen(rng, &snapshot);
        check_equal(&a.converse().converse(), &a, &[(a_, &a)])
    })?;
    cx.law("converse-antidistributes", "(a;b)° = b°;a°", 0, |rng| {
        let (a, b) = (gen(rng, &snapshot), gen(rng, &snapshot));
        let lhs = a.compose(&b)?.converse();
        let rhs = b.converse().compose(&a.converse())?;
        check_equal(&lhs, &rhs, &[(a_, &a), (b_, &b)])
    })?;
    cx.law("converse-monotone", "a ≤ a ∨ b ⇒ a° ≤ (a ∨ b)°", 0, |rng| {
        let (a, b) = (gen(rng, &snapshot), gen(rng, &snapshot));
        check_leq(&a.converse(), &a.join(&b)?.converse(), &[(a_, &a), (b_, &b)])
    })?;
    cx.law("compose-unit", "a;Δ = a = Δ;a", 0, |rng| {
        let a = gen(rng, &snapshot);
        Ok(check_equal(&a.compose(&id)?, &a, &[(a_, &a)])?
            .or(check_equal(&id.compose(&a)?, &a, &[(a_, &a)])?))
    })?;

    // fixed points on a universe small enough to compare with graph search
    let small = enumerate(cx.u.sig(), cx.u.vars(), 2)?;
    let small_id = Rel::identity(&small);
    let config = cx.config.clone();
    cx.law(
        "lfp-least-fixed-point",
        "μx. Δ ∨ a;x is a fixed point, below every pre-fixed point, equal to reachability",
        0,
        |rng| {
            let a = random_rel(&small, 2, config.density, rng);
            let step = |x: &Rel| small_id.join(&a.compose(x)?);
            let mu = kleene_lfp(&small, step)?;
            if let Some(c) = check_equal(&step(&mu)?, &mu, &[("a", &a)])? {
                return Ok(Some(c));
            }
            if let Some(c) = check_equal(&mu, &a.reachability(), &[("a", &a)])? {
                return Ok(Some(c));
            }
            // climb from a random start until F(y) ≤ y
            let mut y = random_rel(&small, 2, config.density, rng);
            loop {
                let next = y.join(&step(&y)?)?;
                if next == y {
                    break;
                }
                y = next;
            }
            check_leq(&mu, &y, &[("a", &a), ("y", &y)])
        },
    )?;
    Ok(())
}

fn relator_laws(cx: &mut Ctx<'_>) -> Result<()> {
    let u = Arc::clone(cx.u);
    let d = cx.config.depth;
    let delta_inner = Rel::identity_upto(&u, d - 1);
    let id = Rel::identity(&u);
    let eta = i_eta(&u);
    let snapshot = Ctx { u: &u, config: cx.config, results: Vec::new(), stream: 0 };
    let gen = |rng: &mut ChaCha8Rng| snapshot.rel(1, rng);

    cx.law("compref-identity", "compref(Δ) = Δ", 1, |_| {
        check_equal(&compref(&delta_inner), &id, &[])
    })?;
    cx.law("compreff-identity", "compreff(Δ) ∨ I_η = Δ", 1, |_| {
        check_equal(&compreff(&delta_inner).join(&eta)?, &id, &[])
    })?;
    for (name, f) in [("compref", compref as fn(&Rel) -> Rel), ("compreff", compreff)] {
        cx.law(
            &format!("{name}-composition"),
            &format!("{name}(a;b) = {name}(a);{name}(b)"),
            1,
            |rng| {
                let (a, b) = (gen(rng), gen(rng));
                check_equal(&f(&a.compose(&b)?), &f(&a).compose(&f(&b))?, &[("a", &a), ("b", &b)])
            },
        )?;
        cx.law(
            &format!("{name}-converse"),
            &format!("{name}(a°) = {name}(a)°"),
            1,
            |rng| {
                let a = gen(rng);
                check_equal(&f(&a.converse()), &f(&a).converse(), &[("a", &a)])
            },
        )?;
        cx.law(
            &format!("{name}-monotone"),
            &format!("a ≤ a ∨ b ⇒ {name}(a) ≤ {name}(a ∨ b)"),
            1,
            |rng| {
                let (a, b) = (gen(rng), gen(rng));
                check_leq(&f(&a), &f(&a.join(&b)?), &[("a", &a), ("b", &b)])
            },
        )?;
    }
    cx.law(
        "compref-chain-join",
        "compref(a₀ ∨ a₁ ∨ a₂) = compref(a₀) ∨ compref(a₁) ∨ compref(a₂) for a₀ ≤ a₁ ≤ a₂",
        1,
        |rng| {
            let a0 = gen(rng);
            let a1 = a0.join(&gen(rng))?;
            let a2 = a1.join(&gen(rng))?;
            let lhs = compref(&a0.join(&a1)?.join(&a2)?);
            let rhs = compref(&a0).join(&compref(&a1))?.join(&compref(&a2))?;
            check_equal(&lhs, &rhs, &[("a0", &a0), ("a1", &a1), ("a2", &a2)])
        },
    )?;
    cx.law("compref-join-lax", "compref(a) ∨ compref(b) ≤ compref(a ∨ b)", 1, |rng| {
        let (a, b) = (gen(rng), gen(rng));
        check_leq(&compref(&a).join(&compref(&b))?, &compref(&a.join(&b)?), &[("a", &a), ("b", &b)])
    })?;
    cx.law("compreff-avoids-variables", "compreff(a) ∧ I_η = ⊥", 1, |rng| {
        let a = gen(rng);
        check_equal(&compreff(&a).meet(&eta)?, &Rel::bottom(&u), &[("a", &a)])
    })?;
    cx.law("compref-star", "compref(a*) = compref(a)* for reflexive a", 1, |rng| {
        let a = gen(rng).refl_close();
        check_equal(&compref(&a.rtc()), &compref(&a).rtc(), &[("a", &a)])
    })?;
    cx.law("compref-star-lax", "compref(a)* ≤ compref(a*)", 1, |rng| {
        let a = gen(rng);
        check_leq(&compref(&a).rtc(), &compref(&a.rtc()), &[("a", &a)])
    })?;
    Ok(())
}

fn subst_laws(cx: &mut Ctx<'_>) -> Result<()> {
    let u = Arc::clone(cx.u);
    let d = cx.config.depth;
    let id = Rel::identity(&u);
    let eta = i_eta(&u);
    let include_mutant = cx.config.include_mutant;
    let snapshot = Ctx { u: &u, config: cx.config, results: Vec::new(), stream: 0 };
    // a ranges over depth ≤ D-1; substituted relations over leaves
    let gen_a = |rng: &mut ChaCha8Rng| snapshot.rel(1, rng);
    let gen_b = |rng: &mut ChaCha8Rng| snapshot.rel(d - 1, rng);
    let m = 1;

    cx.law("subst-compreff", "compreff(a)[b] ≤ compreff(a[b])", m, |rng| {
        let (a, b) = (gen_a(rng), gen_b(rng));
        check_leq(&rel_subst(&compreff(&a), &b)?, &compreff(&rel_subst(&a, &b)?), &[("a", &a), ("b", &b)])
    })?;
    cx.law("subst-variables", "I_η[b] ≤ b", m, |rng| {
        let b = gen_b(rng);
        check_leq(&rel_subst(&eta, &b)?, &b, &[("b", &b)])
    })?;
    cx.law("subst-compref", "compref(a)[b] ≤ compref(a[b]) ∨ b", m, |rng| {
        let (a, b) = (gen_a(rng), gen_b(rng));
        let rhs = compref(&rel_subst(&a, &b)?).join(&b)?;
        check_leq(&rel_subst(&compref(&a), &b)?, &rhs, &[("a", &a), ("b", &b)])
    })?;
    if include_mutant {
        cx.law("mutant-subst-compref", "compref(a)[b] ≤ compref(a[b])", m, |rng| {
            let (a, b) = (gen_a(rng), gen_b(rng));
            check_leq(&rel_subst(&compref(&a), &b)?, &compref(&rel_subst(&a, &b)?), &[("a", &a), ("b", &b)])
        })?;
    }
    cx.law("subst-associative", "a[b][c] = a[b[c]]", m, |rng| {
        let (a, b, c) = (gen_a(rng), gen_b(rng), gen_b(rng));
        let lhs = rel_subst(&rel_subst(&a, &b)?, &c)?;
        let rhs = rel_subst(&a, &rel_subst(&b, &c)?)?;
        check_equal(&lhs, &rhs, &[("a", &a), ("b", &b), ("c", &c)])
    })?;
    cx.law("subst-associative-lax", "a[b][c] ≤ a[b[c]]", m, |rng| {
        let (a, b, c) = (gen_a(rng), gen_b(rng), gen_b(rng));
        let lhs = rel_subst(&rel_subst(&a, &b)?, &c)?;
        let rhs = rel_subst(&a, &rel_subst(&b, &c)?)?;
        check_leq(&lhs, &rhs, &[("a", &a), ("b", &b), ("c", &c)])
    })?;
    cx.law("subst-monotone", "a ≤ a′ ∧ b ≤ b′ ⇒ a[b] ≤ a′[b′]", m, |rng| {
        let (a, b) = (gen_a(rng), gen_b(rng));
        let a2 = a.join(&gen_a(rng))?;
        let b2 = b.join(&gen_b(rng))?;
        check_leq(&rel_subst(&a, &b)?, &rel_subst(&a2, &b2)?, &[("a", &a), ("b", &b), ("a′", &a2), ("b′", &b2)])
    })?;
    cx.law("subst-converse", "a°[b°] = a[b]°", m, |rng| {
        let (a, b) = (gen_a(rng), gen_b(rng));
        check_equal(&rel_subst(&a.converse(), &b.converse())?, &rel_subst(&a, &b)?.converse(), &[("a", &a), ("b", &b)])
    })?;
    cx.law("subst-identity", "Δ[Δ] = Δ", 0, |_| check_equal(&rel_subst(&id, &id)?, &id, &[]))?;
    cx.law("subst-composition-lax", "(a;a′)[b;b′] ≤ a[b];a′[b′]", m, |rng| {
        let (a, a2, b, b2) = (gen_a(rng), gen_a(rng), gen_b(rng), gen_b(rng));
        let lhs = rel_subst(&a.compose(&a2)?, &b.compose(&b2)?)?;
        let rhs = rel_subst(&a, &b)?.compose(&rel_subst(&a2, &b2)?)?;
        check_leq(&lhs, &rhs, &[("a", &a), ("a′", &a2), ("b", &b), ("b′", &b2)])
    })?;
    cx.law("subst-bottom", "a[⊥] = ⊥", m, |rng| {
        let a = gen_a(rng);
        let bottom = Rel::bottom(&u);
        if u.vars().is_empty() {
            return check_equal(&rel_subst(&a, &bottom)?, &a, &[("a", &a)]);
        }
        check_equal(&rel_subst(&a, &bottom)?, &bottom, &[("a", &a)])
    })?;
    cx.law("subst-reflexive-exchange", "a[Δ]^= = a^=[Δ]", m, |rng| {
        let a = gen_a(rng);
        check_equal(&rel_subst(&a, &id)?.refl_close(), &rel_subst(&a.refl_close(), &id)?, &[("a", &a)])
    })?;
    Ok(())
}

/// The Galois connection is checked on a depth-`D-1` universe, where the
/// pairwise adjoint is cheap.
fn adjoint_law(es: &ESystem, cx: &mut Ctx<'_>) -> Result<()> {
    let small = enumerate(es.sig(), es.vars(), cx.config.depth - 1)?;
    let d = small.depth();
    let density = cx.config.density;
    cx.law("subst-adjoint-galois", "a[b] ≤ c ⇔ a ≤ b ≫ c", 1, |rng| {
        let a = random_rel(&small, d, density, rng);
        let b = random_rel(&small, 1, density, rng);
        let mut c = random_rel(&small, d, density, rng);
        if rand::Rng::gen_bool(rng, 0.5) {
            c = c.join(&rel_subst(&a, &b)?)?;
        }
        let left = rel_subst(&a, &b)?.leq(&c)?;
        let adj = subst_adjoint(&b, &c)?;
        let right = a.leq(&adj)?;
        if left == right {
            return Ok(None);
        }
        let inputs = [("a", &a), ("b", &b), ("c", &c)];
        Ok(match a.first_excess(&adj)? {
            Some(p) => Some(found(&inputs, &a, p, "a ≰ b ≫ c while a[b] ≤ c")),
            None => check_leq(&rel_subst(&a, &b)?, &c, &inputs)?,
        })
    })?;
    Ok(())
}

/// Facts about the reduction relations, checked once on the carrier.
fn closure_facts(es: &ESystem, u: &Arc<Universe>) -> Result<Vec<LawResult>> {
    let id = Rel::identity(u);
    let sp = parallel_ext(es, u)?;
    let sf = full_ext(es, u)?;
    let sh = howe_ext(es, u)?;
    let scc = scc_ext(es, u)?;
    let full_holds = |t: &Term, s: &Term| full_image(t, es).contains(s);
    let mut out = vec![
        once("sp-substitutive", "a^SP[Δ] ≤ a^SP", 0, check_leq(&rel_subst(&sp, &id)?, &sp, &[]))?,
        once(
            "sp-substitution-of-reducts",
            "Δ[a^SP] ≤ a^SP",
            0,
            check_leq(&rel_subst(&id, &sp)?, &sp, &[]),
        )?,
        once(
            "sf-compatible",
            "compref(a^SF) ≤ a^SF",
            0,
            check_arbitrated(&compref(&sf), &sf, full_holds),
        )?,
        once(
            "sf-substitutive",
            "a^SF[Δ] ≤ a^SF",
            0,
            check_arbitrated(&rel_subst(&sf, &id)?, &sf, full_holds),
        )?,
        once(
            "sf-substitution-of-reducts",
            "Δ[a^SF] ≤ a^SF",
            0,
            check_arbitrated(&rel_subst(&id, &sf)?, &sf, full_holds),
        )?,
        once("parallel-below-full", "a^SP ≤ a^SF", 0, check_leq(&sp, &sf, &[]))?,
        once("full-below-parallel-star", "a^SF ≤ (a^SP)*", 0, check_leq(&sf, &sp.rtc(), &[]))?,
        once(
            "parallel-star-equals-full-star",
            "(a^SP)* = (a^SF)*",
            0,
            check_equal(&sp.rtc(), &sf.rtc(), &[]),
        )?,
        once("scc-below-howe", "a^SCC ≤ a^SH", 0, check_arbitrated(&scc, &sh, full_holds))?,
    ];

    let mut reflexive_triangle = once(
        "scc-triangle-reflexive-form",
        "a^SCC ≤ a^SCC;(a^SCC)°",
        0,
        check_leq(&scc, &scc.compose(&scc.converse())?, &[]),
    )?;
    reflexive_triangle.informational = true;
    out.push(reflexive_triangle);

    // conventional triangle: some reduct of t is reachable in one step from every reduct of t
    let inner = u.layer_end(u.depth() - 1);
    let mut failure = None;
    for i in 0..inner {
        let t = u.term(i);
        let reducts = scc_image(t, es);
        let images: Vec<BTreeSet<Term>> = reducts.iter().map(|s| scc_image(s, es)).collect();
        let ok = reducts.iter().any(|cand| images.iter().all(|img| img.contains(cand)));
        if !ok {
            failure = Some(Counterexample {
                trial: 0,
                inputs: Vec::new(),
                witness: (t.to_string(), String::new()),
                side: "no reduct of this term is a common one-step reduct of all its reducts".into(),
            });
            break;
        }
    }
    out.push(LawResult {
        name: "scc-triangle".into(),
        anchor: "∀t ∃t′ ∈ M(t) ∀s ∈ M(t): t′ ∈ M(s)".into(),
        trials: inner,
        margin: 1,
        pass: failure.is_none(),
        informational: true,
        counterexample: failure,
    });
    Ok(out)
}

/// Fixed-point characterisations compared on pairs of depth `≤ D - 1`.
pub fn structural_equalities(es: &ESystem, u: &Arc<Universe>, trials: usize, seed: u64) -> Result<Vec<LawResult>> {
    let d = u.depth();
    let inner = |r: Rel| r.restrict_depth(d - 1);
    let g = ground_instances(es, u)?;
    let mut out = vec![
        once(
            "parallel-equals-context-closure",
            "a^SP = a[Δ]^C",
            1,
            check_equal(&inner(parallel_ext(es, u)?), &inner(ctx_closure(&g)?), &[]),
        )?,
        once(
            "parallel-structural-equals-fixed-point",
            "a^SP = μx. a[Δ] ∨ compref(x)",
            1,
            check_equal(&inner(parallel_ext(es, u)?), &inner(parallel_ext_lfp(es, u)?), &[]),
        )?,
        once(
            "full-equals-howe",
            "a^SF = a^SH",
            1,
            check_equal(&inner(full_ext(es, u)?), &inner(howe_ext(es, u)?), &[]),
        )?,
        once(
            "full-catamorphism-equals-fixed-point",
            "a^SF = μx. (I_η ∨ compreff(x)); a[Δ]^=",
            1,
            check_equal(&inner(full_ext(es, u)?), &inner(full_ext_lfp(es, u)?), &[]),
        )?,
    ];
    out.push(run_trials(
        "barr-lift-inductive",
        "Ŝa = μx. η°aη ∨ compreff(x)",
        1,
        trials,
        seed,
        900,
        |rng| {
            let a = random_var_rel(u, rng);
            check_equal(&inner(barr_lift(&a)), &inner(barr_lift_formula(&a)?), &[("a", &a)])
        },
    )?);
    Ok(out)
}

/// Compares each unbounded reduct set, cut down to the universe, with the
/// row of the matching bounded relation, for every term of depth `≤ D - 1`.
pub fn oracle_cross_check(es: &ESystem, u: &Arc<Universe>) -> Result<Vec<LawResult>> {
    type Image = fn(&Term, &ESystem) -> BTreeSet<Term>;
    let relations: [(&str, &str, Rel, Image); 5] = [
        ("ground", "a[Δ]", ground_instances(es, u)?, ground_image),
        ("seq", "one-step reduction", seq_ext(es, u)?, seq_image),
        ("parallel", "a^SP", parallel_ext(es, u)?, parallel_image),
        ("full", "a^SF", full_ext(es, u)?, full_image),
        ("scc", "a^SCC", scc_ext(es, u)?, scc_image),
    ];
    let inner = u.layer_end(u.depth() - 1);
    let mut out = Vec::new();
    for (mode, anchor, rel, image) in relations {
        let mut failure = None;
        for i in 0..inner {
            let t = u.term(i);
            let expected: BTreeSet<Term> = image(t, es).into_iter().filter(|s| u.id(s).is_some()).collect();
            let actual: BTreeSet<Term> = rel.row(i).map(|j| u.term(j).clone()).collect();
            if expected != actual {
                let odd = expected
                    .symmetric_difference(&actual)
                    .next()
                    .expect("sets differ");
                failure = Some(Counterexample {
                    trial: i,
                    inputs: Vec::new(),
                    witness: (t.to_string(), odd.to_string()),
                    side: if expected.contains(odd) {
                        "reduct missing from the relation row".into()
                    } else {
                        "relation row has an extra reduct".into()
                    },
                });
                break;
            }
        }
        out.push(LawResult {
            name: format!("oracle-{mode}"),
            anchor: format!("image ∩ U = row of {anchor}"),
            trials: inner,
            margin: 1,
            pass: failure.is_none(),
            informational: false,
            counterexample: failure,
        });
    }
    Ok(out)
}
