//! Random formulas and environments for randomized test suites.
//!
//! Constants and half of all variable bindings are drawn from a small
//! integer lattice so that exact equalities — the interesting boundary
//! cases for `!=` atoms and for penalties that must vanish exactly —
//! occur with substantial probability instead of almost never.

use rand::Rng;

use crate::logic::{Atom, Env, Formula, Predicate, Term};

const VAR_POOL: [&str; 6] = ["u", "v", "w", "x", "y", "z"];

/// Shape controls for [`random_formula`].
#[derive(Debug, Clone)]
pub struct FormulaProfile {
    /// Nesting bound: an atom has depth 0, every connective adds 1.
    pub max_depth: usize,
    /// Allow `not` around conjunctions. The additive-penalty family has
    /// no translation for those, so its suites keep this off.
    pub negate_compounds: bool,
    /// How many distinct variable names to draw from (at most 6).
    pub var_count: usize,
}

impl FormulaProfile {
    /// Formulas every family can compile: negation on atoms only.
    pub fn penalty_fragment() -> Self {
        FormulaProfile {
            max_depth: 4,
            negate_compounds: false,
            var_count: 4,
        }
    }

    /// The whole surface language, including negated conjunctions.
    pub fn full() -> Self {
        FormulaProfile {
            negate_compounds: true,
            ..FormulaProfile::penalty_fragment()
        }
    }
}

/// Draws a formula within `profile`'s shape bounds.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, profile: &FormulaProfile) -> Formula {
    assert!(profile.var_count >= 1 && profile.var_count <= VAR_POOL.len());
    node(rng, profile, profile.max_depth)
}

fn node<R: Rng + ?Sized>(rng: &mut R, profile: &FormulaProfile, budget: usize) -> Formula {
    if budget == 0 {
        return Formula::Atom(random_atom(rng, profile));
    }
    match rng.gen_range(0..10) {
        0..=3 => Formula::Atom(random_atom(rng, profile)),
        4..=5 => Formula::and(
            node(rng, profile, budget - 1),
            node(rng, profile, budget - 1),
        ),
        6..=7 => {
            let arity = rng.gen_range(3..=4);
            Formula::conj((0..arity).map(|_| node(rng, profile, budget - 1)).collect())
        }
        _ => {
            let inner = if profile.negate_compounds {
                node(rng, profile, budget - 1)
            } else {
                Formula::Atom(random_atom(rng, profile))
            };
            Formula::not(inner)
        }
    }
}

fn random_atom<R: Rng + ?Sized>(rng: &mut R, profile: &FormulaProfile) -> Atom {
    let predicate = if rng.gen_bool(0.7) {
        Predicate::Le
    } else {
        Predicate::Neq
    };
    let lhs = random_term(rng, profile);
    let rhs = random_term(rng, profile);
    Atom {
        predicate,
        lhs,
        rhs,
        negated: false,
    }
}

fn random_term<R: Rng + ?Sized>(rng: &mut R, profile: &FormulaProfile) -> Term {
    if rng.gen_bool(0.7) {
        Term::var(VAR_POOL[rng.gen_range(0..profile.var_count)])
    } else {
        Term::constant(rng.gen_range(-3..=3) as f64)
    }
}

/// Binds every free variable of `formula` to a draw from `[lo, hi]`:
/// half the time a uniform real, half the time a uniform integer of the
/// interval (when it contains one), so comparisons against the small
/// integer constants of [`random_formula`] can tie exactly.
pub fn random_env<R: Rng + ?Sized>(rng: &mut R, formula: &Formula, lo: f64, hi: f64) -> Env {
    assert!(lo < hi && lo.is_finite() && hi.is_finite());
    let int_lo = lo.ceil() as i64;
    let int_hi = hi.floor() as i64;
    formula
        .free_vars()
        .into_iter()
        .map(|name| {
            let value = if int_lo <= int_hi && rng.gen_bool(0.5) {
                rng.gen_range(int_lo..=int_hi) as f64
            } else {
                rng.gen_range(lo..=hi)
            };
            (name, value)
        })
        .collect()
}

/// Nesting depth: 0 for an atom, 1 + deepest child for connectives.
pub fn depth(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) => 0,
        Formula::Neg(inner) => 1 + depth(inner),
        Formula::Conj(children) => 1 + children.iter().map(depth).max().unwrap_or(0),
    }
}
