//! Numeric readings of a single comparison atom.
//!
//! Three families share one generic implementation so plain and
//! dual-number evaluation always agree on branch decisions:
//!
//! * additive penalties on `[0, inf)` where 0 is "satisfied"
//!   ([`dl2_atom`]),
//! * fuzzy truth values in `[0, 1]` where 1 is "true"
//!   ([`atom_oracle_eval`] with [`AtomOracle::Crisp`] or
//!   [`AtomOracle::Graded`]),
//! * signed robustness margins on the whole real line
//!   ([`AtomOracle::Robustness`]).

use crate::autodiff::Scalar;
use crate::logic::{Atom, Env, EvalError, Predicate, Term};

use super::{AtomOracle, VarLookup};

pub(crate) fn term_value<T: Scalar>(
    term: &Term,
    lookup: &impl VarLookup<T>,
) -> Result<T, EvalError> {
    match term {
        Term::Var(name) => lookup
            .var(name)
            .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
        Term::Const(v) => Ok(T::from_f64(*v)),
    }
}

/// Additive penalty of one atom: `max(lhs - rhs, 0)` for `<=`,
/// `xi * [lhs = rhs]` for `!=` (`xi > 0` prices the equality), and for
/// negated atoms the complement:
/// `not (lhs <= rhs)` is `max(rhs - lhs, 0) + xi * [lhs = rhs]` so that the
/// penalty is zero exactly when `rhs < lhs` strictly, and
/// `not (lhs != rhs)` is `xi * [lhs != rhs]`.
pub fn dl2_atom(atom: &Atom, env: &Env, xi: f64) -> Result<f64, EvalError> {
    dl2_atom_value(atom, env, xi)
}

pub(crate) fn dl2_atom_value<T: Scalar>(
    atom: &Atom,
    lookup: &impl VarLookup<T>,
    xi: f64,
) -> Result<T, EvalError> {
    let l = term_value(&atom.lhs, lookup)?;
    let r = term_value(&atom.rhs, lookup)?;
    let zero = T::from_f64(0.0);
    let xi = T::from_f64(xi);
    let one = T::from_f64(1.0);
    Ok(match (atom.predicate, atom.negated) {
        (Predicate::Le, false) => (l - r).max(zero),
        (Predicate::Le, true) => (r - l).max(zero) + xi * l.eq_indicator(r),
        (Predicate::Neq, false) => xi * l.eq_indicator(r),
        (Predicate::Neq, true) => xi * (one - l.eq_indicator(r)),
    })
}

/// Truth value of one atom under a crisp, graded, or robustness reading.
///
/// * Crisp: exact boolean membership, 1 or 0.
/// * Graded (scale `s`): `<=` ramps down as `clamp(1 - max(lhs-rhs,0)/s, 0, 1)`
///   and `!=` saturates as `1 - exp(-|lhs-rhs|/s)`; negated atoms are
///   `1 - base`.
/// * Robustness: signed margin, `rhs - lhs` for `<=` and `|lhs - rhs|` for
///   `!=`; negated atoms flip the sign.
pub fn atom_oracle_eval(atom: &Atom, env: &Env, oracle: &AtomOracle) -> Result<f64, EvalError> {
    oracle_atom_value(atom, env, oracle)
}

pub(crate) fn oracle_atom_value<T: Scalar>(
    atom: &Atom,
    lookup: &impl VarLookup<T>,
    oracle: &AtomOracle,
) -> Result<T, EvalError> {
    let l = term_value(&atom.lhs, lookup)?;
    let r = term_value(&atom.rhs, lookup)?;
    let zero = T::from_f64(0.0);
    let one = T::from_f64(1.0);
    Ok(match oracle {
        AtomOracle::Crisp => {
            let holds = match atom.predicate {
                Predicate::Le => l.value() <= r.value(),
                Predicate::Neq => l.value() != r.value(),
            };
            T::from_f64(if holds != atom.negated { 1.0 } else { 0.0 })
        }
        AtomOracle::Graded { scale } => {
            let s = T::from_f64(*scale);
            let base = match atom.predicate {
                Predicate::Le => (one - (l - r).max(zero) / s).min(one).max(zero),
                Predicate::Neq => one - (-((l - r).abs() / s)).exp(),
            };
            if atom.negated {
                one - base
            } else {
                base
            }
        }
        AtomOracle::Robustness => {
            let base = match atom.predicate {
                Predicate::Le => r - l,
                Predicate::Neq => (l - r).abs(),
            };
            if atom.negated {
                -base
            } else {
                base
            }
        }
    })
}
