//! Distance-to-nondifferentiability estimation.
//!
//! Every loss family is piecewise smooth: `max(., 0)` hinges, hard
//! minima, equality indicators, branch switches in the smooth robustness
//! conjunction. [`min_kink_gap`] walks a formula at a concrete
//! environment and reports the smallest margin between any such breakpoint
//! and the quantity it tests. A gap of zero means the point sits exactly
//! on a breakpoint; small gaps mean finite differences and one-sided
//! derivatives become unreliable there.
//!
//! The margins mix units (term differences at leaves, truth values at
//! connectives), so treat the result as a conservative screen, not a
//! metric distance.

use crate::logic::{Atom, Env, EvalError, Formula, Predicate};

use super::oracle::{dl2_atom_value, oracle_atom_value, term_value};
use super::{AtomOracle, SemanticsId, SemanticsParams};

/// Smallest margin to any derivative breakpoint of the compiled loss at
/// `env`. Infinite when every active piece is smooth around the point.
pub(crate) fn min_kink_gap(
    s: SemanticsId,
    params: &SemanticsParams,
    oracle: Option<&AtomOracle>,
    formula: &Formula,
    env: &Env,
) -> Result<f64, EvalError> {
    let mut gap = f64::INFINITY;
    walk(s, params, oracle, formula, env, &mut gap)?;
    Ok(gap)
}

/// Evaluates `formula` in the scalar domain of `s`, shrinking `gap` with
/// every breakpoint margin encountered along the way.
fn walk(
    s: SemanticsId,
    params: &SemanticsParams,
    oracle: Option<&AtomOracle>,
    formula: &Formula,
    env: &Env,
    gap: &mut f64,
) -> Result<f64, EvalError> {
    match formula {
        Formula::Atom(atom) => {
            atom_gap(s, oracle, atom, env, gap)?;
            match s {
                SemanticsId::Dl2 => dl2_atom_value(atom, env, params.xi),
                _ => {
                    let oracle = oracle.expect("non-penalty semantics carries an atom oracle");
                    oracle_atom_value(atom, env, oracle)
                }
            }
        }
        Formula::Neg(inner) => {
            let v = walk(s, params, oracle, inner, env, gap)?;
            Ok(match s {
                SemanticsId::Stl => -v,
                SemanticsId::Goedel
                | SemanticsId::Lukasiewicz
                | SemanticsId::Yager
                | SemanticsId::Product => 1.0 - v,
                SemanticsId::Dl2 => {
                    unreachable!("penalty compilation rejects residual negation")
                }
            })
        }
        Formula::Conj(children) => {
            let vals: Vec<f64> = children
                .iter()
                .map(|c| walk(s, params, oracle, c, env, gap))
                .collect::<Result<_, _>>()?;
            Ok(conj_gap(s, params, &vals, gap))
        }
    }
}

fn atom_gap(
    s: SemanticsId,
    oracle: Option<&AtomOracle>,
    atom: &Atom,
    env: &Env,
    gap: &mut f64,
) -> Result<(), EvalError> {
    let delta = term_value(&atom.lhs, env)? - term_value(&atom.rhs, env)?;
    match s {
        // hinge and equality indicator both break at lhs == rhs
        SemanticsId::Dl2 => shrink(gap, delta.abs()),
        _ => match oracle.expect("non-penalty semantics carries an atom oracle") {
            AtomOracle::Crisp => shrink(gap, delta.abs()),
            AtomOracle::Graded { scale } => match atom.predicate {
                // ramp endpoints: delta == 0 and delta == scale
                Predicate::Le => {
                    shrink(gap, delta.abs());
                    shrink(gap, (delta - scale).abs());
                }
                Predicate::Neq => shrink(gap, delta.abs()),
            },
            AtomOracle::Robustness => match atom.predicate {
                Predicate::Le => {} // linear everywhere
                Predicate::Neq => shrink(gap, delta.abs()),
            },
        },
    }
    Ok(())
}

/// Folds/combines `vals` exactly as the conjunction does, recording the
/// margin of each breakpoint the combination passes near.
pub(crate) fn conj_gap(s: SemanticsId, params: &SemanticsParams, vals: &[f64], gap: &mut f64) -> f64 {
    match s {
        SemanticsId::Dl2 => vals.iter().sum(),
        SemanticsId::Goedel => {
            let mut acc = vals[0];
            for &v in &vals[1..] {
                shrink(gap, (acc - v).abs());
                acc = acc.min(v);
            }
            acc
        }
        SemanticsId::Lukasiewicz => {
            let mut acc = vals[0];
            for &v in &vals[1..] {
                shrink(gap, (acc + v - 1.0).abs());
                acc = (acc + v - 1.0).max(0.0);
            }
            acc
        }
        SemanticsId::Yager => {
            let mut acc = vals[0];
            for &v in &vals[1..] {
                let norm =
                    ((1.0 - acc).powf(params.p) + (1.0 - v).powf(params.p)).powf(1.0 / params.p);
                // corner of the p-norm at the all-true point, and the
                // hinge where the norm crosses 1
                shrink(gap, norm);
                shrink(gap, (1.0 - norm).abs());
                acc = (1.0 - norm).max(0.0);
            }
            acc
        }
        SemanticsId::Product => vals.iter().product(),
        SemanticsId::Stl => {
            let m = vals.iter().copied().fold(f64::INFINITY, f64::min);
            // branch switch at min == 0
            shrink(gap, m.abs());
            // argmin handoff where the two smallest conjuncts tie
            let mut above = f64::INFINITY;
            let mut seen_min = false;
            for &v in vals {
                if v == m && !seen_min {
                    seen_min = true;
                } else {
                    above = above.min(v);
                }
            }
            if above.is_finite() {
                shrink(gap, above - m);
            }
            super::connective::stl_and(vals, params.nu)
        }
    }
}

fn shrink(gap: &mut f64, candidate: f64) {
    if candidate < *gap {
        *gap = candidate;
    }
}
