//! Law evaluation and counterexample witnesses.
//!
//! Checks operate on raw conjunct-value tuples, not formulas: each law
//! quantifies over the values a conjunction combines, so tuples are the
//! natural sample space. Witnesses store the sampled inputs and enough
//! structure to re-evaluate the law from scratch, independently of the
//! sampler.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::semantics::connective::{conj_partials, conj_value_with};
use crate::semantics::{SemanticsId, SemanticsParams};

use super::{AuditConfig, PropertyId, PropertyVerdict, Verdict};

/// Conjunction widths cycled through during sampling.
pub(crate) const ARITIES: [usize; 3] = [2, 3, 5];

/// Degenerate-draw threshold: shadow-lifting samples must keep all
/// values, and all pairwise gaps, at least this far from zero.
const DEGENERATE: f64 = 1e-9;

/// Value range tuples are drawn from, per family.
pub(crate) fn sample_domain(s: SemanticsId) -> (f64, f64) {
    match s {
        SemanticsId::Dl2 => (0.0, 10.0),
        SemanticsId::Stl => (-10.0, 10.0),
        _ => (0.0, 1.0),
    }
}

/// Shadow-lifting keeps fuzzy draws off the boundaries: partials of a
/// wide product-style conjunction can legitimately fall below the
/// gradient tolerance when other conjuncts sit near 0.
fn shadow_domain(s: SemanticsId) -> (f64, f64) {
    match s {
        SemanticsId::Dl2 => (0.0, 10.0),
        SemanticsId::Stl => (-10.0, 10.0),
        _ => (0.1, 0.9),
    }
}

fn sample_tuple<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64), m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(lo..=hi)).collect()
}

fn conj(s: SemanticsId, prm: &SemanticsParams, vals: &[f64], lit: bool) -> f64 {
    conj_value_with(s, prm, vals, lit)
}

/// A stored counterexample. Every variant re-evaluates its law from the
/// stored inputs via [`Witness::violates`].
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `conj([value; arity]) != value`.
    Idempotent {
        value: f64,
        arity: usize,
        got: f64,
    },
    /// `conj(values) != conj(values[permutation])`.
    Commutative {
        values: Vec<f64>,
        permutation: Vec<usize>,
        lhs: f64,
        rhs: f64,
    },
    /// Partial derivative at `index` is not strictly positive.
    ShadowLifting {
        values: Vec<f64>,
        index: usize,
        partial: f64,
    },
    /// `conj(values)` escapes `[min(values), max(values)]`.
    MinMaxBounded {
        values: Vec<f64>,
        result: f64,
    },
    /// `alpha * conj(values) != conj(alpha * values)`.
    ScaleInvariant {
        values: Vec<f64>,
        alpha: f64,
        lhs: f64,
        rhs: f64,
    },
    /// `conj(conj(a, b), c) != conj(a, conj(b, c))`.
    Associative {
        values: [f64; 3],
        lhs: f64,
        rhs: f64,
    },
}

impl Witness {
    /// Recomputes the law on the stored inputs and reports whether it is
    /// still violated at `tolerance`. Stored lhs/rhs values are ignored;
    /// only the inputs are trusted.
    pub fn violates(
        &self,
        s: SemanticsId,
        prm: &SemanticsParams,
        tolerance: f64,
        stl_literal: bool,
    ) -> bool {
        match self {
            Witness::Idempotent { value, arity, .. } => {
                let got = conj(s, prm, &vec![*value; *arity], stl_literal);
                (got - value).abs() > tolerance
            }
            Witness::Commutative {
                values,
                permutation,
                ..
            } => {
                let (lhs, rhs) = commutative_sides(s, prm, values, permutation, stl_literal);
                (lhs - rhs).abs() > tolerance
            }
            Witness::ShadowLifting { values, index, .. } => {
                let partials = conj_partials(s, prm, values, stl_literal);
                // the audited law demands strict growth beyond tolerance
                partials[*index] <= tolerance
            }
            Witness::MinMaxBounded { values, .. } => {
                let result = conj(s, prm, values, stl_literal);
                min_max_excess(values, result) > tolerance
            }
            Witness::ScaleInvariant { values, alpha, .. } => {
                let (lhs, rhs) = scale_sides(s, prm, values, *alpha, stl_literal);
                (lhs - rhs).abs() > tolerance
            }
            Witness::Associative { values, .. } => {
                let (lhs, rhs) = associative_sides(s, prm, *values, stl_literal);
                (lhs - rhs).abs() > tolerance
            }
        }
    }
}

pub(crate) fn commutative_sides(
    s: SemanticsId,
    prm: &SemanticsParams,
    values: &[f64],
    permutation: &[usize],
    lit: bool,
) -> (f64, f64) {
    let permuted: Vec<f64> = permutation.iter().map(|&i| values[i]).collect();
    (conj(s, prm, values, lit), conj(s, prm, &permuted, lit))
}

fn min_max_excess(values: &[f64], result: f64) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo - result).max(result - hi)
}

pub(crate) fn scale_sides(
    s: SemanticsId,
    prm: &SemanticsParams,
    values: &[f64],
    alpha: f64,
    lit: bool,
) -> (f64, f64) {
    let scaled: Vec<f64> = if s.is_fuzzy() {
        // keep rounding from pushing alpha * max(values) past 1
        values.iter().map(|v| (alpha * v).min(1.0)).collect()
    } else {
        values.iter().map(|v| alpha * v).collect()
    };
    (alpha * conj(s, prm, values, lit), conj(s, prm, &scaled, lit))
}

pub(crate) fn associative_sides(
    s: SemanticsId,
    prm: &SemanticsParams,
    [a, b, c]: [f64; 3],
    lit: bool,
) -> (f64, f64) {
    let lhs = conj(s, prm, &[conj(s, prm, &[a, b], lit), c], lit);
    let rhs = conj(s, prm, &[a, conj(s, prm, &[b, c], lit)], lit);
    (lhs, rhs)
}

/// Runs `trials` sampled checks of one law; first violation wins.
pub(crate) fn run(
    s: SemanticsId,
    p: PropertyId,
    cfg: &AuditConfig,
    rng: &mut impl Rng,
) -> PropertyVerdict {
    let tolerance = cfg.tolerance_for(p);
    let lit = cfg.stl_literal;
    let mut attempted = 0usize;
    let mut effective = 0usize;
    let mut witness = None;
    for trial in 0..cfg.trials {
        attempted = trial + 1;
        let m = ARITIES[trial % ARITIES.len()];
        match p {
            PropertyId::Idempotent => {
                let a = {
                    let (lo, hi) = sample_domain(s);
                    rng.gen_range(lo..=hi)
                };
                effective += 1;
                let got = conj(s, &cfg.params, &vec![a; m], lit);
                if (got - a).abs() > tolerance {
                    witness = Some(Witness::Idempotent { value: a, arity: m, got });
                }
            }
            PropertyId::Commutative => {
                let values = sample_tuple(rng, sample_domain(s), m);
                effective += 1;
                witness = commutative_trial(s, &cfg.params, &values, tolerance, lit, rng);
            }
            PropertyId::ShadowLifting => {
                let values = sample_tuple(rng, shadow_domain(s), m);
                if degenerate(&values) {
                    continue;
                }
                effective += 1;
                let partials = conj_partials(s, &cfg.params, &values, lit);
                if let Some((index, partial)) = partials
                    .iter()
                    .copied()
                    .enumerate()
                    .find(|&(_, d)| d <= tolerance)
                {
                    witness = Some(Witness::ShadowLifting { values, index, partial });
                }
            }
            PropertyId::MinMaxBounded => {
                let values = sample_tuple(rng, sample_domain(s), m);
                effective += 1;
                let result = conj(s, &cfg.params, &values, lit);
                if min_max_excess(&values, result) > tolerance {
                    witness = Some(Witness::MinMaxBounded { values, result });
                }
            }
            PropertyId::ScaleInvariant => {
                let values = sample_tuple(rng, sample_domain(s), m);
                let hi = if s.is_fuzzy() {
                    let max = values.iter().copied().fold(0.0_f64, f64::max);
                    if max > 0.0 {
                        4.0_f64.min(1.0 / max)
                    } else {
                        4.0
                    }
                } else {
                    4.0
                };
                let alpha = rng.gen_range(0.0..=hi);
                if alpha == 0.0 {
                    continue;
                }
                effective += 1;
                let (lhs, rhs) = scale_sides(s, &cfg.params, &values, alpha, lit);
                if (lhs - rhs).abs() > tolerance {
                    witness = Some(Witness::ScaleInvariant { values, alpha, lhs, rhs });
                }
            }
            PropertyId::Associative => {
                let (lo, hi) = sample_domain(s);
                let triple = [
                    rng.gen_range(lo..=hi),
                    rng.gen_range(lo..=hi),
                    rng.gen_range(lo..=hi),
                ];
                effective += 1;
                let (lhs, rhs) = associative_sides(s, &cfg.params, triple, lit);
                if (lhs - rhs).abs() > tolerance {
                    witness = Some(Witness::Associative { values: triple, lhs, rhs });
                }
            }
            PropertyId::WeakSmoothProbe => unreachable!("probe runs separately"),
        }
        if witness.is_some() {
            break;
        }
    }
    PropertyVerdict {
        semantics: s,
        property: p,
        verdict: if witness.is_some() {
            Verdict::Counterexample
        } else {
            Verdict::HoldsOnTrials
        },
        // attempted, not configured: a first-trial counterexample ends the
        // search after one sample
        trials: attempted,
        effective_samples: effective,
        tolerance,
        witness,
    }
}

/// Compares against every permutation for width <= 3, and against 20
/// random permutations for width 5.
fn commutative_trial(
    s: SemanticsId,
    prm: &SemanticsParams,
    values: &[f64],
    tolerance: f64,
    lit: bool,
    rng: &mut impl Rng,
) -> Option<Witness> {
    let m = values.len();
    let base = conj(s, prm, values, lit);
    let try_perm = |perm: Vec<usize>| -> Option<Witness> {
        let permuted: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
        let rhs = conj(s, prm, &permuted, lit);
        if (base - rhs).abs() > tolerance {
            Some(Witness::Commutative {
                values: values.to_vec(),
                permutation: perm,
                lhs: base,
                rhs,
            })
        } else {
            None
        }
    };
    if m <= 3 {
        for perm in (0..m).permutations(m) {
            if let Some(w) = try_perm(perm) {
                return Some(w);
            }
        }
    } else {
        let mut perm: Vec<usize> = (0..m).collect();
        for _ in 0..20 {
            perm.shuffle(rng);
            if let Some(w) = try_perm(perm.clone()) {
                return Some(w);
            }
        }
    }
    None
}

fn degenerate(values: &[f64]) -> bool {
    if values.iter().any(|v| v.abs() <= DEGENERATE) {
        return true;
    }
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            if (a - b).abs() <= DEGENERATE {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: SemanticsParams = SemanticsParams {
        xi: 1.0,
        p: 2.0,
        nu: 1.0,
    };

    #[test]
    fn associative_sides_nest_left_and_right() {
        let (lhs, rhs) = associative_sides(SemanticsId::Dl2, &P, [1.0, 2.0, 3.0], false);
        assert_eq!(lhs, 6.0);
        assert_eq!(rhs, 6.0);
        let (lhs, rhs) = associative_sides(SemanticsId::Stl, &P, [2.0, 4.0, 6.0], false);
        assert!((lhs - rhs).abs() > 1e-3, "nested smooth minima differ: {lhs} vs {rhs}");
    }

    #[test]
    fn scale_sides_cap_fuzzy_values_at_one() {
        // alpha at the cap: products may round a hair above 1 without the clamp
        let values = [0.7, 0.2];
        let (lhs, rhs) = scale_sides(SemanticsId::Goedel, &P, &values, 1.0 / 0.7, false);
        assert!(rhs <= 1.0);
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn hand_counterexamples_replay() {
        // additive conjunction duplicates instead of idempotents
        let w = Witness::Idempotent {
            value: 1.0,
            arity: 2,
            got: 2.0,
        };
        assert!(w.violates(SemanticsId::Dl2, &P, 1e-9, false));
        // minimum ignores the non-minimal argument
        let w = Witness::ShadowLifting {
            values: vec![0.3, 0.8],
            index: 1,
            partial: 0.0,
        };
        assert!(w.violates(SemanticsId::Goedel, &P, 1e-6, false));
        // 0.5 * max(0.7 + 0.7 - 1, 0) = 0.2 vs max(0.35 + 0.35 - 1, 0) = 0
        let w = Witness::ScaleInvariant {
            values: vec![0.7, 0.7],
            alpha: 0.5,
            lhs: 0.2,
            rhs: 0.0,
        };
        assert!(w.violates(SemanticsId::Lukasiewicz, &P, 1e-9, false));
        // product sits below its smaller factor
        let w = Witness::MinMaxBounded {
            values: vec![0.5, 0.4],
            result: 0.2,
        };
        assert!(w.violates(SemanticsId::Product, &P, 1e-9, false));
    }

    #[test]
    fn satisfied_laws_do_not_replay_as_violations() {
        let w = Witness::Idempotent {
            value: 0.4,
            arity: 3,
            got: 0.4,
        };
        assert!(!w.violates(SemanticsId::Goedel, &P, 1e-9, false));
        let w = Witness::MinMaxBounded {
            values: vec![2.0, 4.0],
            result: 2.54,
        };
        assert!(!w.violates(SemanticsId::Stl, &P, 1e-9, false));
    }

    #[test]
    fn degenerate_draws_are_detected() {
        assert!(degenerate(&[0.5, 0.5]));
        assert!(degenerate(&[0.0, 0.5]));
        assert!(degenerate(&[0.3, 0.3 + 1e-10]));
        assert!(!degenerate(&[0.3, 0.8]));
    }
}
