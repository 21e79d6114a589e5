//! Conjunction and negation operators for each loss family.
//!
//! Fuzzy t-norms expect inputs in `[0, 1]`, the additive conjunction
//! expects nonnegative penalties, and the smooth robustness conjunction
//! takes any reals. N-ary fuzzy conjunction is the left fold of the
//! binary t-norm; the additive and robustness conjunctions are natively
//! n-ary.

use serde::Serialize;

use crate::autodiff::Scalar;

use super::{SemanticsId, SemanticsParams};

/// Largest exponent fed to `exp` inside the smooth conjunction; anything
/// beyond is clamped (and flagged in the trace) instead of overflowing.
pub const EXP_CLAMP: f64 = 700.0;

/// Minimum magnitudes below this snap the smooth conjunction to its zero
/// branch, avoiding division by a vanishing normalizer.
pub const STL_ZERO_SNAP: f64 = 1e-12;

/// Minimum of the two truth values.
pub fn goedel_and(a: f64, b: f64) -> f64 {
    Scalar::min(a, b)
}

/// `max(a + b - 1, 0)`.
pub fn lukasiewicz_and(a: f64, b: f64) -> f64 {
    Scalar::max(a + b - 1.0, 0.0)
}

/// `max(1 - ((1-a)^p + (1-b)^p)^(1/p), 0)` for `p >= 1`.
pub fn yager_and(a: f64, b: f64, p: f64) -> f64 {
    fuzzy_tnorm(SemanticsId::Yager, a, b, p)
}

/// `a * b`.
pub fn product_and(a: f64, b: f64) -> f64 {
    a * b
}

/// Standard fuzzy negation `1 - a`, shared by all four fuzzy families.
pub fn fuzzy_not(a: f64) -> f64 {
    1.0 - a
}

/// Penalties add: zero stays zero, violations accumulate.
pub fn dl2_and(a: f64, b: f64) -> f64 {
    a + b
}

/// Robustness negation is a sign flip.
pub fn stl_not(v: f64) -> f64 {
    -v
}

pub(crate) fn fuzzy_tnorm<T: Scalar>(s: SemanticsId, a: T, b: T, p: f64) -> T {
    let one = T::from_f64(1.0);
    let zero = T::from_f64(0.0);
    match s {
        SemanticsId::Goedel => a.min(b),
        SemanticsId::Lukasiewicz => (a + b - one).max(zero),
        SemanticsId::Yager => {
            let sum = (one - a).powf(p) + (one - b).powf(p);
            // p-norm kink at the all-true corner: take derivative 0 there
            // instead of letting 0^(1/p - 1) poison the dual part
            let norm = if sum.value() == 0.0 {
                zero
            } else {
                sum.powf(1.0 / p)
            };
            (one - norm).max(zero)
        }
        SemanticsId::Product => a * b,
        SemanticsId::Dl2 | SemanticsId::Stl => {
            unreachable!("{s} conjunction is not a binary t-norm")
        }
    }
}

/// Which case of the smooth conjunction was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StlBranch {
    /// Some conjunct is below zero; the weighted sum emphasizes it.
    Negative,
    /// All conjuncts are above zero.
    Positive,
    /// The minimum is (within [`STL_ZERO_SNAP`] of) zero.
    Zero,
}

/// Evaluation record of one smooth-conjunction application.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StlEvalTrace {
    pub conjunct_values: Vec<f64>,
    pub a_min: f64,
    /// Normalized deviations `(v_i - min) / min`; zeros on the zero branch.
    pub a_tilde: Vec<f64>,
    pub branch: StlBranch,
    /// True if any exponent hit the [`EXP_CLAMP`] guard.
    pub clamped: bool,
}

impl StlEvalTrace {
    fn empty() -> Self {
        StlEvalTrace {
            conjunct_values: Vec::new(),
            a_min: 0.0,
            a_tilde: Vec::new(),
            branch: StlBranch::Zero,
            clamped: false,
        }
    }
}

/// Smooth minimum of robustness values: a weighted average that leans on
/// the worst conjunct, with sharpness `nu > 0`.
///
/// With `m = min(values)` and deviations `t_i = (v_i - m)/m`:
/// * `m < 0`: `sum(m * e^{t_i} * e^{nu t_i}) / sum(e^{nu t_i})`
/// * `m > 0`: `sum(v_i * e^{-nu t_i}) / sum(e^{-nu t_i})`
/// * `|m|` below [`STL_ZERO_SNAP`]: exactly 0
///
/// Idempotent and bounded between the smallest and largest conjunct, but
/// deliberately not associative: `andM` over M values is one application,
/// nested binary `and`s are nested applications.
pub fn stl_and(values: &[f64], nu: f64) -> f64 {
    stl_conj(values, nu, false, None)
}

/// Variant whose positive branch averages the minimum itself instead of
/// each conjunct, which collapses it to exactly `min(values)` there; kept
/// for comparison runs. Selected by the `--stl-literal` CLI flag.
pub fn stl_and_literal(values: &[f64], nu: f64) -> f64 {
    stl_conj(values, nu, true, None)
}

/// [`stl_and`] plus the branch/deviation record of the application.
pub fn stl_and_trace(values: &[f64], nu: f64) -> (f64, StlEvalTrace) {
    let mut trace = StlEvalTrace::empty();
    let value = stl_conj(values, nu, false, Some(&mut trace));
    (value, trace)
}

pub(crate) fn stl_conj<T: Scalar>(
    values: &[T],
    nu: f64,
    literal: bool,
    mut trace: Option<&mut StlEvalTrace>,
) -> T {
    assert!(!values.is_empty(), "smooth conjunction of nothing");
    let mut min_idx = 0;
    for (i, v) in values.iter().enumerate() {
        if v.value() < values[min_idx].value() {
            min_idx = i;
        }
    }
    let m = values[min_idx];
    if let Some(tr) = trace.as_deref_mut() {
        tr.conjunct_values = values.iter().map(|v| v.value()).collect();
        tr.a_min = m.value();
        tr.a_tilde = vec![0.0; values.len()];
        tr.branch = StlBranch::Zero;
        tr.clamped = false;
    }
    if m.value().abs() < STL_ZERO_SNAP {
        return T::from_f64(0.0);
    }
    let negative = m.value() < 0.0;
    if let Some(tr) = trace.as_deref_mut() {
        tr.branch = if negative {
            StlBranch::Negative
        } else {
            StlBranch::Positive
        };
    }
    let nu_c = T::from_f64(nu);
    let one = T::from_f64(1.0);
    let mut clamped = false;
    let mut num = T::from_f64(0.0);
    let mut den = T::from_f64(0.0);
    for (i, v) in values.iter().enumerate() {
        let tilde = (*v - m) / m;
        if let Some(tr) = trace.as_deref_mut() {
            tr.a_tilde[i] = tilde.value();
        }
        if negative {
            let num_exp = clamp_exp((one + nu_c) * tilde, &mut clamped);
            let den_exp = clamp_exp(nu_c * tilde, &mut clamped);
            num = num + m * num_exp.exp();
            den = den + den_exp.exp();
        } else {
            let w = clamp_exp(-(nu_c * tilde), &mut clamped).exp();
            let lead = if literal { m } else { *v };
            num = num + lead * w;
            den = den + w;
        }
    }
    if let Some(tr) = trace {
        tr.clamped = clamped;
    }
    num / den
}

fn clamp_exp<T: Scalar>(x: T, clamped: &mut bool) -> T {
    if x.value() > EXP_CLAMP {
        *clamped = true;
        T::from_f64(EXP_CLAMP)
    } else if x.value() < -EXP_CLAMP {
        *clamped = true;
        T::from_f64(-EXP_CLAMP)
    } else {
        x
    }
}

/// N-ary conjunction under any family: penalties sum, fuzzy t-norms fold
/// left over the values, robustness takes one smooth-minimum application.
pub fn conj_value(s: SemanticsId, params: &SemanticsParams, values: &[f64]) -> f64 {
    conj_value_with(s, params, values, false)
}

/// [`conj_value`] with the alternate positive branch of the smooth
/// conjunction (no effect on the other five families).
pub fn conj_value_with(
    s: SemanticsId,
    params: &SemanticsParams,
    values: &[f64],
    stl_literal: bool,
) -> f64 {
    conj_n(s, params, values, stl_literal)
}

pub(crate) fn conj_n<T: Scalar>(
    s: SemanticsId,
    params: &SemanticsParams,
    values: &[T],
    stl_literal: bool,
) -> T {
    assert!(values.len() >= 2, "conjunction needs at least 2 values");
    match s {
        SemanticsId::Dl2 => {
            let mut acc = values[0];
            for v in &values[1..] {
                acc = acc + *v;
            }
            acc
        }
        SemanticsId::Goedel | SemanticsId::Lukasiewicz | SemanticsId::Yager
        | SemanticsId::Product => {
            let mut acc = values[0];
            for v in &values[1..] {
                acc = fuzzy_tnorm(s, acc, *v, params.p);
            }
            acc
        }
        SemanticsId::Stl => stl_conj(values, params.nu, stl_literal, None),
    }
}

/// Partial derivatives of the n-ary conjunction with respect to each
/// conjunct, computed with dual numbers (one seeded pass per position).
pub fn conj_partials(
    s: SemanticsId,
    params: &SemanticsParams,
    values: &[f64],
    stl_literal: bool,
) -> Vec<f64> {
    use crate::autodiff::Dual;
    (0..values.len())
        .map(|seat| {
            let duals: Vec<Dual> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if i == seat {
                        Dual::seed(v)
                    } else {
                        Dual::constant(v)
                    }
                })
                .collect();
            conj_n(s, params, &duals, stl_literal).deriv
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Dual;

    const NEAR: f64 = 1e-12;

    #[test]
    fn t_norm_values() {
        assert_eq!(goedel_and(0.3, 0.8), 0.3);
        assert!((lukasiewicz_and(0.7, 0.7) - 0.4).abs() < NEAR);
        assert_eq!(lukasiewicz_and(0.2, 0.3), 0.0);
        assert!((yager_and(0.5, 0.5, 2.0) - (1.0 - 0.5_f64.sqrt())).abs() < NEAR);
        assert_eq!(yager_and(0.1, 0.1, 2.0), 0.0);
        assert!((product_and(0.5, 0.4) - 0.2).abs() < NEAR);
        assert_eq!(fuzzy_not(0.3), 0.7);
        assert_eq!(dl2_and(1.5, 0.0), 1.5);
        assert_eq!(stl_not(-2.0), 2.0);
    }

    #[test]
    fn boolean_corners_are_exact() {
        for and in [
            goedel_and as fn(f64, f64) -> f64,
            lukasiewicz_and,
            product_and,
            |a, b| yager_and(a, b, 2.0),
        ] {
            assert_eq!(and(1.0, 1.0), 1.0);
            assert_eq!(and(1.0, 0.0), 0.0);
            assert_eq!(and(0.0, 1.0), 0.0);
            assert_eq!(and(0.0, 0.0), 0.0);
        }
    }

    #[test]
    fn smooth_conjunction_positive_branch() {
        // ((2*1 + 4*e^-1) / (1 + e^-1)
        let e1 = (-1.0f64).exp();
        let expect = (2.0 + 4.0 * e1) / (1.0 + e1);
        assert!((stl_and(&[2.0, 4.0], 1.0) - expect).abs() < NEAR);
        assert!((expect - 2.5378828427399903).abs() < 1e-12);
    }

    #[test]
    fn smooth_conjunction_is_idempotent() {
        for v in [-7.5, -1.0, -1e-3, 1e-3, 0.25, 3.7, 9.9] {
            for m in [2, 3, 5] {
                let vs = vec![v; m];
                assert!(
                    (stl_and(&vs, 1.0) - v).abs() < NEAR,
                    "value {v} arity {m}"
                );
            }
        }
    }

    #[test]
    fn smooth_conjunction_zero_branch_snaps() {
        assert_eq!(stl_and(&[0.0, 5.0], 1.0), 0.0);
        assert_eq!(stl_and(&[5e-13, 5.0], 1.0), 0.0);
        assert_eq!(stl_and(&[-5e-13, 5.0], 1.0), 0.0);
    }

    #[test]
    fn smooth_conjunction_sign_follows_the_minimum() {
        assert!(stl_and(&[-1.0, 10.0], 1.0) < 0.0);
        assert!(stl_and(&[0.5, 10.0], 1.0) > 0.0);
    }

    #[test]
    fn literal_positive_branch_collapses_to_the_minimum() {
        assert_eq!(stl_and_literal(&[2.0, 4.0], 1.0), 2.0);
        assert_eq!(stl_and_literal(&[1.0, 3.0, 9.0], 2.0), 1.0);
        // negative branch is unchanged
        assert_eq!(
            stl_and_literal(&[-1.0, 4.0], 1.0),
            stl_and(&[-1.0, 4.0], 1.0)
        );
    }

    #[test]
    fn trace_records_branch_and_deviations() {
        let (v, tr) = stl_and_trace(&[2.0, 4.0], 1.0);
        assert_eq!(tr.branch, StlBranch::Positive);
        assert_eq!(tr.a_min, 2.0);
        assert_eq!(tr.a_tilde, vec![0.0, 1.0]);
        assert!(!tr.clamped);
        assert_eq!(tr.conjunct_values, vec![2.0, 4.0]);
        assert!((v - stl_and(&[2.0, 4.0], 1.0)).abs() == 0.0);

        let (_, tr) = stl_and_trace(&[-2.0, 4.0], 1.0);
        assert_eq!(tr.branch, StlBranch::Negative);
        assert_eq!(tr.a_tilde, vec![0.0, -3.0]);

        let (_, tr) = stl_and_trace(&[0.0, 4.0], 1.0);
        assert_eq!(tr.branch, StlBranch::Zero);
    }

    #[test]
    fn extreme_spreads_clamp_instead_of_overflowing() {
        let (v, tr) = stl_and_trace(&[-1e-3, 10.0], 1.0);
        assert!(v.is_finite());
        assert!(tr.clamped);
    }

    #[test]
    fn n_ary_fold_matches_manual_nesting() {
        let p = SemanticsParams::default();
        let vals = [0.9, 0.8, 0.7];
        assert_eq!(
            conj_value(SemanticsId::Lukasiewicz, &p, &vals),
            lukasiewicz_and(lukasiewicz_and(0.9, 0.8), 0.7)
        );
        assert_eq!(
            conj_value(SemanticsId::Dl2, &p, &[1.0, 2.0, 3.0]),
            6.0
        );
    }

    #[test]
    fn product_partials_are_the_complementary_products() {
        let p = SemanticsParams::default();
        let parts = conj_partials(SemanticsId::Product, &p, &[0.5, 0.4], false);
        assert!((parts[0] - 0.4).abs() < NEAR);
        assert!((parts[1] - 0.5).abs() < NEAR);
    }

    #[test]
    fn goedel_partial_is_zero_off_the_minimum() {
        let p = SemanticsParams::default();
        let parts = conj_partials(SemanticsId::Goedel, &p, &[0.3, 0.8], false);
        assert_eq!(parts, vec![1.0, 0.0]);
    }

    #[test]
    fn yager_all_true_corner_has_finite_derivative() {
        let out = fuzzy_tnorm(
            SemanticsId::Yager,
            Dual::seed(1.0),
            Dual::constant(1.0),
            2.0,
        );
        assert_eq!(out.value, 1.0);
        assert!(out.deriv.is_finite());
    }
}
