//! Agreement between boolean truth and compiled loss values on large batches
//! of random formulas:
//!
//! - additive penalties are exactly zero precisely on true formulas;
//! - truth-valued semantics with the crisp oracle land exactly on 1 precisely
//!   on true formulas (and never leave {0, 1});
//! - robustness is strictly positive precisely on true formulas once every
//!   atom sits strictly off its boundary;
//! - negation laws: double negation is the identity for truth values, and
//!   robustness negation is an exact sign flip.

use dlc_core::sample::{random_env, random_formula, FormulaProfile};
use dlc_core::semantics::{
    atom_oracle_eval, compile, eval_loss, AtomOracle, SemanticsId, SemanticsParams,
};
use dlc_core::{Env, Formula};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every suite draws at least this many formula/environment pairs.
const PAIRS: usize = 1200;

/// Environment values are drawn from this range, matching the constant range
/// formulas are built from so boundary coincidences actually occur.
const ENV_LO: f64 = -3.0;
const ENV_HI: f64 = 3.0;

fn sample_pairs(seed: u64, profile: &FormulaProfile, count: usize) -> Vec<(Formula, Env)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let formula = random_formula(&mut rng, profile);
            let env = random_env(&mut rng, &formula, ENV_LO, ENV_HI);
            (formula, env)
        })
        .collect()
}

#[test]
fn additive_penalty_is_zero_exactly_on_true_formulas() {
    let params = SemanticsParams::default();
    for (formula, env) in sample_pairs(101, &FormulaProfile::penalty_fragment(), PAIRS) {
        let loss = compile(&formula, SemanticsId::Dl2, params, AtomOracle::Crisp).unwrap();
        let value = eval_loss(&loss, &env).unwrap();
        let truth = formula.truth(&env).unwrap();
        assert!(value >= 0.0, "penalties are non-negative: {formula} -> {value}");
        assert_eq!(
            truth,
            value == 0.0,
            "truth/loss disagreement for `{formula}`: truth {truth}, loss {value}"
        );
    }
}

#[test]
fn crisp_fuzzy_loss_is_one_exactly_on_true_formulas() {
    let params = SemanticsParams::default();
    let fuzzy = [
        SemanticsId::Goedel,
        SemanticsId::Lukasiewicz,
        SemanticsId::Yager,
        SemanticsId::Product,
    ];
    for (i, s) in fuzzy.into_iter().enumerate() {
        for (formula, env) in sample_pairs(200 + i as u64, &FormulaProfile::full(), PAIRS) {
            let loss = compile(&formula, s, params, AtomOracle::Crisp).unwrap();
            let value = eval_loss(&loss, &env).unwrap();
            let truth = formula.truth(&env).unwrap();
            assert!(
                value == 0.0 || value == 1.0,
                "{s}: crisp atoms must stay boolean, got {value} for `{formula}`"
            );
            assert_eq!(
                truth,
                value == 1.0,
                "{s}: truth/loss disagreement for `{formula}`: truth {truth}, value {value}"
            );
        }
    }
}

#[test]
fn robustness_sign_matches_truth_away_from_atom_boundaries() {
    let params = SemanticsParams::default();
    let profile = FormulaProfile::full();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < PAIRS {
        attempts += 1;
        assert!(attempts < 200_000, "sampling stalled at {accepted} accepted pairs");
        let formula = random_formula(&mut rng, &profile);
        let env = random_env(&mut rng, &formula, ENV_LO, ENV_HI);
        // Only environments where every atom is strictly off its boundary:
        // an atom robustness of exactly zero carries no sign information.
        let boundary_atom = formula.atoms().into_iter().any(|atom| {
            atom_oracle_eval(atom, &env, &AtomOracle::Robustness)
                .unwrap()
                .abs()
                <= 1e-9
        });
        if boundary_atom {
            continue;
        }
        let loss = compile(&formula, SemanticsId::Stl, params, AtomOracle::Robustness).unwrap();
        let value = eval_loss(&loss, &env).unwrap();
        let truth = formula.truth(&env).unwrap();
        assert_ne!(value, 0.0, "off-boundary robustness cannot vanish: `{formula}`");
        assert_eq!(
            truth,
            value > 0.0,
            "sign/truth disagreement for `{formula}`: truth {truth}, robustness {value}"
        );
        accepted += 1;
    }
}

#[test]
fn negation_normal_form_preserves_boolean_truth() {
    for (formula, env) in sample_pairs(404, &FormulaProfile::full(), PAIRS) {
        let nnf = formula.to_nnf();
        assert_eq!(
            formula.truth(&env).unwrap(),
            nnf.truth(&env).unwrap(),
            "normal form changed the truth of `{formula}` (became `{nnf}`)"
        );
    }
}

#[test]
fn fuzzy_double_negation_is_the_identity_within_1e15() {
    let params = SemanticsParams::default();
    let oracle = AtomOracle::Graded { scale: 1.0 };
    let fuzzy = [
        SemanticsId::Goedel,
        SemanticsId::Lukasiewicz,
        SemanticsId::Yager,
        SemanticsId::Product,
    ];
    for (i, s) in fuzzy.into_iter().enumerate() {
        for (formula, env) in sample_pairs(500 + i as u64, &FormulaProfile::full(), 1000) {
            let plain = compile(&formula, s, params, oracle).unwrap();
            let doubled = Formula::not(Formula::not(formula.clone()));
            let doubled = compile(&doubled, s, params, oracle).unwrap();
            let a = eval_loss(&plain, &env).unwrap();
            let b = eval_loss(&doubled, &env).unwrap();
            assert!(
                (a - b).abs() <= 1e-15,
                "{s}: double negation drifted on `{formula}`: {a} vs {b}"
            );
        }
    }
}

#[test]
fn robustness_negation_is_an_exact_mirror() {
    let params = SemanticsParams::default();
    for (formula, env) in sample_pairs(606, &FormulaProfile::full(), 1000) {
        let plain = compile(&formula, SemanticsId::Stl, params, AtomOracle::Robustness).unwrap();
        let negated = Formula::not(formula.clone());
        let negated = compile(&negated, SemanticsId::Stl, params, AtomOracle::Robustness).unwrap();
        let value = eval_loss(&plain, &env).unwrap();
        let mirrored = eval_loss(&negated, &env).unwrap();
        assert_eq!(
            mirrored, -value,
            "negation must be an exact sign flip for `{formula}`"
        );
    }
}
