//! Acceptance gate: one test per release criterion, each printing a single
//! PASS/FAIL line before asserting. Run with `--nocapture` to see the lines
//! for passing criteria too.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use dlc_core::auditor::{run_audit, AuditConfig, PropertyId, Verdict};
use dlc_core::autodiff::{finite_diff_grad, grad};
use dlc_core::sample::{random_env, random_formula, FormulaProfile};
use dlc_core::semantics::connective::{
    goedel_and, lukasiewicz_and, product_and, stl_and, yager_and,
};
use dlc_core::semantics::{
    atom_oracle_eval, compile, eval_loss, AtomOracle, SemanticsId, SemanticsParams,
};
use dlc_core::trainer::TrainReport;
use dlc_core::Formula;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn verdict(n: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {n} {} — {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {n} failed — {name}: {detail}");
}

#[test]
fn acceptance_1_expected_table_reproduction() {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let out = dlc(&["audit", "--out-dir", dir.path().to_str().unwrap()]);
    let elapsed = started.elapsed();

    let report = run_audit(&AuditConfig::default());
    let matched = report.cells.iter().filter(|c| c.matches_expected).count();
    let witnesses_replay = report.cells.iter().all(|cell| match cell.check.verdict {
        Verdict::HoldsOnTrials => true,
        Verdict::Counterexample => cell.check.witness.as_ref().is_some_and(|w| {
            w.violates(
                cell.check.semantics,
                &report.config.params,
                cell.check.tolerance,
                report.config.stl_literal,
            )
        }),
    });
    let in_time = elapsed < Duration::from_secs(30);
    let full_match = matched == 36 && out.status.code() == Some(0);
    let pass = full_match && witnesses_replay && in_time;
    verdict(
        1,
        "audit defaults reproduce the expected 6x6 table",
        pass,
        &format!(
            "{matched}/36 cells match (exit {:?}); counterexample witnesses replay: \
             {witnesses_replay}; runtime {elapsed:.2?} (< 30s: {in_time})",
            out.status.code()
        ),
    );
}

#[test]
fn acceptance_2_soundness_suites() {
    let params = SemanticsParams::default();
    let mut failures: Vec<String> = Vec::new();

    // Additive penalties: loss is 0 exactly when the formula is true.
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    let penalty_profile = FormulaProfile::penalty_fragment();
    for _ in 0..1000 {
        let f = random_formula(&mut rng, &penalty_profile);
        let env = random_env(&mut rng, &f, -3.0, 3.0);
        let loss = compile(&f, SemanticsId::Dl2, params, AtomOracle::Crisp).unwrap();
        let v = eval_loss(&loss, &env).unwrap();
        if f.truth(&env).unwrap() != (v == 0.0) {
            failures.push(format!("dl2 `{f}` value {v}"));
        }
    }

    // Truth-valued families with crisp atoms: loss is 1 exactly when true.
    let full = FormulaProfile::full();
    for s in [
        SemanticsId::Goedel,
        SemanticsId::Lukasiewicz,
        SemanticsId::Yager,
        SemanticsId::Product,
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(9002 + s as u64);
        for _ in 0..1000 {
            let f = random_formula(&mut rng, &full);
            let env = random_env(&mut rng, &f, -3.0, 3.0);
            let loss = compile(&f, s, params, AtomOracle::Crisp).unwrap();
            let v = eval_loss(&loss, &env).unwrap();
            if !(v == 0.0 || v == 1.0) || f.truth(&env).unwrap() != (v == 1.0) {
                failures.push(format!("{s} `{f}` value {v}"));
            }
        }
    }

    // Robustness: sign equals truth whenever no atom is on its boundary.
    let mut rng = ChaCha8Rng::seed_from_u64(9007);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 1000 && attempts < 200_000 {
        attempts += 1;
        let f = random_formula(&mut rng, &full);
        let env = random_env(&mut rng, &f, -3.0, 3.0);
        let on_boundary = f.atoms().into_iter().any(|a| {
            atom_oracle_eval(a, &env, &AtomOracle::Robustness).unwrap().abs() <= 1e-9
        });
        if on_boundary {
            continue;
        }
        let loss = compile(&f, SemanticsId::Stl, params, AtomOracle::Robustness).unwrap();
        let v = eval_loss(&loss, &env).unwrap();
        if f.truth(&env).unwrap() != (v > 0.0) {
            failures.push(format!("stl `{f}` value {v}"));
        }
        accepted += 1;
    }
    if accepted < 1000 {
        failures.push(format!("stl sampling stalled at {accepted} envs"));
    }

    let pass = failures.is_empty();
    verdict(
        2,
        "soundness on 1000+ random formulas per family",
        pass,
        &if pass {
            "zero disagreements between boolean truth and loss membership".to_owned()
        } else {
            format!("{} disagreements, first: {}", failures.len(), failures[0])
        },
    );
}

#[test]
fn acceptance_3_gradient_correctness() {
    let params = SemanticsParams::default();
    let mut failures: Vec<String> = Vec::new();
    let mut total = 0usize;
    for (si, s) in SemanticsId::ALL.into_iter().enumerate() {
        let oracle = match s {
            SemanticsId::Dl2 => AtomOracle::Crisp,
            SemanticsId::Stl => AtomOracle::Robustness,
            _ => AtomOracle::Graded { scale: 1.0 },
        };
        let profile = if s == SemanticsId::Dl2 {
            FormulaProfile::penalty_fragment()
        } else {
            FormulaProfile::full()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9100 + si as u64);
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < 1000 && attempts < 300_000 {
            attempts += 1;
            let f = random_formula(&mut rng, &profile);
            let Ok(loss) = compile(&f, s, params, oracle) else {
                continue;
            };
            let env = random_env(&mut rng, &f, -3.0, 3.0);
            // Keep a wide margin to every breakpoint so the finite-difference
            // stencil stays on one smooth branch.
            if loss.kink_gap(&env).unwrap() <= 0.05 {
                continue;
            }
            let (_, exact) = grad(&loss, &env).unwrap();
            let fd = finite_diff_grad(&loss, &env, 1e-5).unwrap();
            for (name, g) in exact.iter() {
                let fdv = fd.get(name).unwrap();
                if (g - fdv).abs() > 1e-6 * g.abs().max(1.0) {
                    failures.push(format!("{s} `{f}` d/d{name}: exact {g}, fd {fdv}"));
                }
            }
            accepted += 1;
            total += 1;
        }
        if accepted < 1000 {
            failures.push(format!("{s}: sampling stalled at {accepted} points"));
        }
    }
    let pass = failures.is_empty();
    verdict(
        3,
        "dual-number gradients within 1e-6 of central differences",
        pass,
        &if pass {
            format!("{total} kink-free points, zero failures")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    );
}

#[test]
fn acceptance_4_connective_spot_values() {
    let mut checks: Vec<(String, bool)> = vec![
        (
            "goedel(0.3, 0.8) = 0.3".into(),
            (goedel_and(0.3, 0.8) - 0.3).abs() <= 1e-12,
        ),
        (
            "lukasiewicz(0.7, 0.7) = 0.4".into(),
            (lukasiewicz_and(0.7, 0.7) - 0.4).abs() <= 1e-12,
        ),
        (
            "yager(0.5, 0.5, 2) = 1 - sqrt(0.5)".into(),
            (yager_and(0.5, 0.5, 2.0) - (1.0 - 0.5f64.sqrt())).abs() <= 1e-12,
        ),
        (
            "product(0.5, 0.4) = 0.2".into(),
            (product_and(0.5, 0.4) - 0.2).abs() <= 1e-12,
        ),
        ("stl([2, 4], 1) within [2, 4]".into(), {
            let v = stl_and(&[2.0, 4.0], 1.0);
            (2.0..=4.0).contains(&v)
        }),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9200);
    let mut idempotent = true;
    for _ in 0..100 {
        let a = rng.gen_range(-5.0..5.0);
        let nu = rng.gen_range(0.5..3.0);
        if (stl_and(&[a, a], nu) - a).abs() > 1e-12 {
            idempotent = false;
        }
    }
    checks.push(("stl([a, a], nu) = a over 100 samples".into(), idempotent));

    let pass = checks.iter().all(|(_, ok)| *ok);
    let detail = if pass {
        format!("{} spot values verified", checks.len())
    } else {
        let failed: Vec<&str> = checks
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| name.as_str())
            .collect();
        format!("failed: {}", failed.join("; "))
    };
    verdict(4, "hand-computed connective values", pass, &detail);
}

fn read_report(dir: &Path) -> TrainReport {
    let text = std::fs::read_to_string(dir.join("train.json")).expect("train.json written");
    serde_json::from_str(&text).expect("report deserializes")
}

#[test]
fn acceptance_5_training_demonstration() {
    let base_dir = tempfile::tempdir().unwrap();
    let aug_dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    // Defaults already pin seed 0, constraint "y1 <= 0.9", the additive
    // semantics, and alpha 0.5; the pair differs only in beta.
    let base = dlc(&["train", "--beta", "0", "--out-dir", base_dir.path().to_str().unwrap()]);
    let aug = dlc(&["train", "--beta", "0.5", "--out-dir", aug_dir.path().to_str().unwrap()]);
    let elapsed = started.elapsed();
    let ok_exit = base.status.code() == Some(0) && aug.status.code() == Some(0);

    let base_final = read_report(base_dir.path()).final_metrics.expect("base finished");
    let aug_final = read_report(aug_dir.path()).final_metrics.expect("aug finished");
    let satisfaction_up = aug_final.satisfaction_rate >= base_final.satisfaction_rate;
    let constraint_down = aug_final.constraint_loss <= base_final.constraint_loss;
    let in_time = elapsed < Duration::from_secs(60);
    let pass = ok_exit && satisfaction_up && constraint_down && in_time;
    verdict(
        5,
        "constraint-augmented run beats the baseline",
        pass,
        &format!(
            "satisfaction {} >= {}: {satisfaction_up}; constraint loss {} <= {}: \
             {constraint_down}; paired runtime {elapsed:.2?} (< 60s: {in_time})",
            aug_final.satisfaction_rate,
            base_final.satisfaction_rate,
            aug_final.constraint_loss,
            base_final.constraint_loss
        ),
    );
}

#[test]
fn acceptance_6_negation_laws() {
    let params = SemanticsParams::default();
    let full = FormulaProfile::full();
    let mut failures: Vec<String> = Vec::new();

    for s in [
        SemanticsId::Goedel,
        SemanticsId::Lukasiewicz,
        SemanticsId::Yager,
        SemanticsId::Product,
    ] {
        let oracle = AtomOracle::Graded { scale: 1.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(9300 + s as u64);
        for _ in 0..1000 {
            let f = random_formula(&mut rng, &full);
            let env = random_env(&mut rng, &f, -3.0, 3.0);
            let plain = eval_loss(&compile(&f, s, params, oracle).unwrap(), &env).unwrap();
            let doubled = Formula::not(Formula::not(f.clone()));
            let doubled = eval_loss(&compile(&doubled, s, params, oracle).unwrap(), &env).unwrap();
            if (plain - doubled).abs() > 1e-15 {
                failures.push(format!("{s} `{f}`: {plain} vs {doubled}"));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9350);
    for _ in 0..1000 {
        let f = random_formula(&mut rng, &full);
        let env = random_env(&mut rng, &f, -3.0, 3.0);
        let plain = eval_loss(
            &compile(&f, SemanticsId::Stl, params, AtomOracle::Robustness).unwrap(),
            &env,
        )
        .unwrap();
        let negated = eval_loss(
            &compile(
                &Formula::not(f.clone()),
                SemanticsId::Stl,
                params,
                AtomOracle::Robustness,
            )
            .unwrap(),
            &env,
        )
        .unwrap();
        if negated != -plain {
            failures.push(format!("stl `{f}`: {negated} != -{plain}"));
        }
    }

    let pass = failures.is_empty();
    verdict(
        6,
        "double negation identity and exact robustness mirror",
        pass,
        &if pass {
            "5000 formula/environment pairs, zero violations".to_owned()
        } else {
            format!("{} violations, first: {}", failures.len(), failures[0])
        },
    );
}

#[test]
fn acceptance_7_literal_robustness_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dlc(&["audit", "--stl-literal", "--out-dir", dir.path().to_str().unwrap()]);
    let exit_is_mismatch = out.status.code() == Some(1);

    let report = run_audit(&AuditConfig {
        stl_literal: true,
        ..AuditConfig::default()
    });
    let cell = report
        .cells
        .iter()
        .find(|c| {
            c.check.semantics == SemanticsId::Stl && c.check.property == PropertyId::ShadowLifting
        })
        .expect("cell present");
    let shadow_lifting_fails =
        matches!(cell.check.verdict, Verdict::Counterexample) && !cell.matches_expected;
    let pass = exit_is_mismatch && shadow_lifting_fails;
    verdict(
        7,
        "literal averaging fails the shadow-lifting audit",
        pass,
        &format!(
            "exit code {:?} (want 1); shadow-lifting counterexample found: {shadow_lifting_fails}",
            out.status.code()
        ),
    );
}
