//! Implementations of the four subcommands. Each returns the process exit
//! code on success; recoverable failures become [`Failure`] values carrying
//! the documented code.

use std::fs;
use std::path::Path;

use dlc_core::auditor::{run_audit, AuditConfig, AuditReport, PropertyId, Verdict};
use dlc_core::autodiff::{finite_diff_grad, grad as exact_grad};
use dlc_core::semantics::{compile, eval_loss, CompiledLoss, SemanticsId};
use dlc_core::trainer::{train as run_train, TrainError, TrainOutcome, TrainReport};
use dlc_core::EvalError;
use serde_json::json;

use crate::args::{AuditArgs, EvalArgs, GradArgs, OutFormat, TrainArgs};
use crate::{Failure, EXIT_AUDIT_MISMATCH, EXIT_DIVERGENCE};

/// Below this distance to the nearest breakpoint, `grad` warns that the
/// derivatives follow tie-breaking rules rather than a two-sided limit.
const KINK_WARN_GAP: f64 = 1e-9;

fn eval_failure(err: EvalError) -> Failure {
    match err {
        EvalError::UnboundVariable(_) => Failure::config(err),
        EvalError::NonFinite(_) => Failure::divergence(err),
    }
}

fn compile_from(args: &crate::args::SemanticsArgs, formula: &dlc_core::Formula) -> Result<CompiledLoss, Failure> {
    compile(formula, args.semantics, args.params.params(), args.oracle())
        .map(|loss| loss.with_stl_literal(args.stl_literal))
        .map_err(Failure::config)
}

pub fn eval(args: &EvalArgs) -> Result<u8, Failure> {
    let formula = args.formula.load()?;
    let env = args.env.load()?;
    let loss = compile_from(&args.semantics, &formula)?;
    let value = eval_loss(&loss, &env).map_err(eval_failure)?;
    let satisfied = loss.is_true(value);
    let truth = formula.truth(&env).map_err(eval_failure)?;
    match args.output.out {
        OutFormat::Text => {
            println!("value={value} satisfied={satisfied} truth={truth}");
        }
        OutFormat::Json => {
            let doc = json!({
                "semantics": loss.semantics(),
                "oracle": loss.oracle(),
                "params": loss.params(),
                "formula": formula.to_string(),
                "value": value,
                "satisfied": satisfied,
                "truth": truth,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json output"));
        }
        OutFormat::Csv => {
            println!("value,satisfied,truth");
            println!("{value},{satisfied},{truth}");
        }
    }
    Ok(0)
}

pub fn grad(args: &GradArgs) -> Result<u8, Failure> {
    let formula = args.formula.load()?;
    let env = args.env.load()?;
    let loss = compile_from(&args.semantics, &formula)?;
    let (value, partials) = exact_grad(&loss, &env).map_err(eval_failure)?;
    let gap = loss.kink_gap(&env).map_err(eval_failure)?;
    let kink_warning = gap <= KINK_WARN_GAP;

    let fd = if args.fd {
        if !(args.fd_step.is_finite() && args.fd_step > 0.0) {
            return Err(Failure::config(format!(
                "--fd-step must be positive and finite, got {}",
                args.fd_step
            )));
        }
        Some(finite_diff_grad(&loss, &env, args.fd_step).map_err(eval_failure)?)
    } else {
        None
    };
    // Worst |exact - fd| / max(1, |exact|) over all variables.
    let max_rel_deviation = fd.as_ref().map(|fd| {
        partials
            .iter()
            .map(|(name, g)| {
                let f = fd.get(name).expect("finite differences cover every variable");
                (g - f).abs() / g.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    });

    match args.output.out {
        OutFormat::Text => {
            println!("value={value}");
            if kink_warning {
                println!(
                    "warning: evaluation point is within {KINK_WARN_GAP:e} of a breakpoint; \
                     derivatives follow the documented tie-breaking rules"
                );
            }
            if args.fd {
                println!("variable,partial,finite_diff,rel_deviation");
            } else {
                println!("variable,partial");
            }
            for (name, g) in partials.iter() {
                match &fd {
                    Some(fd) => {
                        let f = fd.get(name).expect("fd covers every variable");
                        let dev = (g - f).abs() / g.abs().max(1.0);
                        println!("{name},{g},{f},{dev}");
                    }
                    None => println!("{name},{g}"),
                }
            }
            if let Some(dev) = max_rel_deviation {
                println!("max_rel_deviation={dev}");
            }
        }
        OutFormat::Json => {
            let partials_map: serde_json::Map<String, serde_json::Value> = partials
                .iter()
                .map(|(name, g)| (name.to_owned(), json!(g)))
                .collect();
            let mut doc = json!({
                "value": value,
                "kink_gap": gap,
                "kink_warning": kink_warning,
                "partials": partials_map,
            });
            if let Some(fd) = &fd {
                let fd_map: serde_json::Map<String, serde_json::Value> =
                    fd.iter().map(|(n, g)| (n.to_owned(), json!(g))).collect();
                doc["finite_diff"] = json!(fd_map);
                doc["max_rel_deviation"] = json!(max_rel_deviation.unwrap());
            }
            println!("{}", serde_json::to_string_pretty(&doc).expect("json output"));
        }
        OutFormat::Csv => {
            if args.fd {
                println!("variable,partial,finite_diff,rel_deviation");
                for (name, g) in partials.iter() {
                    let fd = fd.as_ref().unwrap();
                    let f = fd.get(name).expect("fd covers every variable");
                    let dev = (g - f).abs() / g.abs().max(1.0);
                    println!("{name},{g},{f},{dev}");
                }
            } else {
                println!("variable,partial");
                for (name, g) in partials.iter() {
                    println!("{name},{g}");
                }
            }
        }
    }
    Ok(0)
}

pub fn audit(args: &AuditArgs) -> Result<u8, Failure> {
    if args.trials == 0 {
        return Err(Failure::config("--trials must be at least 1"));
    }
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Failure::config(format!(
            "--tol must be positive and finite, got {}",
            args.tol
        )));
    }
    if !(args.grad_tol.is_finite() && args.grad_tol > 0.0) {
        return Err(Failure::config(format!(
            "--grad-tol must be positive and finite, got {}",
            args.grad_tol
        )));
    }
    let params = args.params.params();
    params.validate().map_err(Failure::config)?;
    let cfg = AuditConfig {
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        grad_tol: args.grad_tol,
        params,
        stl_literal: args.stl_literal,
    };
    let report = run_audit(&cfg);
    write_report_files(
        &args.out_dir,
        &[("audit.json", report.to_json()), ("audit.csv", report.to_csv())],
    )?;

    match args.output.out {
        OutFormat::Text => print_audit_grid(&report, &args.out_dir),
        OutFormat::Json => println!("{}", report.to_json()),
        OutFormat::Csv => print!("{}", report.to_csv()),
    }
    Ok(if report.matches_expected {
        0
    } else {
        EXIT_AUDIT_MISMATCH
    })
}

fn print_audit_grid(report: &AuditReport, out_dir: &Path) {
    println!(
        "audit: 6 semantics x 6 properties, {} trials per cell, seed {}",
        report.config.trials, report.config.seed
    );
    print!("{:<14}", "semantics");
    for property in PropertyId::TABLE {
        print!("{:<17}", property.name());
    }
    println!();
    let mut matched = 0usize;
    for s in SemanticsId::ALL {
        print!("{:<14}", s.name());
        for property in PropertyId::TABLE {
            let cell = report
                .cells
                .iter()
                .find(|c| c.check.semantics == s && c.check.property == property)
                .expect("every cell present");
            let observed = match cell.check.verdict {
                Verdict::HoldsOnTrials => "yes",
                Verdict::Counterexample => "no",
            };
            let mark = if cell.matches_expected {
                matched += 1;
                '\u{2713}' // ✓
            } else {
                '\u{2717}' // ✗
            };
            print!("{:<17}", format!("{observed} {mark}"));
        }
        println!();
    }
    println!("{matched}/36 cells match the expected table");
    for cell in report.cells.iter().filter(|c| !c.matches_expected) {
        println!(
            "mismatch: {}/{}: observed {}, expected {}{}",
            cell.check.semantics.name(),
            cell.check.property.name(),
            match cell.check.verdict {
                Verdict::HoldsOnTrials => "yes",
                Verdict::Counterexample => "no",
            },
            if cell.expected_holds { "yes" } else { "no" },
            if cell.check.witness.is_some() {
                " (replayable witness recorded)"
            } else {
                ""
            }
        );
    }
    let worst_probe = report
        .probe
        .iter()
        .min_by(|a, b| a.pass_rate.total_cmp(&b.pass_rate));
    if let Some(p) = worst_probe {
        println!(
            "smoothness probe: lowest pass rate {:.4} ({})",
            p.pass_rate,
            p.semantics.name()
        );
    }
    println!(
        "wrote {} and {}",
        out_dir.join("audit.json").display(),
        out_dir.join("audit.csv").display()
    );
}

pub fn train(args: &TrainArgs) -> Result<u8, Failure> {
    let cfg = args.resolve()?;
    let report = run_train(&cfg).map_err(train_failure)?;
    write_report_files(
        &args.out_dir,
        &[("train.json", report.to_json()), ("train.csv", report.to_csv())],
    )?;

    match args.output.out {
        OutFormat::Text => print_train_summary(&report, &args.out_dir),
        OutFormat::Json => println!("{}", report.to_json()),
        OutFormat::Csv => print!("{}", report.to_csv()),
    }
    Ok(match report.outcome {
        TrainOutcome::Completed => 0,
        TrainOutcome::Diverged { .. } => EXIT_DIVERGENCE,
    })
}

fn print_train_summary(report: &TrainReport, out_dir: &Path) {
    match report.outcome {
        TrainOutcome::Completed => println!("outcome: completed"),
        TrainOutcome::Diverged { epoch } => println!("outcome: diverged at epoch {epoch}"),
    }
    println!("epochs_run: {}", report.epochs_run);
    match &report.final_metrics {
        Some(m) => {
            println!("final_accuracy: {}", m.accuracy);
            println!("final_satisfaction_rate: {}", m.satisfaction_rate);
            println!("final_constraint_loss: {}", m.constraint_loss);
            println!("final_ce_loss: {}", m.ce_loss);
        }
        None => println!("no finite epoch completed; metrics unavailable"),
    }
    println!(
        "wrote {} and {}",
        out_dir.join("train.json").display(),
        out_dir.join("train.csv").display()
    );
}

fn train_failure(err: TrainError) -> Failure {
    match err {
        TrainError::Parse(_) => Failure::parse(err),
        TrainError::Compile(_) | TrainError::Config { .. } | TrainError::UnboundVariable { .. } => {
            Failure::config(err)
        }
        TrainError::Eval(inner) => eval_failure(inner),
    }
}

fn write_report_files(dir: &Path, files: &[(&str, String)]) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::config(format!("cannot create {}: {e}", dir.display())))?;
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
