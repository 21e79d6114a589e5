//! `dlc` — compile logical constraints into differentiable losses, inspect
//! their gradients, audit the algebraic properties of each operator family,
//! and run a constraint-augmented training demo.
//!
//! Exit codes are a stable contract for CI:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success (audit: every cell as expected)   |
//! | 1    | audit found cells diverging from expected |
//! | 2    | parse error (formula, environment, usage) |
//! | 3    | configuration error (params, oracle, …)   |
//! | 4    | numeric divergence                        |

mod args;
mod commands;

use std::fmt::Display;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{AuditArgs, EvalArgs, GradArgs, TrainArgs};

#[derive(Parser)]
#[command(
    name = "dlc",
    version,
    about = "Differentiable-logic loss compiler, auditor, and training demo"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula's loss value under a chosen semantics.
    Eval(EvalArgs),
    /// Print per-variable derivatives of the compiled loss.
    Grad(GradArgs),
    /// Check every operator family against the expected property table.
    Audit(AuditArgs),
    /// Train the demo classifier with a constraint-augmented objective.
    Train(TrainArgs),
}

/// Exit code for an audit that diverges from the expected table.
pub const EXIT_AUDIT_MISMATCH: u8 = 1;
/// Exit code for unparsable input.
pub const EXIT_PARSE: u8 = 2;
/// Exit code for invalid configuration (parameters, oracle pairing, paths).
pub const EXIT_CONFIG: u8 = 3;
/// Exit code for numeric divergence.
pub const EXIT_DIVERGENCE: u8 = 4;

/// A command failure carrying its documented exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Display) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.to_string(),
        }
    }

    pub fn config(message: impl Display) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }

    pub fn divergence(message: impl Display) -> Self {
        Failure {
            code: EXIT_DIVERGENCE,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Grad(a) => commands::grad(a),
        Command::Audit(a) => commands::audit(a),
        Command::Train(a) => commands::train(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
