//! Constraint formulas: syntax tree, parser, and classical interpretation.

mod ast;
mod env;
mod parser;

pub use ast::{Atom, Formula, Predicate, Term};
pub use env::{Env, EnvError};
pub use parser::{parse_formula, ParseError};

use thiserror::Error;

/// Failure while evaluating a formula or loss against an [`Env`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    /// A variable in the formula has no binding in the environment.
    #[error("variable `{0}` is not bound in the environment")]
    UnboundVariable(String),
    /// Arithmetic left the finite range (overflow, or 0/0 style results).
    #[error("evaluation produced a non-finite value in {0}")]
    NonFinite(&'static str),
}
