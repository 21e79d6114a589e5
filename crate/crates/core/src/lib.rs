//! Compile logical constraint formulas into differentiable loss functions.
//!
//! A constraint is written in a small surface language of comparisons
//! (`x <= 3`, `y != 0`) combined with `and(..)`, `andM(..)` and `not(..)`.
//! [`compile`] turns a parsed [`Formula`] into a [`CompiledLoss`] under one
//! of six loss semantics; the loss can then be evaluated on variable
//! bindings, differentiated exactly with forward-mode dual numbers, audited
//! for algebraic laws, or mixed into a training objective.

pub mod auditor;
pub mod autodiff;
pub mod logic;
pub mod sample;
pub mod semantics;
pub mod trainer;

pub use logic::{parse_formula, Atom, Env, EnvError, EvalError, Formula, ParseError, Predicate, Term};
pub use semantics::{
    compile, domain_true, eval_loss, AtomOracle, CompileError, CompiledLoss, SemanticsId,
    SemanticsParams,
};

/// Version string embedded in every generated report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
