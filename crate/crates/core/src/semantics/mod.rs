//! Translation of constraint formulas into differentiable losses.
//!
//! Six loss families share one evaluator:
//!
//! * `dl2` — additive penalties in `[0, ∞)`; a formula is satisfied
//!   exactly when its penalty is 0.
//! * `goedel`, `lukasiewicz`, `yager`, `product` — fuzzy truth values in
//!   `[0, 1]` built from atom oracles and t-norms; satisfied exactly at
//!   truth value 1.
//! * `stl` — signed robustness in `(-∞, ∞)` with a smooth minimum for
//!   conjunction; satisfied exactly when the robustness is positive.
//!
//! [`compile`] pairs a parsed [`Formula`] with a family, its parameters,
//! and an [`AtomOracle`], checking compatibility up front; the result
//! evaluates on any [`Env`] binding the formula's free variables, over
//! plain numbers ([`eval_loss`]) or dual numbers (gradients, via
//! [`crate::autodiff::grad`]).

pub mod connective;
pub(crate) mod kink;
mod oracle;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autodiff::{Dual, Scalar};
use crate::logic::{Env, EvalError, Formula};

pub use oracle::{atom_oracle_eval, dl2_atom};

/// The six loss families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsId {
    Dl2,
    Goedel,
    Lukasiewicz,
    Yager,
    Product,
    Stl,
}

impl SemanticsId {
    /// Every family, in canonical report order.
    pub const ALL: [SemanticsId; 6] = [
        SemanticsId::Dl2,
        SemanticsId::Goedel,
        SemanticsId::Lukasiewicz,
        SemanticsId::Yager,
        SemanticsId::Product,
        SemanticsId::Stl,
    ];

    /// Canonical lowercase name, as accepted by [`FromStr`] and the CLI.
    pub fn name(self) -> &'static str {
        match self {
            SemanticsId::Dl2 => "dl2",
            SemanticsId::Goedel => "goedel",
            SemanticsId::Lukasiewicz => "lukasiewicz",
            SemanticsId::Yager => "yager",
            SemanticsId::Product => "product",
            SemanticsId::Stl => "stl",
        }
    }

    /// True for the four t-norm families with truth values in `[0, 1]`.
    pub fn is_fuzzy(self) -> bool {
        matches!(
            self,
            SemanticsId::Goedel | SemanticsId::Lukasiewicz | SemanticsId::Yager
                | SemanticsId::Product
        )
    }
}

impl fmt::Display for SemanticsId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A name that matches no loss family.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown semantics `{0}`; expected one of dl2, goedel, lukasiewicz, yager, product, stl")]
pub struct UnknownSemantics(pub String);

impl FromStr for SemanticsId {
    type Err = UnknownSemantics;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dl2" => Ok(SemanticsId::Dl2),
            "goedel" | "godel" | "gödel" => Ok(SemanticsId::Goedel),
            "lukasiewicz" | "łukasiewicz" => Ok(SemanticsId::Lukasiewicz),
            "yager" => Ok(SemanticsId::Yager),
            "product" => Ok(SemanticsId::Product),
            "stl" => Ok(SemanticsId::Stl),
            other => Err(UnknownSemantics(other.to_string())),
        }
    }
}

/// Numeric knobs of the loss families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SemanticsParams {
    /// Price of a violated equality/disequality under `dl2`; must be > 0.
    pub xi: f64,
    /// Power-mean exponent of the `yager` t-norm; must be >= 1.
    pub p: f64,
    /// Sharpness of the `stl` smooth minimum; must be > 0.
    pub nu: f64,
}

impl Default for SemanticsParams {
    fn default() -> Self {
        SemanticsParams {
            xi: 1.0,
            p: 2.0,
            nu: 1.0,
        }
    }
}

impl SemanticsParams {
    pub fn validate(&self) -> Result<(), CompileError> {
        param_in("xi", self.xi, |v| v > 0.0, "a finite value > 0")?;
        param_in("p", self.p, |v| v >= 1.0, "a finite value >= 1")?;
        param_in("nu", self.nu, |v| v > 0.0, "a finite value > 0")?;
        Ok(())
    }
}

fn param_in(
    name: &'static str,
    value: f64,
    ok: impl Fn(f64) -> bool,
    requirement: &'static str,
) -> Result<(), CompileError> {
    if value.is_finite() && ok(value) {
        Ok(())
    } else {
        Err(CompileError::Param {
            name,
            value,
            requirement,
        })
    }
}

/// How atomic comparisons become numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum AtomOracle {
    /// Exact boolean membership: 1 if the comparison holds, else 0.
    Crisp,
    /// Truth in `[0, 1]` that degrades with the size of the violation;
    /// `scale` (> 0) sets how fast.
    Graded { scale: f64 },
    /// Signed margin in `(-∞, ∞)`: positive means satisfied, with room.
    Robustness,
}

impl AtomOracle {
    pub fn mode_name(&self) -> &'static str {
        match self {
            AtomOracle::Crisp => "crisp",
            AtomOracle::Graded { .. } => "graded",
            AtomOracle::Robustness => "robustness",
        }
    }

    pub fn validate(&self) -> Result<(), CompileError> {
        if let AtomOracle::Graded { scale } = self {
            param_in("scale", *scale, |v| v > 0.0, "a finite value > 0")?;
        }
        Ok(())
    }
}

impl fmt::Display for AtomOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomOracle::Graded { scale } => write!(f, "graded(scale={scale})"),
            other => f.write_str(other.mode_name()),
        }
    }
}

/// The subset of a family's value range that counts as "satisfied".
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruthRegion {
    /// Satisfied at exactly this value.
    Equals(f64),
    /// Satisfied strictly above this value.
    GreaterThan(f64),
}

/// Value range of a loss family, with its satisfied region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub lo: f64,
    pub hi: f64,
    pub truth: TruthRegion,
}

/// Range and satisfied region of each family.
pub fn domain_spec(s: SemanticsId) -> DomainSpec {
    match s {
        SemanticsId::Dl2 => DomainSpec {
            lo: 0.0,
            hi: f64::INFINITY,
            truth: TruthRegion::Equals(0.0),
        },
        SemanticsId::Stl => DomainSpec {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            truth: TruthRegion::GreaterThan(0.0),
        },
        _ => DomainSpec {
            lo: 0.0,
            hi: 1.0,
            truth: TruthRegion::Equals(1.0),
        },
    }
}

/// Whether value `v` counts as "satisfied" under family `s`: penalty
/// exactly 0, fuzzy truth exactly 1, or strictly positive robustness.
pub fn domain_true(s: SemanticsId, v: f64) -> bool {
    match domain_spec(s).truth {
        TruthRegion::Equals(t) => v == t,
        TruthRegion::GreaterThan(t) => v > t,
    }
}

/// Why a formula/family/oracle combination cannot be compiled.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("parameter `{name}` = {value} is out of range: must be {requirement}")]
    Param {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error(
        "`not` over a conjunction has no additive-penalty translation; \
         push the negation onto the atoms or pick another semantics"
    )]
    NegatedConjunction,
    #[error(
        "atom oracle `{oracle}` cannot drive `{semantics}` losses: \
         this family needs {expected}"
    )]
    OracleMismatch {
        semantics: SemanticsId,
        oracle: &'static str,
        expected: &'static str,
    },
}

/// A formula fixed to a loss family, ready to evaluate on environments.
///
/// Immutable once built; evaluation is pure, so sharing one value across
/// threads is safe.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledLoss {
    semantics: SemanticsId,
    params: SemanticsParams,
    oracle: AtomOracle,
    /// For `dl2` this is the negation normal form of the input (negations
    /// folded into atoms); other families keep the input shape and apply
    /// negation natively.
    root: Formula,
    vars: BTreeSet<String>,
    stl_literal: bool,
}

/// Fixes `formula` to family `s`.
///
/// Validates parameters, checks the oracle fits the family (`dl2` ignores
/// the oracle and uses its own atom rules; fuzzy families need a
/// `[0, 1]`-valued oracle, crisp or graded; `stl` needs the signed-margin
/// oracle), and for `dl2` rewrites the formula to negation normal form —
/// failing with [`CompileError::NegatedConjunction`] if a negation cannot
/// be pushed onto the atoms.
pub fn compile(
    formula: &Formula,
    s: SemanticsId,
    params: SemanticsParams,
    oracle: AtomOracle,
) -> Result<CompiledLoss, CompileError> {
    params.validate()?;
    oracle.validate()?;
    match s {
        SemanticsId::Dl2 => {}
        SemanticsId::Stl => {
            if !matches!(oracle, AtomOracle::Robustness) {
                return Err(CompileError::OracleMismatch {
                    semantics: s,
                    oracle: oracle.mode_name(),
                    expected: "the robustness oracle (signed margins)",
                });
            }
        }
        _fuzzy => {
            if matches!(oracle, AtomOracle::Robustness) {
                return Err(CompileError::OracleMismatch {
                    semantics: s,
                    oracle: oracle.mode_name(),
                    expected: "a [0, 1]-valued oracle (crisp or graded)",
                });
            }
        }
    }
    let root = if s == SemanticsId::Dl2 {
        let nnf = formula.to_nnf();
        if nnf.contains_neg() {
            return Err(CompileError::NegatedConjunction);
        }
        nnf
    } else {
        formula.clone()
    };
    let vars = root.free_vars();
    Ok(CompiledLoss {
        semantics: s,
        params,
        oracle,
        root,
        vars,
        stl_literal: false,
    })
}

impl CompiledLoss {
    pub fn semantics(&self) -> SemanticsId {
        self.semantics
    }

    pub fn params(&self) -> &SemanticsParams {
        &self.params
    }

    pub fn oracle(&self) -> &AtomOracle {
        &self.oracle
    }

    /// The formula as evaluated (negation-normal for `dl2`).
    pub fn formula(&self) -> &Formula {
        &self.root
    }

    pub fn free_vars(&self) -> &BTreeSet<String> {
        &self.vars
    }

    pub fn stl_literal(&self) -> bool {
        self.stl_literal
    }

    /// Switches the `stl` conjunction's all-satisfied branch to the
    /// variant that returns the minimum conjunct exactly. No effect on
    /// the other families.
    pub fn with_stl_literal(mut self, literal: bool) -> Self {
        self.stl_literal = literal;
        self
    }

    /// Distance from `env` to the nearest derivative breakpoint of this
    /// loss; see the caveats on unit mixing in the crate docs.
    pub fn kink_gap(&self, env: &Env) -> Result<f64, EvalError> {
        kink::min_kink_gap(self.semantics, &self.params, Some(&self.oracle), &self.root, env)
    }

    /// True when `value` lies in this family's satisfied region.
    pub fn is_true(&self, value: f64) -> bool {
        domain_true(self.semantics, value)
    }
}

pub(crate) trait VarLookup<T> {
    fn var(&self, name: &str) -> Option<T>;
}

impl VarLookup<f64> for Env {
    fn var(&self, name: &str) -> Option<f64> {
        self.get(name)
    }
}

/// An [`Env`] viewed as dual numbers with derivative 1 on one variable.
pub(crate) struct SeedView<'a> {
    env: &'a Env,
    seed: &'a str,
}

impl VarLookup<Dual> for SeedView<'_> {
    fn var(&self, name: &str) -> Option<Dual> {
        self.env.get(name).map(|v| {
            if name == self.seed {
                Dual::seed(v)
            } else {
                Dual::constant(v)
            }
        })
    }
}

/// Loss value of `loss` at `env`. Errors on unbound variables and on
/// non-finite results.
pub fn eval_loss(loss: &CompiledLoss, env: &Env) -> Result<f64, EvalError> {
    let v = eval_scalar(loss, env)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite("loss evaluation"))
    }
}

/// One dual-number pass with derivative seeded on `seed_var`.
pub(crate) fn eval_dual(loss: &CompiledLoss, env: &Env, seed_var: &str) -> Result<Dual, EvalError> {
    let view = SeedView { env, seed: seed_var };
    eval_node(loss, &loss.root, &view)
}

fn eval_scalar(loss: &CompiledLoss, env: &Env) -> Result<f64, EvalError> {
    eval_node(loss, &loss.root, env)
}

fn eval_node<T: Scalar>(
    loss: &CompiledLoss,
    node: &Formula,
    lookup: &impl VarLookup<T>,
) -> Result<T, EvalError> {
    match node {
        Formula::Atom(atom) => match loss.semantics {
            SemanticsId::Dl2 => oracle::dl2_atom_value(atom, lookup, loss.params.xi),
            _ => oracle::oracle_atom_value(atom, lookup, &loss.oracle),
        },
        Formula::Neg(inner) => {
            let v = eval_node(loss, inner, lookup)?;
            Ok(match loss.semantics {
                SemanticsId::Stl => -v,
                SemanticsId::Dl2 => {
                    unreachable!("compilation rejects residual negation under dl2")
                }
                _fuzzy => T::from_f64(1.0) - v,
            })
        }
        Formula::Conj(children) => {
            let vals: Vec<T> = children
                .iter()
                .map(|c| eval_node(loss, c, lookup))
                .collect::<Result<_, _>>()?;
            Ok(connective::conj_n(
                loss.semantics,
                &loss.params,
                &vals,
                loss.stl_literal,
            ))
        }
    }
}
