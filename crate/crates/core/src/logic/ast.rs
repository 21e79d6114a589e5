use std::collections::BTreeSet;
use std::fmt;

use super::{Env, EvalError};

/// A term is either a variable reference or a finite numeric literal.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(String),
    Const(f64),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(v: f64) -> Self {
        assert!(v.is_finite(), "constant terms must be finite, got {v}");
        Term::Const(v)
    }

    /// Numeric value of the term under `env`.
    pub fn value(&self, env: &Env) -> Result<f64, EvalError> {
        match self {
            Term::Var(name) => env
                .get(name)
                .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
            Term::Const(v) => Ok(*v),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) => f.write_str(name),
            Term::Const(v) => write!(f, "{v}"),
        }
    }
}

/// Comparison predicate of an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    /// `lhs <= rhs`
    Le,
    /// `lhs != rhs`
    Neq,
}

impl Predicate {
    pub fn symbol(self) -> &'static str {
        match self {
            Predicate::Le => "<=",
            Predicate::Neq => "!=",
        }
    }
}

/// An atomic comparison, optionally carrying a pushed-down negation.
///
/// The parser never sets `negated`; it appears only after
/// [`Formula::to_nnf`] folds a surrounding `not(..)` into the atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub predicate: Predicate,
    pub lhs: Term,
    pub rhs: Term,
    pub negated: bool,
}

impl Atom {
    pub fn new(predicate: Predicate, lhs: Term, rhs: Term) -> Self {
        Atom {
            predicate,
            lhs,
            rhs,
            negated: false,
        }
    }

    /// Classical truth of the comparison under `env`.
    pub fn truth(&self, env: &Env) -> Result<bool, EvalError> {
        let l = self.lhs.value(env)?;
        let r = self.rhs.value(env)?;
        let base = match self.predicate {
            Predicate::Le => l <= r,
            Predicate::Neq => l != r,
        };
        Ok(base != self.negated)
    }
}

/// A constraint formula.
///
/// Conjunction is stored n-ary and is never flattened: `and(a, and(b, c))`
/// keeps its bracketing because some semantics give nested binary
/// conjunctions a different value than one flat `andM(a, b, c)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Atom(Atom),
    /// Conjunction over two or more children.
    Conj(Vec<Formula>),
    Neg(Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: Predicate, lhs: Term, rhs: Term) -> Self {
        Formula::Atom(Atom::new(predicate, lhs, rhs))
    }

    /// Binary conjunction.
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::Conj(vec![a, b])
    }

    /// N-ary conjunction; at least two children.
    pub fn conj(children: Vec<Formula>) -> Self {
        assert!(
            children.len() >= 2,
            "conjunction needs at least 2 children, got {}",
            children.len()
        );
        Formula::Conj(children)
    }

    // Named to match the `and`/`conj` constructors; always called as
    // `Formula::not(..)`, so it cannot shadow the `std::ops::Not` method.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    /// Free variables in lexicographic order.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars
    }

    fn collect_vars(&self, vars: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                for term in [&a.lhs, &a.rhs] {
                    if let Term::Var(name) = term {
                        vars.insert(name.clone());
                    }
                }
            }
            Formula::Conj(children) => children.iter().for_each(|c| c.collect_vars(vars)),
            Formula::Neg(inner) => inner.collect_vars(vars),
        }
    }

    /// Classical two-valued interpretation.
    pub fn truth(&self, env: &Env) -> Result<bool, EvalError> {
        match self {
            Formula::Atom(a) => a.truth(env),
            Formula::Conj(children) => {
                let mut all = true;
                for child in children {
                    // evaluate every child so unbound variables always surface
                    all &= child.truth(env)?;
                }
                Ok(all)
            }
            Formula::Neg(inner) => Ok(!inner.truth(env)?),
        }
    }

    /// Negation normal form: double negations cancel and negations over
    /// atoms fold into the atom's `negated` flag. A negation over a
    /// conjunction stays in place (the fragment has no disjunction to push
    /// it through); semantics without a native negation reject such
    /// residues at compile time.
    pub fn to_nnf(&self) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Conj(children) => {
                Formula::Conj(children.iter().map(Formula::to_nnf).collect())
            }
            Formula::Neg(inner) => match inner.as_ref() {
                Formula::Atom(a) => {
                    let mut flipped = a.clone();
                    flipped.negated = !flipped.negated;
                    Formula::Atom(flipped)
                }
                Formula::Neg(doubly) => doubly.to_nnf(),
                Formula::Conj(children) => Formula::not(Formula::Conj(
                    children.iter().map(Formula::to_nnf).collect(),
                )),
            },
        }
    }

    /// True if any `Neg` node remains anywhere in the tree.
    pub fn contains_neg(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Conj(children) => children.iter().any(Formula::contains_neg),
            Formula::Neg(_) => true,
        }
    }

    /// Every atom in the tree, left to right.
    pub fn atoms(&self) -> Vec<&Atom> {
        fn collect<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
            match f {
                Formula::Atom(a) => out.push(a),
                Formula::Neg(inner) => collect(inner, out),
                Formula::Conj(children) => children.iter().for_each(|c| collect(c, out)),
            }
        }
        let mut out = Vec::new();
        collect(self, &mut out);
        out
    }
}

impl fmt::Display for Formula {
    /// Prints surface syntax that reparses to an equal formula. Atoms with
    /// a pushed-down negation print as `not(atom)`, so normalized formulas
    /// reparse to their pre-normalization shape.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => {
                if a.negated {
                    write!(f, "not({} {} {})", a.lhs, a.predicate.symbol(), a.rhs)
                } else {
                    write!(f, "{} {} {}", a.lhs, a.predicate.symbol(), a.rhs)
                }
            }
            Formula::Conj(children) => {
                let name = if children.len() == 2 { "and" } else { "andM" };
                write!(f, "{name}(")?;
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{child}")?;
                }
                f.write_str(")")
            }
            Formula::Neg(inner) => write!(f, "not({inner})"),
        }
    }
}
