//! Forward-mode differentiation with dual numbers.
//!
//! Every loss evaluation is generic over a [`Scalar`]; instantiating it at
//! [`Dual`] carries one directional derivative through the exact same
//! branch decisions as the plain `f64` evaluation, so the value and the
//! derivative always describe the same piece of the piecewise function.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

use crate::logic::{Env, EvalError};
use crate::semantics::{self, CompiledLoss};

/// Value and derivative of one scalar quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
}

impl Dual {
    pub const fn new(value: f64, deriv: f64) -> Self {
        Dual { value, deriv }
    }

    /// A quantity that does not depend on the differentiation variable.
    pub const fn constant(value: f64) -> Self {
        Dual::new(value, 0.0)
    }

    /// The differentiation variable itself.
    pub const fn seed(value: f64) -> Self {
        Dual::new(value, 1.0)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(
            self.value * rhs.value,
            self.deriv * rhs.value + self.value * rhs.deriv,
        )
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        Dual::new(
            self.value / rhs.value,
            (self.deriv * rhs.value - self.value * rhs.deriv) / (rhs.value * rhs.value),
        )
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.deriv)
    }
}

/// The numeric interface losses are evaluated over. Implemented by `f64`
/// (plain evaluation) and [`Dual`] (evaluation plus one derivative).
///
/// `min`/`max` break ties toward their first argument so that a loss and
/// its derivative are computed on the same branch; at a tie the first
/// argument's derivative is the one that propagates. The indicator's
/// derivative is 0 everywhere it is defined.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// The plain value, dropping any derivative part.
    fn value(self) -> f64;
    fn min(self, other: Self) -> Self;
    fn max(self, other: Self) -> Self;
    fn exp(self) -> Self;
    fn abs(self) -> Self;
    /// Power with a constant exponent.
    fn powf(self, p: f64) -> Self;
    /// 1 if the values are exactly equal, else 0; derivative 0.
    fn eq_indicator(self, other: Self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
    fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn eq_indicator(self, other: Self) -> Self {
        if self == other {
            1.0
        } else {
            0.0
        }
    }
}

impl Scalar for Dual {
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }
    fn value(self) -> f64 {
        self.value
    }
    fn min(self, other: Self) -> Self {
        if self.value <= other.value {
            self
        } else {
            other
        }
    }
    fn max(self, other: Self) -> Self {
        if self.value >= other.value {
            self
        } else {
            other
        }
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        Dual::new(e, e * self.deriv)
    }
    fn abs(self) -> Self {
        if self.value >= 0.0 {
            self
        } else {
            -self
        }
    }
    fn powf(self, p: f64) -> Self {
        Dual::new(
            self.value.powf(p),
            p * self.value.powf(p - 1.0) * self.deriv,
        )
    }
    fn eq_indicator(self, other: Self) -> Self {
        Dual::constant(if self.value == other.value { 1.0 } else { 0.0 })
    }
}

/// Partial derivatives keyed by variable name; the keys are exactly the
/// free variables of the differentiated loss.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Gradient(BTreeMap<String, f64>);

impl Gradient {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Largest absolute component, 0 for an empty gradient.
    pub fn max_abs(&self) -> f64 {
        self.0.values().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

impl FromIterator<(String, f64)> for Gradient {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Gradient(iter.into_iter().collect())
    }
}

/// Exact value and gradient of `loss` at `env`, one forward pass per free
/// variable. Deterministic: identical inputs produce bit-identical output.
pub fn grad(loss: &CompiledLoss, env: &Env) -> Result<(f64, Gradient), EvalError> {
    let vars = loss.free_vars();
    if vars.is_empty() {
        let value = semantics::eval_loss(loss, env)?;
        return Ok((value, Gradient::default()));
    }
    let mut value = f64::NAN;
    let mut parts = BTreeMap::new();
    for var in vars {
        let out = semantics::eval_dual(loss, env, var)?;
        if !out.value.is_finite() || !out.deriv.is_finite() {
            return Err(EvalError::NonFinite("gradient evaluation"));
        }
        value = out.value;
        parts.insert(var.clone(), out.deriv);
    }
    Ok((value, Gradient(parts)))
}

/// Central-difference approximation of the gradient with step `h`,
/// an independent oracle for cross-checking [`grad`].
pub fn finite_diff_grad(loss: &CompiledLoss, env: &Env, h: f64) -> Result<Gradient, EvalError> {
    assert!(h > 0.0 && h.is_finite(), "step must be positive, got {h}");
    let mut parts = BTreeMap::new();
    for var in loss.free_vars() {
        let center = env
            .get(var)
            .ok_or_else(|| EvalError::UnboundVariable(var.clone()))?;
        let mut shifted = env.clone();
        shifted.set(var.clone(), center + h);
        let up = semantics::eval_loss(loss, &shifted)?;
        shifted.set(var.clone(), center - h);
        let down = semantics::eval_loss(loss, &shifted)?;
        parts.insert(var.clone(), (up - down) / (2.0 * h));
    }
    Ok(Gradient(parts))
}
