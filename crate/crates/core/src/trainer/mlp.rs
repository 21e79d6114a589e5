//! A small fixed-shape multilayer perceptron used by the training demo.
//!
//! The network maps a 2-dimensional input through one hidden layer of 16
//! rectified-linear units to a 2-way softmax. Shapes are compile-time
//! constants: the demo only needs this one architecture, and fixing it keeps
//! the forward/backward passes allocation-light and easy to audit.

// Index loops here deliberately mirror the row-major weight layout
// (`w[row * width + col]`); iterator chains would obscure that arithmetic.
#![allow(clippy::needless_range_loop)]

use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Input dimension (features per data point).
pub const IN: usize = 2;
/// Hidden-layer width.
pub const HIDDEN: usize = 16;
/// Output dimension (class probabilities).
pub const OUT: usize = 2;

/// Multilayer perceptron `2 -> 16 (ReLU) -> 2 (softmax)`.
///
/// Weight matrices are stored row-major: `w1[h * IN + i]` connects input `i`
/// to hidden unit `h`, and `w2[o * HIDDEN + h]` connects hidden unit `h` to
/// output `o`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

/// Gradient accumulator with the same shape as [`Mlp`].
#[derive(Debug, Clone)]
pub struct MlpGrads {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

/// Intermediate state of a forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct Forward {
    /// Hidden-layer pre-activations (before ReLU).
    pub pre: [f64; HIDDEN],
    /// Hidden-layer activations (after ReLU).
    pub hidden: [f64; HIDDEN],
    /// Softmax class probabilities; each entry is in `(0, 1)` and the entries
    /// sum to 1 whenever the logits are finite.
    pub probs: [f64; OUT],
}

impl Mlp {
    /// Initialises weights from `N(0, 1/sqrt(fan_in))` and biases to zero.
    ///
    /// The draw order is fixed (first-layer weights row-major, then
    /// second-layer weights row-major), so a seeded generator yields an
    /// identical network on every run.
    pub fn new<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let l1 = Normal::new(0.0, 1.0 / (IN as f64).sqrt()).expect("valid std dev");
        let l2 = Normal::new(0.0, 1.0 / (HIDDEN as f64).sqrt()).expect("valid std dev");
        Mlp {
            w1: (0..HIDDEN * IN).map(|_| l1.sample(rng)).collect(),
            b1: vec![0.0; HIDDEN],
            w2: (0..OUT * HIDDEN).map(|_| l2.sample(rng)).collect(),
            b2: vec![0.0; OUT],
        }
    }

    /// An all-zero network. Every input maps to the uniform distribution,
    /// which makes hand-computed expectations easy in tests.
    pub fn zeroed() -> Self {
        Mlp {
            w1: vec![0.0; HIDDEN * IN],
            b1: vec![0.0; HIDDEN],
            w2: vec![0.0; OUT * HIDDEN],
            b2: vec![0.0; OUT],
        }
    }

    /// Runs the network on one input, returning all intermediate state.
    pub fn forward(&self, x: &[f64; IN]) -> Forward {
        let mut pre = [0.0; HIDDEN];
        let mut hidden = [0.0; HIDDEN];
        for h in 0..HIDDEN {
            let mut z = self.b1[h];
            for i in 0..IN {
                z += self.w1[h * IN + i] * x[i];
            }
            pre[h] = z;
            hidden[h] = z.max(0.0);
        }
        let mut logits = [0.0; OUT];
        for o in 0..OUT {
            let mut z = self.b2[o];
            for h in 0..HIDDEN {
                z += self.w2[o * HIDDEN + h] * hidden[h];
            }
            logits[o] = z;
        }
        Forward {
            pre,
            hidden,
            probs: softmax(&logits),
        }
    }

    /// Accumulates parameter gradients for one data point into `grads`.
    ///
    /// `dz` is the gradient of the scalar objective with respect to the
    /// *logits* (use [`softmax_vjp`] to pull a probability-space gradient
    /// back through the softmax first).
    pub fn backprop(&self, x: &[f64; IN], fwd: &Forward, dz: &[f64; OUT], grads: &mut MlpGrads) {
        for o in 0..OUT {
            grads.b2[o] += dz[o];
            for h in 0..HIDDEN {
                grads.w2[o * HIDDEN + h] += dz[o] * fwd.hidden[h];
            }
        }
        for h in 0..HIDDEN {
            if fwd.pre[h] <= 0.0 {
                continue; // ReLU gate closed: no gradient flows to layer 1.
            }
            let mut dh = 0.0;
            for o in 0..OUT {
                dh += dz[o] * self.w2[o * HIDDEN + h];
            }
            grads.b1[h] += dh;
            for i in 0..IN {
                grads.w1[h * IN + i] += dh * x[i];
            }
        }
    }

    /// Gradient-descent step: subtracts `scale * g` from every parameter.
    ///
    /// Pass `scale = learning_rate` when `grads` already holds a batch mean,
    /// or `learning_rate / batch_size` when it holds a raw sum.
    pub fn step(&mut self, grads: &MlpGrads, scale: f64) {
        for (p, g) in self.params_mut().zip(grads.params()) {
            *p -= scale * g;
        }
    }

    /// All parameters in a fixed order (`w1`, `b1`, `w2`, `b2`, row-major).
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.w1
            .iter()
            .chain(&self.b1)
            .chain(&self.w2)
            .chain(&self.b2)
            .copied()
    }

    /// Mutable view of all parameters, in the same order as [`Mlp::params`].
    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1
            .iter_mut()
            .chain(&mut self.b1)
            .chain(&mut self.w2)
            .chain(&mut self.b2)
    }

    /// Number of trainable parameters.
    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// FNV-1a-64 hash of all parameters in [`Mlp::params`] order, as a
    /// 16-digit lowercase hex string. Two runs that produce bit-identical
    /// weights produce the same checksum.
    pub fn weights_checksum(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for p in self.params() {
            for byte in p.to_le_bytes() {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        format!("{hash:016x}")
    }

    /// True when every parameter is finite.
    pub fn is_finite(&self) -> bool {
        self.params().all(f64::is_finite)
    }
}

impl MlpGrads {
    /// A zero-initialised accumulator matching [`Mlp`]'s shape.
    pub fn zeroed() -> Self {
        MlpGrads {
            w1: vec![0.0; HIDDEN * IN],
            b1: vec![0.0; HIDDEN],
            w2: vec![0.0; OUT * HIDDEN],
            b2: vec![0.0; OUT],
        }
    }

    /// All gradient entries in the same order as [`Mlp::params`].
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.w1
            .iter()
            .chain(&self.b1)
            .chain(&self.w2)
            .chain(&self.b2)
            .copied()
    }

    /// Divides every entry by `n`, turning an accumulated sum into a mean.
    pub fn scale_by(&mut self, factor: f64) {
        for g in self
            .w1
            .iter_mut()
            .chain(&mut self.b1)
            .chain(&mut self.w2)
            .chain(&mut self.b2)
        {
            *g *= factor;
        }
    }

    /// True when every gradient entry is finite.
    pub fn is_finite(&self) -> bool {
        self.params().all(f64::is_finite)
    }
}

/// Numerically stable softmax over a logit vector.
fn softmax(logits: &[f64; OUT]) -> [f64; OUT] {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; OUT];
    let mut sum = 0.0;
    for o in 0..OUT {
        out[o] = (logits[o] - max).exp();
        sum += out[o];
    }
    for v in &mut out {
        *v /= sum;
    }
    out
}

/// Pulls a gradient in probability space back to logit space.
///
/// Given softmax outputs `p` and `v = dL/dp`, returns `dL/dz` where
/// `dz_i = p_i * (v_i - sum_j p_j v_j)` — the softmax Jacobian applied to `v`.
pub fn softmax_vjp(probs: &[f64; OUT], v: &[f64; OUT]) -> [f64; OUT] {
    let dot: f64 = (0..OUT).map(|o| probs[o] * v[o]).sum();
    let mut dz = [0.0; OUT];
    for o in 0..OUT {
        dz[o] = probs[o] * (v[o] - dot);
    }
    dz
}
