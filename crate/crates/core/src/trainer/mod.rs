//! Constraint-augmented training on a small synthetic classification task.
//!
//! The demo trains the fixed [`Mlp`] classifier on a two-blob dataset while
//! adding a differentiable constraint penalty to the objective:
//!
//! ```text
//! objective = alpha * cross_entropy + beta * constraint_loss
//! ```
//!
//! The constraint is an ordinary formula over the reserved variables `x1`,
//! `x2` (the input features) and `y1`, `y2` (the predicted class
//! probabilities), compiled under any of the supported semantics. Because the
//! semantics disagree about which direction is "good" (additive penalties
//! shrink towards satisfaction, truth values and robustness grow), the trainer
//! maps every compiled value to a minimisation form — see [`penalty`] — so
//! that gradient descent always pushes towards satisfaction.
//!
//! Everything is deterministic for a fixed [`TrainConfig`]: the dataset, the
//! initial weights, and full-batch gradient descent all derive from the
//! configured seed, so repeated runs produce bit-identical reports.

mod mlp;

pub use mlp::{softmax_vjp, Forward, Mlp, MlpGrads, HIDDEN, IN, OUT};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autodiff;
use crate::logic::{parse_formula, Env, EvalError, Formula, ParseError};
use crate::semantics::{
    compile, eval_loss, AtomOracle, CompileError, CompiledLoss, SemanticsId, SemanticsParams,
};
use crate::TOOL_VERSION;

/// Variables the trainer binds for every data point, in binding order:
/// the two input features, then the two predicted class probabilities.
pub const BOUND_VARS: [&str; 4] = ["x1", "x2", "y1", "y2"];

/// Names of the probability outputs, indexed like [`Forward::probs`].
const PROB_VARS: [&str; OUT] = ["y1", "y2"];

/// Probabilities below this floor are clamped before taking logarithms.
const LOG_FLOOR: f64 = 1e-12;

/// Blob centres for the two classes.
const CLASS_CENTERS: [[f64; IN]; 2] = [[-1.5, -1.5], [1.5, 1.5]];

/// Standard deviation of each blob, per coordinate.
const BLOB_STD: f64 = 1.0;

/// One labelled example: a 2-d input and a one-hot class target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataPoint {
    /// Input features.
    pub x: [f64; IN],
    /// One-hot target distribution.
    pub y: [f64; OUT],
}

/// The whole training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Points in generation order; labels alternate class 0, class 1, …
    pub points: Vec<DataPoint>,
}

impl Dataset {
    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when the dataset holds no points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Generates the synthetic two-blob dataset.
///
/// Points alternate between class 0 (blob centred at `(-1.5, -1.5)`) and
/// class 1 (blob centred at `(1.5, 1.5)`), each drawn with unit per-coordinate
/// noise, so an even `count` yields a perfectly balanced label split. The same
/// `seed` and `count` always produce the same points.
///
/// # Panics
///
/// Panics if `count` is zero.
pub fn make_dataset(seed: u64, count: usize) -> Dataset {
    assert!(count > 0, "dataset must contain at least one point");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, BLOB_STD).expect("valid std dev");
    let points = (0..count)
        .map(|i| {
            let class = i % 2;
            let center = CLASS_CENTERS[class];
            let mut x = [0.0; IN];
            for (coord, c) in x.iter_mut().zip(center) {
                *coord = c + noise.sample(&mut rng);
            }
            let mut y = [0.0; OUT];
            y[class] = 1.0;
            DataPoint { x, y }
        })
        .collect();
    Dataset { points }
}

/// Cross-entropy `-Σ target_i · ln(max(probs_i, 1e-12))`.
///
/// The floor keeps the value finite when a probability underflows to zero.
///
/// # Panics
///
/// Panics if the slices have different lengths.
pub fn cross_entropy(probs: &[f64], target: &[f64]) -> f64 {
    assert_eq!(probs.len(), target.len(), "probability/target length mismatch");
    probs
        .iter()
        .zip(target)
        .map(|(p, t)| -t * p.max(LOG_FLOOR).ln())
        .sum()
}

/// Maps a compiled loss value to a minimisation-form penalty.
///
/// Additive penalties already shrink towards satisfaction and pass through
/// unchanged. Truth values in `[0, 1]` grow towards satisfaction at 1, so
/// they are logged as `1 - value`; robustness grows without bound, so it is
/// negated. In every case lower means closer to satisfaction, which lets a
/// single gradient-descent loop handle all semantics.
pub fn penalty(semantics: SemanticsId, value: f64) -> f64 {
    let (offset, slope) = penalty_map(semantics);
    offset + slope * value
}

/// `(offset, slope)` such that `penalty = offset + slope * value`. The slope
/// also rescales `d(value)/d(prob)` when backpropagating the constraint.
fn penalty_map(semantics: SemanticsId) -> (f64, f64) {
    match semantics {
        SemanticsId::Dl2 => (0.0, 1.0),
        SemanticsId::Goedel | SemanticsId::Lukasiewicz | SemanticsId::Yager | SemanticsId::Product => {
            (1.0, -1.0)
        }
        SemanticsId::Stl => (0.0, -1.0),
    }
}

/// Binds the reserved variables for one point/prediction pair.
fn point_env(x: &[f64; IN], probs: &[f64; OUT]) -> Env {
    Env::new()
        .with("x1", x[0])
        .with("x2", x[1])
        .with("y1", probs[0])
        .with("y2", probs[1])
}

/// The scalar objective `alpha * cross_entropy + beta * constraint_penalty`,
/// averaged over a batch.
///
/// Exposed so tests can compare [`Objective::grads`] against finite
/// differences of [`Objective::value`] on the same weights.
#[derive(Debug)]
pub struct Objective {
    /// Weight on the cross-entropy term.
    pub alpha: f64,
    /// Weight on the constraint-penalty term.
    pub beta: f64,
    /// Compiled constraint over the reserved variables.
    pub loss: CompiledLoss,
}

/// Batch means of the objective's components.
#[derive(Debug, Clone, Copy)]
pub struct BatchMetrics {
    /// Mean cross-entropy.
    pub ce: f64,
    /// Mean constraint penalty (minimisation form).
    pub constraint: f64,
    /// `alpha * ce + beta * constraint`.
    pub augmented: f64,
}

impl Objective {
    /// Batch-mean objective value at the network's current weights.
    pub fn value(&self, net: &Mlp, points: &[DataPoint]) -> Result<f64, EvalError> {
        Ok(self.metrics(net, points)?.augmented)
    }

    /// Batch means of all three objective components.
    pub fn metrics(&self, net: &Mlp, points: &[DataPoint]) -> Result<BatchMetrics, EvalError> {
        let n = points.len() as f64;
        let (offset, slope) = penalty_map(self.loss.semantics());
        let mut ce_sum = 0.0;
        let mut penalty_sum = 0.0;
        for point in points {
            let fwd = net.forward(&point.x);
            ce_sum += cross_entropy(&fwd.probs, &point.y);
            let raw = eval_loss(&self.loss, &point_env(&point.x, &fwd.probs))?;
            penalty_sum += offset + slope * raw;
        }
        let ce = ce_sum / n;
        let constraint = penalty_sum / n;
        Ok(BatchMetrics {
            ce,
            constraint,
            augmented: self.alpha * ce + self.beta * constraint,
        })
    }

    /// Batch-mean objective value and its gradient with respect to every
    /// network parameter.
    ///
    /// The constraint's contribution flows through the predicted
    /// probabilities only: inputs are constants, so partials with respect to
    /// `x1`/`x2` are ignored. When `beta` is zero the constraint is still
    /// evaluated (its value is reported) but contributes no gradient.
    pub fn grads(
        &self,
        net: &Mlp,
        points: &[DataPoint],
    ) -> Result<(BatchMetrics, MlpGrads), EvalError> {
        let n = points.len() as f64;
        let (_, slope) = penalty_map(self.loss.semantics());
        let mut ce_sum = 0.0;
        let mut penalty_sum = 0.0;
        let mut grads = MlpGrads::zeroed();
        for point in points {
            let fwd = net.forward(&point.x);
            ce_sum += cross_entropy(&fwd.probs, &point.y);
            let mut dprob = [0.0; OUT];
            for ((dp, &t), &p) in dprob.iter_mut().zip(&point.y).zip(&fwd.probs) {
                // d/dp of -t * ln(max(p, floor)): zero inside the clamp.
                if t != 0.0 && p >= LOG_FLOOR {
                    *dp -= self.alpha * t / p;
                }
            }
            let env = point_env(&point.x, &fwd.probs);
            if self.beta != 0.0 {
                let (raw, partials) = autodiff::grad(&self.loss, &env)?;
                penalty_sum += penalty(self.loss.semantics(), raw);
                for (o, name) in PROB_VARS.iter().enumerate() {
                    if let Some(d) = partials.get(name) {
                        dprob[o] += self.beta * slope * d;
                    }
                }
            } else {
                penalty_sum += penalty(self.loss.semantics(), eval_loss(&self.loss, &env)?);
            }
            let dz = softmax_vjp(&fwd.probs, &dprob);
            net.backprop(&point.x, &fwd, &dz, &mut grads);
        }
        grads.scale_by(1.0 / n);
        let ce = ce_sum / n;
        let constraint = penalty_sum / n;
        let metrics = BatchMetrics {
            ce,
            constraint,
            augmented: self.alpha * ce + self.beta * constraint,
        };
        Ok((metrics, grads))
    }
}

/// Mean constraint penalty (minimisation form) of a network over a batch.
pub fn constraint_loss(
    net: &Mlp,
    points: &[DataPoint],
    loss: &CompiledLoss,
) -> Result<f64, EvalError> {
    let n = points.len() as f64;
    let mut sum = 0.0;
    for point in points {
        let fwd = net.forward(&point.x);
        sum += penalty(
            loss.semantics(),
            eval_loss(loss, &point_env(&point.x, &fwd.probs))?,
        );
    }
    Ok(sum / n)
}

/// Fraction of points whose predictions satisfy the constraint under
/// ordinary boolean evaluation (independent of any semantics).
pub fn satisfaction_rate(
    net: &Mlp,
    points: &[DataPoint],
    constraint: &Formula,
) -> Result<f64, EvalError> {
    let mut satisfied = 0usize;
    for point in points {
        let fwd = net.forward(&point.x);
        if constraint.truth(&point_env(&point.x, &fwd.probs))? {
            satisfied += 1;
        }
    }
    Ok(satisfied as f64 / points.len() as f64)
}

/// Fraction of points whose highest-probability class matches the label.
/// Ties resolve to the first class.
pub fn accuracy(net: &Mlp, points: &[DataPoint]) -> f64 {
    let correct = points
        .iter()
        .filter(|point| {
            let fwd = net.forward(&point.x);
            argmax(&fwd.probs) == argmax(&point.y)
        })
        .count();
    correct as f64 / points.len() as f64
}

fn argmax(values: &[f64; OUT]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Everything that defines a training run. Two runs with equal configs
/// produce bit-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Which semantics compiles the constraint.
    pub semantics: SemanticsId,
    /// Connective parameters for the chosen semantics.
    pub params: SemanticsParams,
    /// Atom oracle used by the truth-valued semantics.
    pub oracle: AtomOracle,
    /// Constraint formula over `x1`, `x2`, `y1`, `y2` (surface syntax).
    pub constraint: String,
    /// Weight on the cross-entropy term, in `[0, 1]`.
    pub alpha: f64,
    /// Weight on the constraint term, in `[0, 1]`.
    pub beta: f64,
    /// Gradient-descent learning rate.
    pub lr: f64,
    /// Number of full-batch epochs.
    pub epochs: usize,
    /// Seed for dataset generation and weight initialisation.
    pub seed: u64,
    /// Number of points in the synthetic dataset.
    pub dataset_size: usize,
    /// Evaluate robustness conjunctions with the literal shared-numerator
    /// averaging (diagnostic mode).
    pub stl_literal: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            semantics: SemanticsId::Dl2,
            params: SemanticsParams::default(),
            oracle: AtomOracle::Crisp,
            constraint: "y1 <= 0.9".to_owned(),
            alpha: 0.5,
            beta: 0.5,
            lr: 0.1,
            epochs: 200,
            seed: 0,
            dataset_size: 1000,
            stl_literal: false,
        }
    }
}

impl TrainConfig {
    /// Checks ranges that the type system cannot enforce.
    pub fn validate(&self) -> Result<(), TrainError> {
        let in_unit = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        if !in_unit(self.alpha) {
            return Err(TrainError::Config {
                message: format!("alpha must lie in [0, 1], got {}", self.alpha),
            });
        }
        if !in_unit(self.beta) {
            return Err(TrainError::Config {
                message: format!("beta must lie in [0, 1], got {}", self.beta),
            });
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(TrainError::Config {
                message: format!("learning rate must be positive and finite, got {}", self.lr),
            });
        }
        if self.epochs == 0 {
            return Err(TrainError::Config {
                message: "epochs must be at least 1".to_owned(),
            });
        }
        if self.dataset_size < 10 {
            return Err(TrainError::Config {
                message: format!("dataset size must be at least 10, got {}", self.dataset_size),
            });
        }
        Ok(())
    }
}

/// Reasons a training run cannot start or continue.
#[derive(Debug, Error)]
pub enum TrainError {
    /// The constraint string is not valid surface syntax.
    #[error("constraint formula: {0}")]
    Parse(#[from] ParseError),
    /// The constraint parsed but cannot compile under the chosen semantics.
    #[error("constraint compilation: {0}")]
    Compile(#[from] CompileError),
    /// A configuration value is out of range.
    #[error("invalid training configuration: {message}")]
    Config {
        /// Human-readable description of the offending value.
        message: String,
    },
    /// The constraint mentions a variable the trainer never binds.
    #[error("constraint uses variable `{name}`, but the trainer only binds x1, x2, y1, y2")]
    UnboundVariable {
        /// The unknown variable name.
        name: String,
    },
    /// Evaluation failed for a reason other than numeric divergence.
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// How a training run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrainOutcome {
    /// All configured epochs ran with finite losses, gradients, and weights.
    Completed,
    /// A non-finite loss, gradient, or weight appeared; the report holds the
    /// rows and weights from before the failing update.
    Diverged {
        /// 1-based epoch during which divergence was detected.
        epoch: usize,
    },
}

/// Post-update metrics for one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Mean cross-entropy over the batch.
    pub ce_loss: f64,
    /// Mean constraint penalty (minimisation form) over the batch.
    pub constraint_loss: f64,
    /// `alpha * ce_loss + beta * constraint_loss`.
    pub augmented_loss: f64,
    /// Classification accuracy.
    pub accuracy: f64,
    /// Fraction of points satisfying the constraint as a boolean.
    pub satisfaction_rate: f64,
}

impl EpochRow {
    fn is_finite(&self) -> bool {
        [
            self.ce_loss,
            self.constraint_loss,
            self.augmented_loss,
            self.accuracy,
            self.satisfaction_rate,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Metrics at the final recorded epoch, duplicated from the last row for
/// easy extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    /// Mean cross-entropy.
    pub ce_loss: f64,
    /// Mean constraint penalty (minimisation form).
    pub constraint_loss: f64,
    /// Weighted sum of the two.
    pub augmented_loss: f64,
    /// Classification accuracy.
    pub accuracy: f64,
    /// Boolean constraint satisfaction rate.
    pub satisfaction_rate: f64,
}

impl From<&EpochRow> for FinalMetrics {
    fn from(row: &EpochRow) -> Self {
        FinalMetrics {
            ce_loss: row.ce_loss,
            constraint_loss: row.constraint_loss,
            augmented_loss: row.augmented_loss,
            accuracy: row.accuracy,
            satisfaction_rate: row.satisfaction_rate,
        }
    }
}

/// Complete record of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Version of the tool that produced the report.
    pub tool_version: String,
    /// The configuration that was run.
    pub config: TrainConfig,
    /// Whether the run completed or diverged.
    pub outcome: TrainOutcome,
    /// Number of epochs with recorded (finite) metrics.
    pub epochs_run: usize,
    /// Per-epoch metrics, one row per completed epoch.
    pub rows: Vec<EpochRow>,
    /// Metrics at the last recorded epoch; absent if divergence struck
    /// before any epoch completed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub final_metrics: Option<FinalMetrics>,
    /// FNV-1a hash of the final (finite) weights, for determinism checks.
    pub weights_checksum: String,
    /// Caveats about how the numbers were computed.
    pub notes: Vec<String>,
}

impl TrainReport {
    /// Pretty-printed JSON. All stored floats are finite, so serialisation
    /// cannot fail.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV with one row per epoch:
    /// `epoch,ce_loss,constraint_loss,augmented_loss,accuracy,satisfaction_rate`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "epoch,ce_loss,constraint_loss,augmented_loss,accuracy,satisfaction_rate\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.epoch,
                row.ce_loss,
                row.constraint_loss,
                row.augmented_loss,
                row.accuracy,
                row.satisfaction_rate
            ));
        }
        out
    }
}

/// One gradient step plus post-update metrics.
///
/// Returns `Ok(None)` when a non-finite loss, gradient, weight, or metric is
/// detected — the network is left at the last finite weights in that case.
fn run_epoch(
    net: &mut Mlp,
    objective: &Objective,
    points: &[DataPoint],
    constraint: &Formula,
    lr: f64,
    epoch: usize,
) -> Result<Option<EpochRow>, EvalError> {
    let (pre, grads) = objective.grads(net, points)?;
    if !pre.augmented.is_finite() || !grads.is_finite() {
        return Ok(None);
    }
    let backup = net.clone();
    net.step(&grads, lr);
    if !net.is_finite() {
        *net = backup;
        return Ok(None);
    }
    let metrics = objective.metrics(net, points)?;
    let row = EpochRow {
        epoch,
        ce_loss: metrics.ce,
        constraint_loss: metrics.constraint,
        augmented_loss: metrics.augmented,
        accuracy: accuracy(net, points),
        satisfaction_rate: satisfaction_rate(net, points, constraint)?,
    };
    if !row.is_finite() {
        *net = backup;
        return Ok(None);
    }
    Ok(Some(row))
}

/// Runs full-batch gradient descent per the configuration and returns the
/// complete report.
///
/// Divergence (non-finite loss, gradient, weight, or metric) is not an
/// error: the run stops, the report keeps every finite epoch recorded so
/// far, and [`TrainReport::outcome`] says where it happened.
pub fn train(cfg: &TrainConfig) -> Result<TrainReport, TrainError> {
    cfg.validate()?;
    let formula = parse_formula(&cfg.constraint)?;
    let loss = compile(&formula, cfg.semantics, cfg.params, cfg.oracle)?
        .with_stl_literal(cfg.stl_literal);
    if let Some(unknown) = loss
        .free_vars()
        .iter()
        .find(|name| !BOUND_VARS.contains(&name.as_str()))
    {
        return Err(TrainError::UnboundVariable {
            name: unknown.clone(),
        });
    }

    let data = make_dataset(cfg.seed, cfg.dataset_size);
    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_rng.set_stream(1); // distinct stream: dataset and weights stay independent
    let mut net = Mlp::new(&mut init_rng);
    let objective = Objective {
        alpha: cfg.alpha,
        beta: cfg.beta,
        loss,
    };

    let mut rows = Vec::with_capacity(cfg.epochs);
    let mut outcome = TrainOutcome::Completed;
    for epoch in 1..=cfg.epochs {
        match run_epoch(&mut net, &objective, &data.points, &formula, cfg.lr, epoch) {
            Ok(Some(row)) => rows.push(row),
            Ok(None) | Err(EvalError::NonFinite(_)) => {
                outcome = TrainOutcome::Diverged { epoch };
                break;
            }
            Err(err) => return Err(err.into()),
        }
    }

    let mut notes = vec![
        "constraint_loss is the batch mean of per-point penalties in minimisation form: \
         additive penalties pass through, truth values are logged as 1 - value, and \
         robustness as -value, so lower always means closer to satisfaction."
            .to_owned(),
    ];
    if cfg.semantics == SemanticsId::Stl {
        notes.push(
            "robustness is unbounded and enters the objective on a different scale than \
             cross-entropy; no automatic rescaling is applied, so beta may need tuning."
                .to_owned(),
        );
    }

    Ok(TrainReport {
        tool_version: TOOL_VERSION.to_owned(),
        config: cfg.clone(),
        outcome,
        epochs_run: rows.len(),
        final_metrics: rows.last().map(FinalMetrics::from),
        rows,
        weights_checksum: net.weights_checksum(),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compiled(text: &str, s: SemanticsId, oracle: AtomOracle) -> CompiledLoss {
        compile(&parse_formula(text).unwrap(), s, SemanticsParams::default(), oracle).unwrap()
    }

    #[test]
    fn dataset_is_balanced_and_deterministic() {
        let a = make_dataset(0, 1000);
        let b = make_dataset(0, 1000);
        assert_eq!(a, b);
        assert_eq!(a.len(), 1000);
        let class_one = a.points.iter().filter(|p| p.y == [0.0, 1.0]).count();
        assert_eq!(class_one, 500);
        // Blob means land near the configured centres.
        let mean_x0: f64 = a
            .points
            .iter()
            .filter(|p| p.y[0] == 1.0)
            .map(|p| p.x[0])
            .sum::<f64>()
            / 500.0;
        assert!((mean_x0 + 1.5).abs() < 0.2, "class-0 mean {mean_x0}");
        assert_ne!(a, make_dataset(1, 1000));
    }

    #[test]
    fn cross_entropy_hand_values() {
        let ln2 = std::f64::consts::LN_2;
        assert!((cross_entropy(&[0.5, 0.5], &[1.0, 0.0]) - ln2).abs() < 1e-15);
        assert!((cross_entropy(&[0.25, 0.75], &[0.0, 1.0]) + 0.75f64.ln()).abs() < 1e-15);
        assert_eq!(cross_entropy(&[1.0, 0.0], &[1.0, 0.0]), 0.0);
        // The floor keeps a zero probability finite.
        assert!(cross_entropy(&[0.0, 1.0], &[1.0, 0.0]).is_finite());
    }

    #[test]
    fn constraint_loss_on_the_uniform_network() {
        // The zeroed network predicts (0.5, 0.5) everywhere, so the additive
        // penalty of `y1 <= 0.4` is max(0.5 - 0.4, 0) = 0.1 for every point.
        let net = Mlp::zeroed();
        let data = make_dataset(0, 20);
        let loss = compiled("y1 <= 0.4", SemanticsId::Dl2, AtomOracle::Crisp);
        let got = constraint_loss(&net, &data.points, &loss).unwrap();
        assert!((got - 0.1).abs() < 1e-15);

        // Satisfied constraint: exactly zero penalty.
        let ok = compiled("y1 <= 0.9", SemanticsId::Dl2, AtomOracle::Crisp);
        assert_eq!(constraint_loss(&net, &data.points, &ok).unwrap(), 0.0);
    }

    #[test]
    fn truth_valued_penalties_are_complemented() {
        // Graded truth of `y1 <= 0.4` at y1 = 0.5 is 1 - 0.1/1 = 0.9, so the
        // logged penalty is 1 - 0.9 = 0.1; robustness -0.1 is negated to 0.1.
        let net = Mlp::zeroed();
        let data = make_dataset(3, 10);
        let fuzzy = compiled(
            "y1 <= 0.4",
            SemanticsId::Goedel,
            AtomOracle::Graded { scale: 1.0 },
        );
        let got = constraint_loss(&net, &data.points, &fuzzy).unwrap();
        assert!((got - 0.1).abs() < 1e-12, "fuzzy penalty {got}");
        let stl = compiled("y1 <= 0.4", SemanticsId::Stl, AtomOracle::Robustness);
        let got = constraint_loss(&net, &data.points, &stl).unwrap();
        assert!((got - 0.1).abs() < 1e-12, "robustness penalty {got}");
    }

    #[test]
    fn satisfaction_and_accuracy_on_the_uniform_network() {
        let net = Mlp::zeroed();
        let data = make_dataset(0, 100);
        let always = parse_formula("y1 <= 0.9").unwrap();
        assert_eq!(satisfaction_rate(&net, &data.points, &always).unwrap(), 1.0);
        let never = parse_formula("y1 <= 0.1").unwrap();
        assert_eq!(satisfaction_rate(&net, &data.points, &never).unwrap(), 0.0);
        // Uniform predictions always pick class 0 (tie), matching half the labels.
        assert_eq!(accuracy(&net, &data.points), 0.5);
    }

    #[test]
    fn config_validation_rejects_out_of_range_values() {
        let ok = TrainConfig::default();
        ok.validate().unwrap();
        for bad in [
            TrainConfig { alpha: 1.5, ..ok.clone() },
            TrainConfig { beta: -0.1, ..ok.clone() },
            TrainConfig { lr: 0.0, ..ok.clone() },
            TrainConfig { epochs: 0, ..ok.clone() },
            TrainConfig { dataset_size: 5, ..ok.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(TrainError::Config { .. })));
        }
    }

    #[test]
    fn unknown_constraint_variables_are_rejected() {
        let cfg = TrainConfig {
            constraint: "z <= 0.5".to_owned(),
            epochs: 1,
            dataset_size: 10,
            ..TrainConfig::default()
        };
        match train(&cfg) {
            Err(TrainError::UnboundVariable { name }) => assert_eq!(name, "z"),
            other => panic!("expected unbound-variable error, got {other:?}"),
        }
    }

    #[test]
    fn training_is_deterministic() {
        let cfg = TrainConfig {
            epochs: 5,
            dataset_size: 50,
            ..TrainConfig::default()
        };
        let a = train(&cfg).unwrap();
        let b = train(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.epochs_run, 5);
        assert_eq!(a.outcome, TrainOutcome::Completed);
    }

    #[test]
    fn zero_beta_matches_pure_cross_entropy_training() {
        // With beta = 0 the constraint cannot influence the weights, so two
        // runs with different constraints end at identical parameters.
        let base = TrainConfig {
            beta: 0.0,
            epochs: 5,
            dataset_size: 50,
            ..TrainConfig::default()
        };
        let other = TrainConfig {
            constraint: "y1 <= 0.1".to_owned(),
            ..base.clone()
        };
        let a = train(&base).unwrap();
        let b = train(&other).unwrap();
        assert_eq!(a.weights_checksum, b.weights_checksum);
        // The logged constraint values still differ.
        assert_ne!(
            a.final_metrics.unwrap().constraint_loss,
            b.final_metrics.unwrap().constraint_loss
        );
    }

    #[test]
    fn constraint_only_training_reaches_full_satisfaction() {
        // alpha = 0 leaves only the constraint pressure; a few dozen epochs
        // push every prediction below the 0.9 cap, at which point the hinge
        // penalty is exactly zero.
        let cfg = TrainConfig {
            alpha: 0.0,
            beta: 1.0,
            epochs: 50,
            dataset_size: 50,
            ..TrainConfig::default()
        };
        let report = train(&cfg).unwrap();
        assert_eq!(report.outcome, TrainOutcome::Completed);
        let last = report.final_metrics.unwrap();
        assert_eq!(last.satisfaction_rate, 1.0);
        assert_eq!(last.constraint_loss, 0.0);
    }

    #[test]
    fn runaway_learning_rate_is_reported_as_divergence() {
        let cfg = TrainConfig {
            lr: 1e300,
            epochs: 20,
            dataset_size: 10,
            ..TrainConfig::default()
        };
        let report = train(&cfg).unwrap();
        match report.outcome {
            TrainOutcome::Diverged { epoch } => assert!(epoch <= 20),
            TrainOutcome::Completed => panic!("expected divergence"),
        }
        assert_eq!(report.epochs_run, report.rows.len());
        assert!(report.rows.iter().all(|r| r.is_finite()));
        // Reported weights are the last finite ones.
        assert!(report.weights_checksum.len() == 16);
    }

    #[test]
    fn csv_has_one_row_per_epoch_with_the_documented_header() {
        let cfg = TrainConfig {
            epochs: 3,
            dataset_size: 20,
            ..TrainConfig::default()
        };
        let report = train(&cfg).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "epoch,ce_loss,constraint_loss,augmented_loss,accuracy,satisfaction_rate"
        );
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
        assert!(lines[3].starts_with("3,"));
    }

    #[test]
    fn report_embeds_version_and_notes() {
        let cfg = TrainConfig {
            epochs: 1,
            dataset_size: 10,
            ..TrainConfig::default()
        };
        let report = train(&cfg).unwrap();
        assert_eq!(report.tool_version, TOOL_VERSION);
        assert!(report.notes.iter().any(|n| n.contains("batch mean")));
        let json = report.to_json();
        assert!(json.contains("\"weights_checksum\""));
        assert!(json.contains("\"status\": \"completed\""));
    }
}
