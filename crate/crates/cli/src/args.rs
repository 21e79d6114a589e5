//! Flag groups shared between subcommands, and their resolution into the
//! library's configuration types.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use dlc_core::semantics::{AtomOracle, SemanticsId, SemanticsParams};
use dlc_core::trainer::TrainConfig;
use dlc_core::{parse_formula, Env, Formula};

use crate::Failure;

/// Connective parameters. One struct so `eval`, `grad`, `audit`, and `train`
/// expose identical flags.
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Penalty charged per violated (dis)equality by the additive family; > 0.
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    /// Exponent of the Yager conjunction; >= 1.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Sharpness of the smoothed robustness minimum; > 0.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
}

impl ParamArgs {
    pub fn params(&self) -> SemanticsParams {
        SemanticsParams {
            xi: self.xi,
            p: self.p,
            nu: self.nu,
        }
    }
}

/// How atoms are turned into truth values for the `[0, 1]`-valued families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    /// Hard 0/1 truth.
    Crisp,
    /// Linear ramp of width `--scale` between fully false and fully true.
    Graded,
    /// Signed satisfaction margin (required by the robustness family).
    Robustness,
}

/// Semantics selection shared by `eval` and `grad`.
#[derive(Debug, Args)]
pub struct SemanticsArgs {
    /// Operator family interpreting the formula.
    #[arg(long, default_value = "dl2")]
    pub semantics: SemanticsId,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Atom oracle; defaults to the family's natural one (crisp for the
    /// additive family, graded for the truth-valued families, robustness
    /// for the robustness family).
    #[arg(long, value_enum)]
    pub oracle: Option<OracleMode>,
    /// Ramp width of the graded oracle; > 0.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Evaluate positive robustness conjunctions with the literal
    /// shared-numerator averaging (diagnostic mode).
    #[arg(long)]
    pub stl_literal: bool,
}

impl SemanticsArgs {
    pub fn oracle(&self) -> AtomOracle {
        resolve_oracle(self.oracle, self.scale, self.semantics)
    }
}

fn resolve_oracle(mode: Option<OracleMode>, scale: f64, semantics: SemanticsId) -> AtomOracle {
    match mode {
        Some(OracleMode::Crisp) => AtomOracle::Crisp,
        Some(OracleMode::Graded) => AtomOracle::Graded { scale },
        Some(OracleMode::Robustness) => AtomOracle::Robustness,
        None => match semantics {
            SemanticsId::Dl2 => AtomOracle::Crisp,
            SemanticsId::Stl => AtomOracle::Robustness,
            _ => AtomOracle::Graded { scale },
        },
    }
}

/// Where the formula comes from: inline text or a file.
#[derive(Debug, Args)]
pub struct FormulaInput {
    /// Formula in surface syntax, e.g. `and(x <= 1, not(y != 2))`.
    #[arg(
        value_name = "FORMULA",
        conflicts_with = "formula_file",
        required_unless_present = "formula_file"
    )]
    pub formula: Option<String>,
    /// Read the formula from this file instead.
    #[arg(short = 'f', long = "formula-file", value_name = "FILE")]
    pub formula_file: Option<PathBuf>,
}

impl FormulaInput {
    pub fn load(&self) -> Result<Formula, Failure> {
        let text = match (&self.formula, &self.formula_file) {
            (Some(text), _) => text.clone(),
            (None, Some(path)) => fs::read_to_string(path).map_err(|e| {
                Failure::parse(format!("cannot read formula file {}: {e}", path.display()))
            })?,
            (None, None) => unreachable!("clap enforces one formula source"),
        };
        parse_formula(&text).map_err(Failure::parse)
    }
}

/// Variable bindings: a JSON object file or inline JSON. Absent means the
/// empty environment (fine for ground formulas).
#[derive(Debug, Args)]
pub struct EnvInput {
    /// JSON file binding variables to numbers, e.g. `{"x": 1.5, "y": 2}`.
    #[arg(short = 'e', long = "env", value_name = "FILE")]
    pub env_file: Option<PathBuf>,
    /// Inline JSON bindings (alternative to --env).
    #[arg(long = "env-json", value_name = "JSON", conflicts_with = "env_file")]
    pub env_json: Option<String>,
}

impl EnvInput {
    pub fn load(&self) -> Result<Env, Failure> {
        let text = match (&self.env_file, &self.env_json) {
            (Some(path), _) => fs::read_to_string(path).map_err(|e| {
                Failure::parse(format!("cannot read env file {}: {e}", path.display()))
            })?,
            (None, Some(inline)) => inline.clone(),
            (None, None) => return Ok(Env::new()),
        };
        Env::from_json_str(&text).map_err(Failure::parse)
    }
}

/// What to print on stdout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    /// Human-readable lines.
    Text,
    /// Machine-readable JSON.
    Json,
    /// Comma-separated values.
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Stdout format.
    #[arg(long = "out", value_enum, default_value = "text")]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub formula: FormulaInput,
    #[command(flatten)]
    pub env: EnvInput,
    #[command(flatten)]
    pub semantics: SemanticsArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GradArgs {
    #[command(flatten)]
    pub formula: FormulaInput,
    #[command(flatten)]
    pub env: EnvInput,
    #[command(flatten)]
    pub semantics: SemanticsArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also compute central finite differences and the worst relative
    /// deviation from the exact derivatives.
    #[arg(long)]
    pub fd: bool,
    /// Step used by --fd.
    #[arg(long = "fd-step", default_value_t = 1e-5)]
    pub fd_step: f64,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Randomised trials per property cell.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Seed for the trial generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Absolute tolerance for algebraic law checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Tolerance for derivative-based checks.
    #[arg(long = "grad-tol", default_value_t = 1e-6)]
    pub grad_tol: f64,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Audit the literal shared-numerator robustness averaging instead of
    /// the corrected one (diagnostic mode).
    #[arg(long)]
    pub stl_literal: bool,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Directory receiving audit.json and audit.csv.
    #[arg(long = "out-dir", value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// JSON training configuration; explicit flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Operator family compiling the constraint.
    #[arg(long)]
    pub semantics: Option<SemanticsId>,
    /// Penalty charged per violated (dis)equality by the additive family; > 0.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Exponent of the Yager conjunction; >= 1.
    #[arg(long)]
    pub p: Option<f64>,
    /// Sharpness of the smoothed robustness minimum; > 0.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Atom oracle; defaults to the family's natural one.
    #[arg(long, value_enum)]
    pub oracle: Option<OracleMode>,
    /// Ramp width of the graded oracle; > 0.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Constraint over x1, x2 (inputs) and y1, y2 (predicted probabilities).
    #[arg(long, value_name = "FORMULA")]
    pub constraint: Option<String>,
    /// Weight on the cross-entropy term; in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Weight on the constraint term; in [0, 1].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Gradient-descent learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Number of full-batch epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Seed for the dataset and the initial weights.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Synthetic dataset size; >= 10.
    #[arg(long = "dataset-size")]
    pub dataset_size: Option<usize>,
    /// Train against the literal shared-numerator robustness averaging.
    #[arg(long)]
    pub stl_literal: bool,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Directory receiving train.json and train.csv.
    #[arg(long = "out-dir", value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

impl TrainArgs {
    /// Merges the optional config file with flag overrides. Flags win; the
    /// oracle falls back to the semantics' natural one when neither source
    /// pins it down.
    pub fn resolve(&self) -> Result<TrainConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Failure::parse(format!("cannot read config file {}: {e}", path.display()))
                })?;
                serde_json::from_str::<TrainConfig>(&text).map_err(|e| {
                    Failure::parse(format!("config file {}: {e}", path.display()))
                })?
            }
            None => TrainConfig::default(),
        };
        if let Some(s) = self.semantics {
            cfg.semantics = s;
        }
        if let Some(xi) = self.xi {
            cfg.params.xi = xi;
        }
        if let Some(p) = self.p {
            cfg.params.p = p;
        }
        if let Some(nu) = self.nu {
            cfg.params.nu = nu;
        }
        if self.oracle.is_some() || self.scale.is_some() {
            let scale = self.scale.unwrap_or(match cfg.oracle {
                AtomOracle::Graded { scale } => scale,
                _ => 1.0,
            });
            cfg.oracle = resolve_oracle(self.oracle, scale, cfg.semantics);
        } else if self.config.is_none() {
            // No config file and no oracle flags: mirror eval's per-family
            // default so e.g. `--semantics stl` works out of the box.
            cfg.oracle = resolve_oracle(None, 1.0, cfg.semantics);
        }
        if let Some(constraint) = &self.constraint {
            cfg.constraint = constraint.clone();
        }
        if let Some(alpha) = self.alpha {
            cfg.alpha = alpha;
        }
        if let Some(beta) = self.beta {
            cfg.beta = beta;
        }
        if let Some(lr) = self.lr {
            cfg.lr = lr;
        }
        if let Some(epochs) = self.epochs {
            cfg.epochs = epochs;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(size) = self.dataset_size {
            cfg.dataset_size = size;
        }
        if self.stl_literal {
            cfg.stl_literal = true;
        }
        Ok(cfg)
    }
}
