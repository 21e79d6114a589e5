//! Randomized audits of the algebraic laws behind each conjunction.
//!
//! Each loss family claims (or denies) six laws for its conjunction
//! operator: idempotence, commutativity, shadow-lifting (strictly
//! positive partial derivatives at non-degenerate points), min–max
//! boundedness, scale invariance under positive factors, and
//! associativity. The auditor samples conjunct-value tuples from the
//! family's value range, evaluates both sides of each law, and returns
//! either `holds_on_trials` or a replayable counterexample witness.
//!
//! The observed verdicts are compared against a hard-coded expected
//! table; [`expected_table_hash`] fingerprints that table so reports can
//! be tied to the revision they were judged against. A separate
//! [`weak_smoothness_probe`] spot-checks gradient continuity away from
//! breakpoints; it is heuristic and takes no part in the comparison.

mod checks;
mod probe;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::semantics::{SemanticsId, SemanticsParams};
use crate::TOOL_VERSION;

pub use checks::Witness;
pub use probe::{weak_smoothness_probe, ProbeResult};

/// The audited laws, plus the out-of-band smoothness probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyId {
    Idempotent,
    Commutative,
    ShadowLifting,
    MinMaxBounded,
    ScaleInvariant,
    Associative,
    WeakSmoothProbe,
}

impl PropertyId {
    /// The six laws of the comparison table, in column order. The probe
    /// is deliberately absent: it is a heuristic, not a law.
    pub const TABLE: [PropertyId; 6] = [
        PropertyId::Idempotent,
        PropertyId::Commutative,
        PropertyId::ShadowLifting,
        PropertyId::MinMaxBounded,
        PropertyId::ScaleInvariant,
        PropertyId::Associative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::Idempotent => "idempotent",
            PropertyId::Commutative => "commutative",
            PropertyId::ShadowLifting => "shadow_lifting",
            PropertyId::MinMaxBounded => "min_max_bounded",
            PropertyId::ScaleInvariant => "scale_invariant",
            PropertyId::Associative => "associative",
            PropertyId::WeakSmoothProbe => "weak_smooth_probe",
        }
    }

    pub fn is_table_property(self) -> bool {
        self != PropertyId::WeakSmoothProbe
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one (family, law) check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No violation beyond tolerance was found in any trial.
    HoldsOnTrials,
    /// A stored witness violates the law beyond tolerance.
    Counterexample,
}

/// The claimed truth of each (family, law) cell.
///
/// Panics on the smoothness probe, which carries no claim.
pub fn expected_holds(s: SemanticsId, p: PropertyId) -> bool {
    use SemanticsId::*;
    match p {
        PropertyId::Commutative => true,
        PropertyId::Idempotent => matches!(s, Goedel | Stl),
        PropertyId::ShadowLifting => matches!(s, Dl2 | Product | Stl),
        PropertyId::MinMaxBounded => matches!(s, Goedel | Product | Stl),
        PropertyId::ScaleInvariant => matches!(s, Dl2 | Goedel | Stl),
        PropertyId::Associative => !matches!(s, Stl),
        PropertyId::WeakSmoothProbe => {
            panic!("the smoothness probe has no expected verdict")
        }
    }
}

/// SHA-256 fingerprint of the expected table, hex-encoded. Embedded in
/// reports so a stored report can be matched to the table it was judged
/// against.
pub fn expected_table_hash() -> String {
    let mut canon = String::new();
    for s in SemanticsId::ALL {
        for p in PropertyId::TABLE {
            let claim = if expected_holds(s, p) { "yes" } else { "no" };
            canon.push_str(&format!("{s},{p},{claim}\n"));
        }
    }
    let digest = Sha256::digest(canon.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Knobs of a full audit run.
#[derive(Debug, Clone, Serialize)]
pub struct AuditConfig {
    /// Sampled tuples per cell.
    pub trials: usize,
    pub seed: u64,
    /// Tolerance on algebraic identities.
    pub tol: f64,
    /// Tolerance on derivative-based checks (shadow-lifting, probe).
    pub grad_tol: f64,
    pub params: SemanticsParams,
    /// Audit the variant conjunction selected by `--stl-literal`.
    pub stl_literal: bool,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            trials: 10_000,
            seed: 0,
            tol: 1e-9,
            grad_tol: 1e-6,
            params: SemanticsParams::default(),
            stl_literal: false,
        }
    }
}

impl AuditConfig {
    /// The tolerance a given law is judged with.
    pub fn tolerance_for(&self, p: PropertyId) -> f64 {
        match p {
            PropertyId::ShadowLifting | PropertyId::WeakSmoothProbe => self.grad_tol,
            _ => self.tol,
        }
    }
}

/// Result of checking one law for one family.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyVerdict {
    pub semantics: SemanticsId,
    pub property: PropertyId,
    pub verdict: Verdict,
    /// Trials attempted before the verdict: the configured budget for
    /// `holds_on_trials`, or the index of the first counterexample.
    pub trials: usize,
    /// Attempted trials that produced a usable sample (degenerate draws
    /// are skipped; the sampler keeps this above 90% of `trials`).
    pub effective_samples: usize,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// A verdict next to the claim it is compared with.
#[derive(Debug, Clone, Serialize)]
pub struct AuditCell {
    #[serde(flatten)]
    pub check: PropertyVerdict,
    pub expected_holds: bool,
    pub matches_expected: bool,
}

/// All 36 (family × law) verdicts of one run.
#[derive(Debug, Clone, Serialize)]
pub struct AuditMatrix {
    pub cells: Vec<AuditCell>,
}

/// Checks one law for one family with a cell-specific deterministic
/// random stream derived from `cfg.seed`.
pub fn check_property(s: SemanticsId, p: PropertyId, cfg: &AuditConfig) -> PropertyVerdict {
    assert!(p.is_table_property(), "the probe is run via weak_smoothness_probe");
    assert!(cfg.trials >= 1);
    let mut rng = cell_rng(cfg.seed, s, p);
    checks::run(s, p, cfg, &mut rng)
}

fn cell_rng(seed: u64, s: SemanticsId, p: PropertyId) -> ChaCha8Rng {
    let si = SemanticsId::ALL.iter().position(|x| *x == s).unwrap() as u64;
    let pi = PropertyId::TABLE
        .iter()
        .position(|x| *x == p)
        .map(|i| i as u64)
        .unwrap_or(PropertyId::TABLE.len() as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(si * 16 + pi + 1);
    rng
}

/// Runs every (family, law) check. Deterministic in `cfg`.
pub fn audit_all(cfg: &AuditConfig) -> AuditMatrix {
    let mut cells = Vec::with_capacity(36);
    for s in SemanticsId::ALL {
        for p in PropertyId::TABLE {
            let check = check_property(s, p, cfg);
            let expected = expected_holds(s, p);
            let matches = expected == (check.verdict == Verdict::HoldsOnTrials);
            cells.push(AuditCell {
                check,
                expected_holds: expected,
                matches_expected: matches,
            });
        }
    }
    AuditMatrix { cells }
}

impl AuditMatrix {
    pub fn cell(&self, s: SemanticsId, p: PropertyId) -> &AuditCell {
        self.cells
            .iter()
            .find(|c| c.check.semantics == s && c.check.property == p)
            .expect("complete matrix")
    }

    /// Cells whose verdict disagrees with the expected table.
    pub fn mismatches(&self) -> Vec<&AuditCell> {
        self.cells.iter().filter(|c| !c.matches_expected).collect()
    }

    pub fn matches_expected(&self) -> bool {
        self.cells.iter().all(|c| c.matches_expected)
    }

    /// One row per family, `yes`/`no` per law; a trailing `*` marks a
    /// cell that disagrees with the expected table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("semantics");
        for p in PropertyId::TABLE {
            out.push(',');
            out.push_str(p.name());
        }
        out.push('\n');
        for s in SemanticsId::ALL {
            out.push_str(s.name());
            for p in PropertyId::TABLE {
                let cell = self.cell(s, p);
                let word = match cell.check.verdict {
                    Verdict::HoldsOnTrials => "yes",
                    Verdict::Counterexample => "no",
                };
                out.push(',');
                out.push_str(word);
                if !cell.matches_expected {
                    out.push('*');
                }
            }
            out.push('\n');
        }
        out
    }
}

/// A full audit run with its context: tool version, expected-table
/// fingerprint, configuration echo, verdicts, and probe results.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub tool_version: String,
    pub expected_table_hash: String,
    pub config: AuditConfig,
    pub notes: Vec<String>,
    pub cells: Vec<AuditCell>,
    pub mismatches: usize,
    pub matches_expected: bool,
    pub probe: Vec<ProbeResult>,
}

/// [`audit_all`] plus the smoothness probe and report metadata.
pub fn run_audit(cfg: &AuditConfig) -> AuditReport {
    let matrix = audit_all(cfg);
    let mismatches = matrix.mismatches().len();
    let matches_expected = mismatches == 0;
    let mut notes = vec![
        "scale_invariant draws the factor alpha from (0, 4]; for bounded-truth families \
         alpha is further capped so the scaled values stay inside [0, 1]"
            .to_string(),
    ];
    if cfg.trials < 1000 {
        notes.push(format!(
            "trials = {} is below 1000; verdicts are low-confidence",
            cfg.trials
        ));
    }
    if cfg.stl_literal {
        notes.push(
            "stl conjunction audited in literal mode: the all-satisfied branch returns \
             the minimum conjunct exactly"
                .to_string(),
        );
    }
    let probe = SemanticsId::ALL
        .iter()
        .map(|&s| weak_smoothness_probe(s, cfg))
        .collect();
    AuditReport {
        tool_version: TOOL_VERSION.to_string(),
        expected_table_hash: expected_table_hash(),
        config: cfg.clone(),
        notes,
        cells: matrix.cells,
        mismatches,
        matches_expected,
        probe,
    }
}

impl AuditReport {
    pub fn matrix(&self) -> AuditMatrix {
        AuditMatrix {
            cells: self.cells.clone(),
        }
    }

    pub fn to_csv(&self) -> String {
        self.matrix().to_csv()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
