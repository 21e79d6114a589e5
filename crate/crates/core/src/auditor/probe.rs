//! Heuristic gradient-continuity spot check.
//!
//! Every conjunction here is piecewise smooth, and its gradient is
//! continuous wherever no breakpoint is active — in particular at points
//! whose minimal conjunct is unique. The probe samples such points (with
//! a safety margin to every breakpoint), then requires that dual-number
//! partials agree with central finite differences and stay stable under
//! tiny input perturbations. A perfect pass rate is expected; this is a
//! numerical spot check, not a proof.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::semantics::connective::{conj_partials, conj_value_with};
use crate::semantics::kink;
use crate::semantics::SemanticsId;

use super::checks::{sample_domain, ARITIES};
use super::AuditConfig;

/// Minimum distance to any breakpoint for a point to enter the probe;
/// wide enough that finite-difference curvature error stays far below
/// the gradient tolerance.
const KINK_MARGIN: f64 = 0.05;
/// Fuzzy draws this close to 0 or 1 are skipped so difference stencils
/// stay inside `[0, 1]`.
const EDGE_MARGIN: f64 = 1e-4;
/// Central-difference step.
const FD_STEP: f64 = 1e-5;
/// Size of the stability perturbation.
const NUDGE: f64 = 1e-6;
/// Allowed gradient drift under a [`NUDGE`]-sized perturbation.
const STABILITY_TOL: f64 = 1e-3;

/// Outcome of probing one family.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub semantics: SemanticsId,
    pub trials: usize,
    /// Sampled points that cleared the breakpoint margin.
    pub checked: usize,
    pub passed: usize,
    pub pass_rate: f64,
    pub gradient_tolerance: f64,
    pub note: &'static str,
}

/// Probes gradient continuity of `s`'s conjunction at `cfg.trials`
/// sampled points. Deterministic in `cfg.seed`.
pub fn weak_smoothness_probe(s: SemanticsId, cfg: &AuditConfig) -> ProbeResult {
    let si = SemanticsId::ALL.iter().position(|x| *x == s).unwrap() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(128 + si);

    let (lo, hi) = sample_domain(s);
    let prm = &cfg.params;
    let lit = cfg.stl_literal;
    let mut checked = 0usize;
    let mut passed = 0usize;
    for trial in 0..cfg.trials {
        let m = ARITIES[trial % ARITIES.len()];
        let values: Vec<f64> = (0..m).map(|_| rng.gen_range(lo..=hi)).collect();
        if s.is_fuzzy()
            && values
                .iter()
                .any(|v| *v < EDGE_MARGIN || *v > 1.0 - EDGE_MARGIN)
        {
            continue;
        }
        let mut gap = f64::INFINITY;
        kink::conj_gap(s, prm, &values, &mut gap);
        if gap < KINK_MARGIN {
            continue;
        }
        checked += 1;

        let exact = conj_partials(s, prm, &values, lit);
        let mut ok = true;
        for i in 0..m {
            let mut probe = values.clone();
            probe[i] = values[i] + FD_STEP;
            let up = conj_value_with(s, prm, &probe, lit);
            probe[i] = values[i] - FD_STEP;
            let down = conj_value_with(s, prm, &probe, lit);
            let fd = (up - down) / (2.0 * FD_STEP);
            if (fd - exact[i]).abs() > cfg.grad_tol * exact[i].abs().max(1.0) {
                ok = false;
                break;
            }
        }
        if ok {
            let nudged: Vec<f64> = values
                .iter()
                .map(|v| v + rng.gen_range(-NUDGE..=NUDGE))
                .collect();
            let drifted = conj_partials(s, prm, &nudged, lit);
            ok = exact
                .iter()
                .zip(&drifted)
                .all(|(a, b)| (a - b).abs() <= STABILITY_TOL * a.abs().max(1.0));
        }
        if ok {
            passed += 1;
        }
    }
    ProbeResult {
        semantics: s,
        trials: cfg.trials,
        checked,
        passed,
        pass_rate: if checked == 0 {
            0.0
        } else {
            passed as f64 / checked as f64
        },
        gradient_tolerance: cfg.grad_tol,
        note: "heuristic spot check away from breakpoints; not a proof",
    }
}
