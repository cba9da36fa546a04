//! Versioned, machine-readable run reports.
//!
//! Every command-line invocation emits one JSON report: a fixed envelope
//! (schema version, command name, the fully resolved configuration it ran
//! under, and a hash of that configuration) around a command-specific
//! result. Reruns with the same configuration produce byte-identical
//! reports — nothing here reads the clock.
//!
//! Tabular data (trajectories, oracle comparisons, extracted curves) is
//! written as plain CSV with fixed headers; numbers are formatted with
//! Rust's shortest round-trip representation so files parse back to the
//! exact bits that were computed.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::cocycle::LiftedPoint;
use crate::error::{Error, Result};
use crate::lyapunov::ContractionReport;
use crate::pullback::PullbackRun;
use crate::winding::{Extraction, InvarianceCheck, RandomCurve};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// The envelope around every JSON report.
#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    /// Subcommand that produced the report.
    pub command: String,
    /// Fully resolved configuration, flat key=value. Defaults are filled
    /// in, so the echo alone reproduces the run.
    pub config: BTreeMap<String, String>,
    /// FNV-1a hash of the canonical `key=value` lines of `config`.
    pub config_hash: String,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, config: BTreeMap<String, String>, result: T) -> Self {
        let config_hash = config_hash(&config);
        Envelope {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            config_hash,
            result,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// FNV-1a (64-bit) over the canonical `key=value\n` lines, hex-encoded.
/// `BTreeMap` iteration is sorted, so the hash is order-independent.
///
/// The hash identifies the *computation*: presentation-only keys (`out`,
/// `format`) are excluded, so the same run writing to a different
/// directory or streaming CSV instead of JSON hashes identically.
pub fn config_hash(config: &BTreeMap<String, String>) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for (k, v) in config {
        if k == "out" || k == "format" {
            continue;
        }
        for byte in k.bytes().chain(*b"=").chain(v.bytes()).chain(*b"\n") {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    format!("{h:016x}")
}

/// Structured error for stderr: `{"schema_version":1,"error":{...}}`.
pub fn error_json(err: &Error) -> String {
    let body = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
        }
    });
    let mut s = body.to_string();
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// command result payloads
// ---------------------------------------------------------------------------

/// Final state and table shape of a `simulate` run.
#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub rows: usize,
    pub t_final: f64,
    pub s_lift_final: f64,
    pub y_final: Vec<f64>,
    pub windings: f64,
}

/// Mirror of [`PullbackRun`] with fiber states flattened for JSON.
#[derive(Debug, Serialize)]
pub struct PullbackSummary {
    pub horizons: Vec<f64>,
    pub arrivals: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
    pub rate_estimate: Option<f64>,
    pub converged: bool,
    pub tolerance: f64,
}

impl PullbackSummary {
    pub fn from_run(run: &PullbackRun) -> Self {
        PullbackSummary {
            horizons: run.horizons.clone(),
            arrivals: run.states.iter().map(|z| z.y.clone()).collect(),
            errors: run.errors.clone(),
            rate_estimate: run.rate_estimate,
            converged: run.converged,
            tolerance: run.tolerance,
        }
    }
}

/// One extracted curve, by summary statistics.
#[derive(Debug, Serialize)]
pub struct CurveSummary {
    pub curve_id: usize,
    pub tau: usize,
    pub period: f64,
    pub closure_residual: f64,
    pub lipschitz_estimate: f64,
    pub value_at_zero: Vec<f64>,
}

/// Result of `curves`: counts, winding numbers, periods, residuals.
#[derive(Debug, Serialize)]
pub struct ExtractionSummary {
    /// Number of random periodic curves found.
    pub r: usize,
    pub taus: Vec<usize>,
    pub t1: f64,
    pub period_per_curve: Vec<f64>,
    pub residuals: Vec<f64>,
    pub depth: usize,
    pub lambda: f64,
    pub b_star: f64,
    pub curves: Vec<CurveSummary>,
}

impl ExtractionSummary {
    pub fn from_extraction(ex: &Extraction) -> Self {
        let curves = ex
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| CurveSummary {
                curve_id: i,
                tau: c.tau,
                period: c.tau as f64 * ex.t1,
                closure_residual: ex.residuals[i],
                lipschitz_estimate: c.lipschitz_estimate,
                value_at_zero: c.eval(0.0),
            })
            .collect();
        ExtractionSummary {
            r: ex.curves.len(),
            taus: ex.curves.iter().map(|c| c.tau).collect(),
            t1: ex.t1,
            period_per_curve: ex.curves.iter().map(|c| c.tau as f64 * ex.t1).collect(),
            residuals: ex.residuals.clone(),
            depth: ex.depth,
            lambda: ex.contraction.0,
            b_star: ex.contraction.1,
            curves,
        }
    }
}

/// JSON-safe mirror of [`ContractionReport`] (`gap` is `null` when the
/// fiber has a single component and the gap is infinite).
#[derive(Debug, Serialize)]
pub struct ContractionSummary {
    pub n0: usize,
    pub lambda_hat: f64,
    pub c_hat: f64,
    pub l_derived: f64,
    pub n_bound: usize,
    pub b_star: f64,
    pub gap: Option<f64>,
    pub sample_count: usize,
    pub seeds_used: Vec<u64>,
}

impl ContractionSummary {
    pub fn from_report(r: &ContractionReport) -> Self {
        ContractionSummary {
            n0: r.n0,
            lambda_hat: r.lambda_hat,
            c_hat: r.c_hat,
            l_derived: r.l_derived,
            n_bound: r.n_bound,
            b_star: r.b_star,
            gap: r.gap.is_finite().then_some(r.gap),
            sample_count: r.sample_count,
            seeds_used: r.seeds_used.clone(),
        }
    }
}

/// Result of `lyapunov`: the exponent estimate with its ingredients and
/// the independent ergodic cross-check where one exists.
#[derive(Debug, Serialize)]
pub struct LyapunovSummary {
    /// Mean of the per-seed exponents.
    pub exponent: f64,
    pub per_seed: Vec<PerSeedExponent>,
    /// Independent route via trajectory statistics (example system only).
    pub ergodic_average: Option<f64>,
    pub contraction: Option<ContractionSummary>,
    pub t_max: f64,
}

#[derive(Debug, Serialize)]
pub struct PerSeedExponent {
    pub seed: u64,
    pub exponent: f64,
}

/// Result of `verify`: invariance of the curve family under the shift.
#[derive(Debug, Serialize)]
pub struct VerifySummary {
    /// The shift actually used, snapped to the revolution-aligned grid.
    pub shift: f64,
    pub shift_requested: f64,
    pub tau_match: bool,
    pub r_match: bool,
    pub curve_residual: f64,
    pub residual_tolerance: f64,
    pub period: f64,
    pub passed: bool,
}

impl VerifySummary {
    pub fn from_check(
        check: &InvarianceCheck,
        shift: f64,
        shift_requested: f64,
        residual_tolerance: f64,
    ) -> Self {
        VerifySummary {
            shift,
            shift_requested,
            tau_match: check.tau_match,
            r_match: check.r_match,
            curve_residual: check.curve_residual,
            residual_tolerance,
            period: check.period,
            passed: check.tau_match && check.r_match && check.curve_residual <= residual_tolerance,
        }
    }
}

/// Result of `oracle`: the integrator measured against the closed form.
#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub rows: usize,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub t_max: f64,
    pub dt: f64,
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

/// `t,s_lift,y_1..y_d` rows of a trajectory.
pub fn write_trajectory_csv<W: Write>(mut w: W, d: usize, rows: &[(f64, LiftedPoint)]) -> Result<()> {
    write!(w, "t,s_lift")?;
    for j in 1..=d {
        write!(w, ",y_{j}")?;
    }
    writeln!(w)?;
    for (t, z) in rows {
        write!(w, "{},{}", t, z.s_lift)?;
        for v in &z.y {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// One comparison row of the `oracle` table.
#[derive(Debug, Clone, Copy)]
pub struct OracleRow {
    pub t: f64,
    pub rho_closed: f64,
    pub rho_numeric: f64,
}

/// `t,rho_closed,rho_numeric,abs_err` rows.
pub fn write_oracle_csv<W: Write>(mut w: W, rows: &[OracleRow]) -> Result<()> {
    writeln!(w, "t,rho_closed,rho_numeric,abs_err")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.t,
            r.rho_closed,
            r.rho_numeric,
            (r.rho_closed - r.rho_numeric).abs()
        )?;
    }
    Ok(())
}

/// `s,y_1..y_d,curve_id,tau` rows for every curve in the family.
///
/// `s` runs over `[0, tau)` — the lifted angle along the curve, so a
/// winding-2 curve lists two full revolutions before closing.
pub fn write_curves_csv<W: Write>(mut w: W, curves: &[RandomCurve]) -> Result<()> {
    let d = curves.first().map_or(0, |c| c.values[0].len());
    write!(w, "s")?;
    for j in 1..=d {
        write!(w, ",y_{j}")?;
    }
    writeln!(w, ",curve_id,tau")?;
    for (id, curve) in curves.iter().enumerate() {
        for (s, y) in curve.s_grid.iter().zip(&curve.values) {
            write!(w, "{s}")?;
            for v in y {
                write!(w, ",{v}")?;
            }
            writeln!(w, ",{id},{}", curve.tau)?;
        }
    }
    Ok(())
}
