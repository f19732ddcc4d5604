//! Machine-readable run artifacts: `report.json` plus `trajectory.csv`,
//! `zeros.csv` and `modes.csv` in the output directory.
//!
//! Floats are written with 17 significant digits so the CSV round-trips
//! doubles losslessly and reruns diff byte-for-byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use blowup_core::{BlowupReport, ModeTrace, ZeroTrack};
use serde::Serialize;

use crate::config::ScenarioConfig;

/// One checked assertion with its measured value and tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl AssertionOutcome {
    pub fn new(
        name: &str,
        passed: bool,
        measured: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.to_string(),
            passed,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupSummary {
    pub blew_up: bool,
    pub t_est: Option<f64>,
    pub rate_exponent: Option<f64>,
    pub rate_constant: Option<f64>,
    pub rate_residual: Option<f64>,
    pub rate_warning: bool,
    pub x_blowup: Option<f64>,
    pub type1_bound: Option<f64>,
    pub boundary_contamination: f64,
    pub boundary_ok: bool,
    pub died_at: Option<f64>,
    pub final_sup_z: f64,
    pub initial_sup_z: f64,
}

impl BlowupSummary {
    pub fn from_report(report: &BlowupReport) -> Self {
        Self {
            blew_up: report.blew_up,
            t_est: report.t_est,
            rate_exponent: report.rate.map(|r| r.exponent),
            rate_constant: report.rate.map(|r| r.constant),
            rate_residual: report.rate.map(|r| r.residual),
            rate_warning: report.rate.map(|r| r.warning).unwrap_or(false),
            x_blowup: report.x_blowup,
            type1_bound: report.type1_bound,
            boundary_contamination: report.boundary_contamination,
            boundary_ok: report.boundary_ok,
            died_at: report.died_at,
            final_sup_z: report.trajectory.last().map(|s| s.sup_z).unwrap_or(0.0),
            initial_sup_z: report.trajectory.first().map(|s| s.sup_z).unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroSummary {
    pub initial_count: usize,
    pub final_count: usize,
    pub monotonicity_violations: usize,
    pub degenerate: bool,
    pub gamma_at_t_est: Option<f64>,
    pub gamma_gap: Option<f64>,
    pub gamma_agrees: Option<bool>,
    pub orientation: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientSummary {
    pub max_quotient: f64,
    pub max_principle_holds: bool,
    pub stopped_at: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    /// Max of |u(0,s) - 1| over the last decade of resolved (T - t).
    pub last_decade_max_dev: f64,
    pub last_decade_samples: usize,
    pub final_u0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeSummary {
    pub mode: usize,
    pub measured_rate: f64,
    pub expected_rate: f64,
    pub trace_samples: usize,
    pub truncated: bool,
    pub kappa_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub passed: bool,
    pub assertions: Vec<AssertionOutcome>,
    pub blowup: Option<BlowupSummary>,
    pub zeros: Option<ZeroSummary>,
    pub quotient: Option<QuotientSummary>,
    pub rescaled_profile: Option<ProfileSummary>,
    pub modes: Option<ModeSummary>,
    pub steps: u64,
    pub wall_seconds: f64,
}

/// 17-significant-digit scientific form: lossless for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn trajectory_csv(report: &BlowupReport) -> String {
    let mut s = String::from("t,sup_a,sup_b,sup_z,b_zero_count,type1\n");
    for row in &report.trajectory {
        let type1 = report
            .t_est
            .filter(|t_est| row.t < *t_est)
            .map(|t_est| (t_est - row.t) * (row.sup_a + row.sup_b));
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(row.t),
            fmt_f64(row.sup_a),
            fmt_f64(row.sup_b),
            fmt_f64(row.sup_z),
            row.b_zero_count,
            fmt_opt(type1),
        );
    }
    s
}

pub fn zeros_csv(track: &ZeroTrack) -> String {
    let mut s = String::from("t,count,gamma,zeros\n");
    for sample in &track.samples {
        let zeros = sample
            .zeros
            .iter()
            .map(|z| fmt_f64(*z))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(sample.t),
            sample.count,
            fmt_opt(sample.gamma),
            zeros,
        );
    }
    s
}

pub fn modes_csv(trace: &ModeTrace) -> String {
    let mut s = String::from(
        "s,alpha,beta,gamma_c,w_rho_sq,mu,nu,q_rho_sq,x,y,z,kappa,r_x,r_y,r_z,window_bound\n",
    );
    for sample in &trace.samples {
        let m = &sample.modes;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(sample.s),
            fmt_f64(m.alpha),
            fmt_f64(m.beta),
            fmt_f64(m.gamma_c),
            fmt_f64(m.w_rho_sq),
            fmt_f64(m.mu),
            fmt_f64(m.nu),
            fmt_f64(m.q_rho_sq),
            fmt_f64(m.x),
            fmt_f64(m.y),
            fmt_f64(m.z),
            fmt_f64(m.kappa),
            fmt_opt(sample.r_x),
            fmt_opt(sample.r_y),
            fmt_opt(sample.r_z),
            fmt_f64(sample.window_bound),
        );
    }
    s
}

pub fn write_artifacts(
    dir: &Path,
    report: &RunReport,
    solver_report: Option<&BlowupReport>,
    track: Option<&ZeroTrack>,
    trace: Option<&ModeTrace>,
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(report).expect("report serializes") + "\n",
    )?;
    if let Some(rep) = solver_report {
        fs::write(dir.join("trajectory.csv"), trajectory_csv(rep))?;
    }
    if let Some(track) = track {
        fs::write(dir.join("zeros.csv"), zeros_csv(track))?;
    }
    if let Some(trace) = trace {
        fs::write(dir.join("modes.csv"), modes_csv(trace))?;
    }
    Ok(())
}
