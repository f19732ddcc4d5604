//! Wires configuration, solver, analyses and assertions into one run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use blowup_core::{
    build_hermite_basis, build_quadrature, default_delta_floor, frame_from_fns, gamma_at_blowup,
    kappa_monitor, quotient_monitor, run, run_rescaled, track, validate_constants, BlowupReport,
    ModeTrace, Orientation, RescaledConfig, RunOutput, SolverConfig, SpatialGrid, ZeroTrack,
};

use crate::config::{validate, InitialData, ScenarioConfig};
use crate::report::{
    write_artifacts, AssertionOutcome, BlowupSummary, ModeSummary, ProfileSummary,
    QuotientSummary, RunReport, ZeroSummary,
};
use crate::scenarios::build_initial_state;

/// Non-assertion failures, mapped to exit codes by the binary.
#[derive(Debug)]
pub enum Failure {
    /// Invalid configuration; nothing was computed.
    Config(String),
    /// The pipeline itself failed (solver death, I/O, ...).
    Runtime(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Runtime(m) => write!(f, "runtime failure: {m}"),
        }
    }
}

/// Executes a validated configuration and writes `report.json` plus the CSV
/// artifacts into the output directory.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport, Failure> {
    validate(cfg).map_err(|e| Failure::Config(e.to_string()))?;
    let started = Instant::now();
    let out_dir = PathBuf::from(&cfg.output.dir);

    if matches!(cfg.initial, InitialData::ModeRates { .. }) {
        return run_mode_rates(cfg, &out_dir, started);
    }

    let state = build_initial_state(cfg)
        .map_err(|e| Failure::Config(e.to_string()))?
        .expect("physical scenarios have a state");
    let grid = state.grid.clone();
    let initial_b = state.b.clone();

    let mut solver_cfg = SolverConfig::new(grid.clone(), cfg.solver.t_end);
    solver_cfg.blowup_threshold = cfg.solver.threshold;
    solver_cfg.dt_safety = cfg.solver.dt_safety;
    solver_cfg.rate_fit_window = cfg.solver.rate_fit_window;
    solver_cfg.workers = cfg.solver.workers;

    let output: RunOutput = run(state, &solver_cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
    let solver_report = &output.report;
    if let Some(t) = solver_report.died_at {
        return Err(Failure::Runtime(format!(
            "solver state went non-finite at t = {t}; raise the grid resolution or lower the \
             threshold"
        )));
    }

    let zero_track = if cfg.analysis.zeros {
        Some(track(&output.history))
    } else {
        None
    };
    let gamma = zero_track
        .as_ref()
        .and_then(|tr| gamma_at_blowup(tr, solver_report, &grid));
    let zero_summary = zero_track.as_ref().map(|tr| ZeroSummary {
        initial_count: tr.samples.first().map(|s| s.count).unwrap_or(0),
        final_count: tr.samples.last().map(|s| s.count).unwrap_or(0),
        monotonicity_violations: tr.monotonicity_violations.len(),
        degenerate: tr.degenerate,
        gamma_at_t_est: gamma.map(|g| g.gamma_t),
        gamma_gap: gamma.map(|g| g.gap),
        gamma_agrees: gamma.map(|g| g.agrees),
        orientation: tr.orientation.map(|o| {
            match o {
                Orientation::NegativeToPositive => "negative_to_positive",
                Orientation::PositiveToNegative => "positive_to_negative",
            }
            .to_string()
        }),
    });

    let quotient = if cfg.analysis.quotient {
        let region = (-0.5 * grid.half_width(), 0.5 * grid.half_width());
        let floor = default_delta_floor(&initial_b);
        match quotient_monitor(&output.history, region, floor) {
            Ok(m) => Some(m),
            Err(e) => return Err(Failure::Runtime(format!("quotient monitor: {e}"))),
        }
    } else {
        None
    };
    let quotient_summary = quotient.as_ref().map(|m| QuotientSummary {
        max_quotient: m.max_quotient(),
        max_principle_holds: m.max_principle_holds(1e-3),
        stopped_at: m.stopped_at,
        samples: m.samples.len(),
    });

    let profile = if cfg.analysis.selfsimilar {
        profile_summary(solver_report)
    } else {
        None
    };

    let assertions = physical_assertions(
        cfg,
        solver_report,
        zero_track.as_ref(),
        gamma,
        quotient_summary.as_ref(),
        profile.as_ref(),
        &grid,
    );
    let passed = assertions.iter().all(|a| a.passed);

    let report = RunReport {
        config: cfg.clone(),
        passed,
        assertions,
        blowup: Some(BlowupSummary::from_report(solver_report)),
        zeros: zero_summary,
        quotient: quotient_summary,
        rescaled_profile: profile,
        modes: None,
        steps: solver_report.steps,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    write_artifacts(
        &out_dir,
        &report,
        Some(solver_report),
        zero_track.as_ref(),
        None,
    )
    .map_err(|e| Failure::Runtime(format!("writing artifacts: {e}")))?;
    Ok(report)
}

/// `u(0, s) = (T_est - t) a(0, t)` over the last decade of resolved `T - t`.
fn profile_summary(report: &BlowupReport) -> Option<ProfileSummary> {
    let t_est = report.t_est?;
    let last = report.trajectory.last()?;
    let w_last = t_est - last.t;
    if !(w_last > 0.0) {
        return None;
    }
    let mut max_dev = 0.0f64;
    let mut count = 0usize;
    let mut final_u0 = 0.0;
    for row in &report.trajectory {
        let w = t_est - row.t;
        if w <= 10.0 * w_last && w > 0.0 {
            let u0 = w * row.center_a;
            max_dev = max_dev.max((u0 - 1.0).abs());
            count += 1;
            final_u0 = u0;
        }
    }
    Some(ProfileSummary {
        last_decade_max_dev: max_dev,
        last_decade_samples: count,
        final_u0,
    })
}

fn physical_assertions(
    cfg: &ScenarioConfig,
    report: &BlowupReport,
    zero_track: Option<&ZeroTrack>,
    gamma: Option<blowup_core::GammaAtBlowup>,
    quotient: Option<&QuotientSummary>,
    profile: Option<&ProfileSummary>,
    grid: &SpatialGrid,
) -> Vec<AssertionOutcome> {
    let mut out = Vec::new();
    let initial_sup = report.trajectory.first().map(|s| s.sup_z).unwrap_or(0.0);
    let final_sup = report.trajectory.last().map(|s| s.sup_z).unwrap_or(0.0);
    let max_sup = report
        .trajectory
        .iter()
        .fold(0.0f64, |m, s| m.max(s.sup_z));

    match &cfg.initial {
        InitialData::OdeConstant { a0, b0, .. } => {
            let sol = blowup_core::ode_solve(*a0, *b0);
            // oracle checkpoint: halfway to the pole, or t = 5 for globals
            let checkpoint = match sol.blow_up_time() {
                Some(t1) => 0.5 * t1,
                None => cfg.solver.t_end.min(5.0),
            };
            let mut err = f64::NAN;
            let mut at = f64::NAN;
            for row in &report.trajectory {
                if row.t <= checkpoint {
                    at = row.t;
                    if let Ok((ae, be)) = sol.eval(row.t) {
                        err = (row.center_a - ae).abs().max((row.center_b - be).abs());
                    }
                }
            }
            out.push(AssertionOutcome::new(
                "matches the exact homogeneous solution",
                err <= 1e-5,
                err,
                1e-5,
                format!("max component error at t = {at:.6}"),
            ));
            if let Some(t1) = sol.blow_up_time() {
                let t_est = report.t_est.unwrap_or(f64::NAN);
                out.push(AssertionOutcome::new(
                    "blow-up detected",
                    report.blew_up,
                    report.blew_up as u8 as f64,
                    1.0,
                    "threshold crossing for real positive data",
                ));
                out.push(AssertionOutcome::new(
                    "blow-up time matches 1/a0",
                    (t_est - t1).abs() <= 1e-3,
                    (t_est - t1).abs(),
                    1e-3,
                    format!("T_est = {t_est:.6}, exact T = {t1:.6}"),
                ));
                let q = report.rate.map(|r| r.exponent).unwrap_or(f64::NAN);
                out.push(AssertionOutcome::new(
                    "rate exponent is 1",
                    (q - 1.0).abs() <= 0.1,
                    q,
                    0.1,
                    "log-log fit of sup|z| against (T_est - t)",
                ));
            } else {
                out.push(AssertionOutcome::new(
                    "no blow-up for global data",
                    !report.blew_up,
                    report.blew_up as u8 as f64,
                    0.0,
                    "threshold never crossed",
                ));
            }
        }
        InitialData::Remark33 { .. } => {
            out.push(AssertionOutcome::new(
                "blow-up detected",
                report.blew_up,
                report.blew_up as u8 as f64,
                1.0,
                "sup|z| crossed the threshold",
            ));
            out.push(AssertionOutcome::new(
                "boundary stays uncontaminated",
                report.boundary_ok,
                report.boundary_contamination,
                0.01,
                "max boundary |z| relative to the sup norm",
            ));
            if let Some(tr) = zero_track {
                let max_count = tr.samples.iter().map(|s| s.count).max().unwrap_or(0);
                let min_count = tr.samples.iter().map(|s| s.count).min().unwrap_or(0);
                out.push(AssertionOutcome::new(
                    "imaginary part keeps exactly one zero",
                    max_count == 1 && min_count == 1,
                    max_count as f64,
                    1.0,
                    format!("counts in [{min_count}, {max_count}] across {} samples", tr.samples.len()),
                ));
                out.push(AssertionOutcome::new(
                    "zero count never increases",
                    tr.monotonicity_violations.is_empty(),
                    tr.monotonicity_violations.len() as f64,
                    0.0,
                    "discretization artifacts would show up here",
                ));
                // continuity proxy: |d gamma| <= sqrt(dt) + 2 dx between samples
                let series = tr.gamma_series();
                let mut worst = f64::NEG_INFINITY;
                for w in series.windows(2) {
                    let bound = (w[1].0 - w[0].0).sqrt() + 2.0 * grid.spacing();
                    worst = worst.max((w[1].1 - w[0].1).abs() - bound);
                }
                out.push(AssertionOutcome::new(
                    "zero path has no jumps",
                    worst <= 0.0,
                    worst,
                    0.0,
                    "max excess of |d gamma| over sqrt(dt) + 2 dx",
                ));
            }
            if let Some(g) = gamma {
                out.push(AssertionOutcome::new(
                    "blow-up point equals the zero limit",
                    g.agrees,
                    g.gap,
                    3.0 * grid.spacing(),
                    format!("gamma(T) = {:.6}, x_blowup = {:.6}", g.gamma_t,
                        report.x_blowup.unwrap_or(f64::NAN)),
                ));
            }
            if let Some(p) = profile {
                out.push(AssertionOutcome::new(
                    "rescaled center profile approaches 1",
                    p.last_decade_max_dev <= 0.15,
                    p.last_decade_max_dev,
                    0.15,
                    format!(
                        "max |u(0,s) - 1| over the last decade ({} samples)",
                        p.last_decade_samples
                    ),
                ));
            }
        }
        InitialData::Theorem11 { .. } | InitialData::Theorem12 { .. } => {
            out.push(AssertionOutcome::new(
                "no blow-up",
                !report.blew_up,
                report.blew_up as u8 as f64,
                0.0,
                "threshold never crossed",
            ));
            out.push(AssertionOutcome::new(
                "sup norm stays bounded by twice its initial value",
                max_sup <= 2.0 * initial_sup,
                max_sup / initial_sup,
                2.0,
                format!("max sup|z| = {max_sup:.4}, initial = {initial_sup:.4}"),
            ));
            out.push(AssertionOutcome::new(
                "solution decays below 10% of its initial size",
                final_sup <= 0.1 * initial_sup,
                final_sup / initial_sup,
                0.1,
                format!("final sup|z| = {final_sup:.5}"),
            ));
            if let Some(q) = quotient {
                out.push(AssertionOutcome::new(
                    "quotient maximum principle",
                    q.max_principle_holds && q.stopped_at.is_none(),
                    q.max_quotient,
                    1e-3,
                    "interior sup of a/b against its parabolic-boundary sup",
                ));
            }
            if matches!(cfg.initial, InitialData::Theorem12 { .. }) {
                // the builder re-checks these; reaching this point means the
                // pointwise hypotheses held
                out.push(AssertionOutcome::new(
                    "construction hypotheses hold pointwise",
                    true,
                    1.0,
                    1.0,
                    "0 <= a0 <= M, a0 not identically M, 0 <= b0 <= L, far-field limits",
                ));
            }
        }
        InitialData::ModeRates { .. } => unreachable!("handled separately"),
        InitialData::Custom { .. } => {
            // no built-in claims for user data; completion is the outcome
            out.push(AssertionOutcome::new(
                "run completed",
                true,
                1.0,
                1.0,
                if report.blew_up {
                    "blow-up detected; see report fields"
                } else {
                    "reached t_end"
                },
            ));
        }
    }
    out
}

fn run_mode_rates(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    started: Instant,
) -> Result<RunReport, Failure> {
    let InitialData::ModeRates { mode, amplitude } = cfg.initial else {
        unreachable!()
    };
    let ledger = validate_constants(
        cfg.rescaled.eta_bar,
        cfg.rescaled.zeta_bar,
        cfg.rescaled.eps_bar,
        cfg.rescaled.eps1,
    )
    .map_err(|e| Failure::Config(e.to_string()))?;
    let quad = build_quadrature(cfg.rescaled.y_half_width, cfg.rescaled.y_n_points)
        .map_err(|e| Failure::Config(e.to_string()))?;
    let basis =
        build_hermite_basis(4, &quad).map_err(|e| Failure::Runtime(e.to_string()))?;
    let y_grid = SpatialGrid::new(cfg.rescaled.y_half_width, cfg.rescaled.y_n_points)
        .map_err(|e| Failure::Config(e.to_string()))?;

    let phi = basis.values(mode).to_vec();
    let frame = {
        let mut f = frame_from_fns(&y_grid, |_| 1.0, |_| 0.0);
        for (v, p) in f.v.iter_mut().zip(&phi) {
            *v = amplitude * p;
        }
        f
    };
    let rescaled_cfg = RescaledConfig {
        s_end: cfg.rescaled.s_end,
        dt_safety: cfg.solver.dt_safety,
        sample_interval: 0.01,
        delta_bar: cfg.rescaled.delta_bar,
        r_bar: cfg.rescaled.r_bar,
        workers: cfg.solver.workers,
    };
    let trace = run_rescaled(&frame, &rescaled_cfg, &basis, &ledger)
        .map_err(|e| Failure::Runtime(e.to_string()))?;

    let measured = measured_mode_rate(&trace, mode);
    let expected = 1.0 - 0.5 * mode as f64;
    let tolerance = rate_tolerance(mode);
    let kappa = kappa_monitor(&trace, &ledger);

    let assertions = vec![
        AssertionOutcome::new(
            "trace completed",
            !trace.truncated,
            trace.truncated as u8 as f64,
            0.0,
            format!("{} samples", trace.samples.len()),
        ),
        AssertionOutcome::new(
            "mode grows at its linearized rate",
            (measured - expected).abs() <= tolerance,
            measured,
            tolerance,
            format!("mode {mode}: measured {measured:.4}, expected {expected}"),
        ),
        AssertionOutcome::new(
            "kappa never turns negative in the flat regime",
            kappa.violations == 0,
            kappa.violations as f64,
            0.0,
            format!("{} sign changes observed", kappa.transitions.len()),
        ),
    ];
    let passed = assertions.iter().all(|a| a.passed);

    let report = RunReport {
        config: cfg.clone(),
        passed,
        assertions,
        blowup: None,
        zeros: None,
        quotient: None,
        rescaled_profile: None,
        modes: Some(ModeSummary {
            mode,
            measured_rate: measured,
            expected_rate: expected,
            trace_samples: trace.samples.len(),
            truncated: trace.truncated,
            kappa_violations: kappa.violations,
        }),
        steps: 0,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    write_artifacts(out_dir, &report, None, None, Some(&trace))
        .map_err(|e| Failure::Runtime(format!("writing artifacts: {e}")))?;
    Ok(report)
}

/// Per-mode tolerance on the measured exponential rate: 5% of the unit rate,
/// halved for the k = 1 rate of one half.
pub fn rate_tolerance(mode: usize) -> f64 {
    match mode {
        1 => 0.025,
        _ => 0.05,
    }
}

/// Least-squares slope of `ln |coefficient|` against `s` over the trace.
pub fn measured_mode_rate(trace: &ModeTrace, mode: usize) -> f64 {
    let coef = |m: &blowup_core::ModeDecomposition| match mode {
        0 => m.alpha,
        1 => m.beta,
        _ => m.gamma_c,
    };
    let pts: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .filter_map(|s| {
            let c = coef(&s.modes).abs();
            if c > 0.0 {
                Some((s.s, c.ln()))
            } else {
                None
            }
        })
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in &pts {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
