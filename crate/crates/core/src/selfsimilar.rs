//! Self-similar variables around a blow-up candidate `(xi, T)` and a direct
//! integrator for the rescaled system
//!
//! ```text
//! u_s = u_yy - (y/2) u_y - u + u^2 - v^2,
//! v_s = v_yy - (y/2) v_y - v + 2uv,
//! ```
//!
//! with `u(y,s) = (T-t) a(xi + e^{-s/2} y, t)`, `v` likewise, and
//! `s = -log(T-t)`. The rescaled fields are integrated directly on a fixed
//! `y` grid; the drift term advects outward, so it is upwinded at the two
//! outermost node pairs where a centered stencil has no stable neighbor.
//!
//! Along a run the integrator projects `v` onto the low eigenmodes and
//! records the functionals `X`, `Y`, `Z` and `kappa = eta_bar X - Y - Z`
//! together with residuals of the differential inequalities they satisfy in
//! the near-constant-profile regime.

use crate::error::{CoreError, Result};
use crate::grid::{check_finite, sup_abs, PdeState, SpatialGrid};
use crate::hermite::{project_modes, HermiteBasis, ModeDecomposition};
use crate::interp::cubic_interpolate;
use crate::parallel::chunked_fill2;
use crate::quadrature::central_derivative;

/// Rescaled fields on a `y` grid at self-similar time `s`, anchored at
/// center `xi` and blow-up time `t_blowup`.
#[derive(Debug, Clone)]
pub struct SelfSimilarFrame {
    pub xi: f64,
    pub t_blowup: f64,
    pub s: f64,
    pub y_grid: SpatialGrid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Rescales a physical state to self-similar variables by cubic
/// interpolation. Fails when `t >= T` or when any `y` node maps outside the
/// physical grid's interpolation range (the count is reported).
pub fn to_selfsimilar(
    state: &PdeState,
    xi: f64,
    t_blowup: f64,
    y_grid: &SpatialGrid,
) -> Result<SelfSimilarFrame> {
    if !(state.t < t_blowup) {
        return Err(CoreError::PastBlowup {
            t: state.t,
            t_blowup,
        });
    }
    let tau = t_blowup - state.t;
    let s = -tau.ln();
    let scale = tau.sqrt(); // e^{-s/2}
    let x0 = state.grid.x_min();
    let dx = state.grid.spacing();

    let n = y_grid.n_points();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut missing = 0usize;
    for i in 0..n {
        let x = xi + scale * y_grid.node(i);
        match (
            cubic_interpolate(x0, dx, &state.a, x),
            cubic_interpolate(x0, dx, &state.b, x),
        ) {
            (Some(a), Some(b)) => {
                u[i] = tau * a;
                v[i] = tau * b;
            }
            _ => missing += 1,
        }
    }
    if missing > 0 {
        return Err(CoreError::Truncated { count: missing });
    }
    Ok(SelfSimilarFrame {
        xi,
        t_blowup,
        s,
        y_grid: y_grid.clone(),
        u,
        v,
    })
}

/// Inverse map: evaluates the frame on a physical grid. Only physical nodes
/// whose rescaled image lies inside the frame's interpolation range are
/// produced; others are rejected with a count.
pub fn to_physical(frame: &SelfSimilarFrame, x_grid: &SpatialGrid) -> Result<PdeState> {
    let tau = (-frame.s).exp();
    let inv_scale = 1.0 / tau.sqrt();
    let y0 = frame.y_grid.x_min();
    let dy = frame.y_grid.spacing();
    let n = x_grid.n_points();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut missing = 0usize;
    for i in 0..n {
        let y = (x_grid.node(i) - frame.xi) * inv_scale;
        match (
            cubic_interpolate(y0, dy, &frame.u, y),
            cubic_interpolate(y0, dy, &frame.v, y),
        ) {
            (Some(u), Some(v)) => {
                a[i] = u / tau;
                b[i] = v / tau;
            }
            _ => missing += 1,
        }
    }
    if missing > 0 {
        return Err(CoreError::Truncated { count: missing });
    }
    PdeState::new(x_grid.clone(), a, b, frame.t_blowup - tau)
}

fn rescaled_rhs_into(frame: &SelfSimilarFrame, workers: usize, du: &mut [f64], dv: &mut [f64]) {
    let n = frame.u.len();
    let dy = frame.y_grid.spacing();
    let inv_dy2 = 1.0 / (dy * dy);
    let inv_2dy = 1.0 / (2.0 * dy);
    let inv_dy = 1.0 / dy;
    let u = &frame.u;
    let v = &frame.v;
    let grid = &frame.y_grid;
    chunked_fill2(workers, du, dv, |start, cu, cv| {
        for (k, (ou, ov)) in cu.iter_mut().zip(cv.iter_mut()).enumerate() {
            let i = start + k;
            let y = grid.node(i);
            // one-sided second differences at the ends (exact for quadratics)
            let (uyy, vyy) = if i == 0 {
                (
                    (u[0] - 2.0 * u[1] + u[2]) * inv_dy2,
                    (v[0] - 2.0 * v[1] + v[2]) * inv_dy2,
                )
            } else if i == n - 1 {
                (
                    (u[n - 1] - 2.0 * u[n - 2] + u[n - 3]) * inv_dy2,
                    (v[n - 1] - 2.0 * v[n - 2] + v[n - 3]) * inv_dy2,
                )
            } else {
                (
                    ((u[i + 1] + u[i - 1]) - 2.0 * u[i]) * inv_dy2,
                    ((v[i + 1] + v[i - 1]) - 2.0 * v[i]) * inv_dy2,
                )
            };
            // drift -(y/2) d/dy: upwind (toward the interior) at the two
            // outermost node pairs, centered elsewhere
            let (uy, vy) = if i <= 1 {
                ((u[i + 1] - u[i]) * inv_dy, (v[i + 1] - v[i]) * inv_dy)
            } else if i >= n - 2 {
                ((u[i] - u[i - 1]) * inv_dy, (v[i] - v[i - 1]) * inv_dy)
            } else {
                ((u[i + 1] - u[i - 1]) * inv_2dy, (v[i + 1] - v[i - 1]) * inv_2dy)
            };
            let half_y = 0.5 * y;
            *ou = uyy - half_y * uy - u[i] + u[i] * u[i] - v[i] * v[i];
            *ov = vyy - half_y * vy - v[i] + 2.0 * u[i] * v[i];
        }
    });
}

/// Right-hand side of the rescaled system on the frame's grid.
pub fn rescaled_rhs(frame: &SelfSimilarFrame) -> (Vec<f64>, Vec<f64>) {
    let n = frame.u.len();
    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    rescaled_rhs_into(frame, 1, &mut du, &mut dv);
    (du, dv)
}

/// Positive constants entering the mode-dynamics estimates. Validity means
/// all four inequalities hold:
///
/// ```text
/// 2((1 + zeta)/eta + zeta) < eps1
/// eps ((1/eta)(1/zeta + 1) + 1/zeta) < 1/8
/// (1/4 - 2 eps) eta - (2 + eta^2) eps > 0
/// eps eta < 1/8
/// ```
///
/// with `eps` constrained to `(0, 1/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsLedger {
    pub eta_bar: f64,
    pub zeta_bar: f64,
    pub eps_bar: f64,
    pub eps1: f64,
}

/// Checks the constants and returns the ledger, or the full list of violated
/// inequalities. Nothing is accepted silently.
pub fn validate_constants(
    eta_bar: f64,
    zeta_bar: f64,
    eps_bar: f64,
    eps1: f64,
) -> Result<ConstantsLedger> {
    let mut violations = Vec::new();
    for (name, v) in [
        ("eta_bar", eta_bar),
        ("zeta_bar", zeta_bar),
        ("eps_bar", eps_bar),
        ("eps1", eps1),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            violations.push(format!("{name} must be positive, got {v}"));
        }
    }
    if violations.is_empty() {
        if eps_bar >= 0.25 {
            violations.push(format!("eps_bar must lie in (0, 1/4), got {eps_bar}"));
        }
        let i1 = 2.0 * ((1.0 + zeta_bar) / eta_bar + zeta_bar);
        if !(i1 < eps1) {
            violations.push(format!("2((1+zeta)/eta + zeta) = {i1:.6} must be < eps1 = {eps1}"));
        }
        let i2 = eps_bar * ((1.0 / eta_bar) * (1.0 / zeta_bar + 1.0) + 1.0 / zeta_bar);
        if !(i2 < 0.125) {
            violations.push(format!(
                "eps((1/eta)(1/zeta + 1) + 1/zeta) = {i2:.6} must be < 1/8"
            ));
        }
        let i3 = (0.25 - 2.0 * eps_bar) * eta_bar - (2.0 + eta_bar * eta_bar) * eps_bar;
        if !(i3 > 0.0) {
            violations.push(format!(
                "(1/4 - 2 eps) eta - (2 + eta^2) eps = {i3:.6} must be > 0"
            ));
        }
        let i4 = eps_bar * eta_bar;
        if !(i4 < 0.125) {
            violations.push(format!("eps * eta = {i4:.6} must be < 1/8"));
        }
    }
    if violations.is_empty() {
        Ok(ConstantsLedger {
            eta_bar,
            zeta_bar,
            eps_bar,
            eps1,
        })
    } else {
        Err(CoreError::LedgerRejected(violations))
    }
}

/// Coarse grid search for an admissible `(eta, zeta, eps)` at the given
/// `eps1`. Returns the first valid ledger scanned.
pub fn search_constants(eps1: f64) -> Option<ConstantsLedger> {
    for eta_exp in -4..=4 {
        let eta = 2f64.powi(eta_exp);
        for zeta_exp in -4..=4 {
            let zeta = 2f64.powi(zeta_exp);
            for eps_exp in 4..=14 {
                let eps = 2f64.powi(-eps_exp);
                if let Ok(ledger) = validate_constants(eta, zeta, eps, eps1) {
                    return Some(ledger);
                }
            }
        }
    }
    None
}

/// Integration and sampling parameters for [`run_rescaled`].
#[derive(Debug, Clone)]
pub struct RescaledConfig {
    pub s_end: f64,
    pub dt_safety: f64,
    /// Spacing of trace samples in `s`.
    pub sample_interval: f64,
    /// Profile-flatness threshold entering the monitored regime.
    pub delta_bar: f64,
    /// Half-width of the window on which flatness is measured.
    pub r_bar: f64,
    pub workers: usize,
}

impl Default for RescaledConfig {
    fn default() -> Self {
        Self {
            s_end: 2.0,
            dt_safety: 0.3,
            sample_interval: 0.01,
            delta_bar: 0.05,
            r_bar: 5.0,
            workers: 1,
        }
    }
}

/// One trace sample: mode content of `v` plus regime and residual data.
#[derive(Debug, Clone, Copy)]
pub struct ModeTraceSample {
    pub s: f64,
    pub modes: ModeDecomposition,
    /// `sup over |y| < r_bar of (|u - 1| + |u_y|)`.
    pub window_bound: f64,
    /// Residual of `dX/ds > X/4 - eps(Y + Z)`; nonnegative when it holds.
    pub r_x: Option<f64>,
    /// Residual of `|dY/ds| < eps(X + Y + Z)`.
    pub r_y: Option<f64>,
    /// Residual of `dZ/ds < -Z/4 + eps(X + Y)`.
    pub r_z: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ModeTrace {
    pub samples: Vec<ModeTraceSample>,
    /// Set when integration diverged and the trace was cut short.
    pub truncated: bool,
    pub delta_bar: f64,
    pub r_bar: f64,
}

/// `sup over |y| <= r_bar` of `|u - 1| + |u_y|`, with the derivative by
/// centered differences.
pub fn window_bound(frame: &SelfSimilarFrame, r_bar: f64) -> f64 {
    let uy = central_derivative(&frame.u, frame.y_grid.spacing());
    let mut m = 0.0f64;
    for i in 0..frame.u.len() {
        if frame.y_grid.node(i).abs() <= r_bar {
            m = m.max((frame.u[i] - 1.0).abs() + uy[i].abs());
        }
    }
    m
}

/// Integrates the rescaled system from `frame0` to `cfg.s_end`, projecting
/// the modes every `cfg.sample_interval` and filling inequality residuals by
/// centered differences of the trace afterwards.
pub fn run_rescaled(
    frame0: &SelfSimilarFrame,
    cfg: &RescaledConfig,
    basis: &HermiteBasis,
    ledger: &ConstantsLedger,
) -> Result<ModeTrace> {
    if basis.quad().len() != frame0.y_grid.n_points()
        || (basis.quad().half_width() - frame0.y_grid.half_width()).abs() > 1e-12
    {
        return Err(CoreError::InvalidConfig(
            "basis quadrature must live on the frame's y grid".into(),
        ));
    }
    if !(cfg.s_end > frame0.s) {
        return Err(CoreError::InvalidConfig(format!(
            "s_end = {} must exceed the frame time s = {}",
            cfg.s_end, frame0.s
        )));
    }
    check_finite(&frame0.u)?;
    check_finite(&frame0.v)?;

    let dy = frame0.y_grid.spacing();
    let hw = frame0.y_grid.half_width();
    let n = frame0.y_grid.n_points();

    let mut frame = frame0.clone();
    let mut samples = Vec::new();
    let mut truncated = false;
    let mut next_sample = frame.s;

    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    let mut mid = frame.clone();

    loop {
        if frame.s >= next_sample - 1e-12 {
            let vp = central_derivative(&frame.v, dy);
            let modes = project_modes(&frame.v, &vp, basis, ledger.eta_bar)?;
            samples.push(ModeTraceSample {
                s: frame.s,
                modes,
                window_bound: window_bound(&frame, cfg.r_bar),
                r_x: None,
                r_y: None,
                r_z: None,
            });
            next_sample += cfg.sample_interval;
        }
        if frame.s >= cfg.s_end - 1e-12 {
            break;
        }

        let sup = sup_abs(&frame.u) + sup_abs(&frame.v);
        let dt_stab = (0.5 * dy * dy).min(dy / (0.5 * hw)).min(1.0 / (1.0 + sup));
        let dt = (cfg.dt_safety * dt_stab).min(next_sample - frame.s).min(cfg.s_end - frame.s);

        rescaled_rhs_into(&frame, cfg.workers, &mut du, &mut dv);
        for i in 0..n {
            mid.u[i] = frame.u[i] + 0.5 * dt * du[i];
            mid.v[i] = frame.v[i] + 0.5 * dt * dv[i];
        }
        rescaled_rhs_into(&mid, cfg.workers, &mut du, &mut dv);
        for i in 0..n {
            frame.u[i] += dt * du[i];
            frame.v[i] += dt * dv[i];
        }
        frame.s += dt;

        if !(frame.u.iter().all(|x| x.is_finite()) && frame.v.iter().all(|x| x.is_finite())) {
            truncated = true;
            break;
        }
    }

    // Residuals from centered differences of X, Y, Z over the trace.
    let eps = ledger.eps_bar;
    for k in 1..samples.len().saturating_sub(1) {
        let ds = samples[k + 1].s - samples[k - 1].s;
        if ds <= 0.0 {
            continue;
        }
        let dx = (samples[k + 1].modes.x - samples[k - 1].modes.x) / ds;
        let dyy = (samples[k + 1].modes.y - samples[k - 1].modes.y) / ds;
        let dz = (samples[k + 1].modes.z - samples[k - 1].modes.z) / ds;
        let m = samples[k].modes;
        samples[k].r_x = Some(dx - (0.25 * m.x - eps * (m.y + m.z)));
        samples[k].r_y = Some(eps * (m.x + m.y + m.z) - dyy.abs());
        samples[k].r_z = Some((-0.25 * m.z + eps * (m.x + m.y)) - dz);
    }

    Ok(ModeTrace {
        samples,
        truncated,
        delta_bar: cfg.delta_bar,
        r_bar: cfg.r_bar,
    })
}

/// A sign change of `kappa` between consecutive trace samples.
#[derive(Debug, Clone, Copy)]
pub struct KappaTransition {
    pub s: f64,
    pub downward: bool,
    /// Both neighboring samples sit in the flat-profile regime.
    pub in_regime: bool,
}

/// Summary of the sign behavior of `kappa` along a trace.
#[derive(Debug, Clone)]
pub struct KappaReport {
    pub transitions: Vec<KappaTransition>,
    /// Downward (`kappa >= 0` to `kappa < 0`) transitions inside the regime:
    /// these contradict the once-positive-stays-positive property.
    pub violations: usize,
    /// Of the in-regime samples with `kappa < 0`, how many satisfy
    /// `zeta Y < Z`, and how many there are in total.
    pub zeta_holds: usize,
    pub zeta_total: usize,
}

/// Scans a trace for sign changes of `kappa`, flagging downward transitions
/// that occur while the profile is flat (`window_bound < delta_bar`), and
/// reporting whether `zeta Y < Z` accompanies negative `kappa` there.
pub fn kappa_monitor(trace: &ModeTrace, ledger: &ConstantsLedger) -> KappaReport {
    let mut transitions = Vec::new();
    let mut violations = 0;
    let mut zeta_holds = 0;
    let mut zeta_total = 0;

    for w in trace.samples.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        let was_nonneg = prev.modes.kappa >= 0.0;
        let is_nonneg = cur.modes.kappa >= 0.0;
        if was_nonneg != is_nonneg {
            let in_regime =
                prev.window_bound < trace.delta_bar && cur.window_bound < trace.delta_bar;
            let downward = was_nonneg && !is_nonneg;
            if downward && in_regime {
                violations += 1;
            }
            transitions.push(KappaTransition {
                s: cur.s,
                downward,
                in_regime,
            });
        }
    }
    for sample in &trace.samples {
        if sample.modes.kappa < 0.0 && sample.window_bound < trace.delta_bar {
            zeta_total += 1;
            if ledger.zeta_bar * sample.modes.y < sample.modes.z {
                zeta_holds += 1;
            }
        }
    }

    KappaReport {
        transitions,
        violations,
        zeta_holds,
        zeta_total,
    }
}

/// Builds a frame on `y_grid` at `s = 0` from closures for `u` and `v`.
pub fn frame_from_fns(
    y_grid: &SpatialGrid,
    fu: impl Fn(f64) -> f64,
    fv: impl Fn(f64) -> f64,
) -> SelfSimilarFrame {
    let u: Vec<f64> = (0..y_grid.n_points()).map(|i| fu(y_grid.node(i))).collect();
    let v: Vec<f64> = (0..y_grid.n_points()).map(|i| fv(y_grid.node(i))).collect();
    SelfSimilarFrame {
        xi: 0.0,
        t_blowup: 1.0,
        s: 0.0,
        y_grid: y_grid.clone(),
        u,
        v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::build_hermite_basis;
    use crate::quadrature::build_quadrature;
    use approx::assert_relative_eq;

    fn y_grid() -> SpatialGrid {
        SpatialGrid::new(20.0, 2001).unwrap()
    }

    fn ledger() -> ConstantsLedger {
        validate_constants(2.0, 0.5, 0.01, 5.0).unwrap()
    }

    #[test]
    fn constant_state_rescales_to_unit_profile() {
        let grid = SpatialGrid::new(10.0, 401).unwrap();
        let t = 0.75;
        let t_blowup = 1.0;
        let tau = t_blowup - t;
        let mut state = PdeState::from_fns(grid, |_| 1.0 / tau, |_| 0.0).unwrap();
        state.t = t;
        let yg = SpatialGrid::new(10.0, 201).unwrap();
        let frame = to_selfsimilar(&state, 0.0, t_blowup, &yg).unwrap();
        assert_relative_eq!(frame.s, -tau.ln(), max_relative = 1e-14);
        for &u in &frame.u {
            assert_relative_eq!(u, 1.0, max_relative = 1e-12);
        }
        assert!(frame.v.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_time_offset_is_a_pure_shift() {
        // T - t = 1 gives s = 0 and x = xi + y.
        let grid = SpatialGrid::new(10.0, 2001).unwrap();
        let state = PdeState::from_fns(grid, |x| (x * 0.3).sin(), |x| (-x * x).exp()).unwrap();
        let yg = SpatialGrid::new(9.0, 37).unwrap(); // x = xi + y stays in [-8.5, 9.5]
        let xi = 0.5;
        let frame = to_selfsimilar(&state, xi, 1.0, &yg).unwrap();
        assert_eq!(frame.s, 0.0);
        for i in 0..yg.n_points() {
            let x = xi + yg.node(i);
            assert_relative_eq!(frame.u[i], (x * 0.3).sin(), epsilon = 1e-8);
        }
    }

    #[test]
    fn rescale_rejects_bad_inputs() {
        let grid = SpatialGrid::new(2.0, 101).unwrap();
        let state = PdeState::from_fns(grid, |_| 1.0, |_| 0.0).unwrap();
        let yg = SpatialGrid::new(10.0, 101).unwrap();
        // t >= T
        let mut late = state.clone();
        late.t = 2.0;
        assert!(matches!(
            to_selfsimilar(&late, 0.0, 1.0, &yg),
            Err(CoreError::PastBlowup { .. })
        ));
        // y range falls outside the physical grid
        assert!(matches!(
            to_selfsimilar(&state, 0.0, 1.0, &yg),
            Err(CoreError::Truncated { .. })
        ));
    }

    #[test]
    fn round_trip_reproduces_interior_samples() {
        let grid = SpatialGrid::new(10.0, 2001).unwrap();
        let mut state =
            PdeState::from_fns(grid.clone(), |x| (0.4 * x).cos(), |x| x * (-x * x / 8.0).exp())
                .unwrap();
        state.t = 0.5;
        let yg = SpatialGrid::new(12.0, 1201).unwrap();
        let frame = to_selfsimilar(&state, 0.0, 1.0, &yg).unwrap();
        let inner = SpatialGrid::new(4.0, 401).unwrap();
        let back = to_physical(&frame, &inner).unwrap();
        assert_relative_eq!(back.t, state.t, max_relative = 1e-14);
        for i in 0..inner.n_points() {
            let x = inner.node(i);
            let j = ((x - grid.x_min()) / grid.spacing()).round() as usize;
            assert!(
                (back.a[i] - state.a[j]).abs() < 1e-9,
                "a mismatch at x = {x}"
            );
            assert!((back.b[i] - state.b[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn rescaled_rhs_fixed_points() {
        let yg = y_grid();
        let frame = frame_from_fns(&yg, |_| 1.0, |_| 0.0);
        let (du, dv) = rescaled_rhs(&frame);
        assert!(sup_abs(&du) < 1e-12);
        assert!(sup_abs(&dv) < 1e-12);

        let frame = frame_from_fns(&yg, |_| 0.0, |_| 0.0);
        let (du, dv) = rescaled_rhs(&frame);
        assert!(sup_abs(&du) == 0.0);
        assert!(sup_abs(&dv) == 0.0);
    }

    #[test]
    fn neutral_mode_perturbation_is_stationary_to_first_order() {
        // u = 1 + eps phi_2 has du = O(eps^2): the k = 2 direction is neutral.
        let yg = y_grid();
        let quad = build_quadrature(20.0, 2001).unwrap();
        let basis = build_hermite_basis(2, &quad).unwrap();
        let eps = 1e-6;
        let phi2 = basis.values(2).to_vec();
        let frame = frame_from_fns(&yg, |_| 1.0, |_| 0.0);
        let mut pert = frame.clone();
        for i in 0..pert.u.len() {
            pert.u[i] += eps * phi2[i];
        }
        let (du, _) = rescaled_rhs(&pert);
        // the first-order terms cancel exactly: du = eps^2 phi_2^2 plus
        // stencil round-off (phi_2 is quadratic, so the interior stencils
        // are exact); boundary nodes use one-sided drift and are excluded
        for i in 2..du.len() - 2 {
            let expect = eps * eps * phi2[i] * phi2[i];
            assert!(
                (du[i] - expect).abs() < 1e-11,
                "node {i}: du = {:.3e}, eps^2 phi^2 = {:.3e}",
                du[i],
                expect
            );
        }
    }

    #[test]
    fn shifted_and_unshifted_forms_agree() {
        // -v + 2uv versus +v + 2(u-1)v: identical up to round-off.
        let yg = y_grid();
        let frame = frame_from_fns(
            &yg,
            |y| 1.0 + 0.3 * (-y * y / 9.0).exp(),
            |y| 0.2 * y * (-y * y / 7.0).exp(),
        );
        let (_, dv) = rescaled_rhs(&frame);
        let dy = yg.spacing();
        let vy = central_derivative(&frame.v, dy);
        for i in 2..yg.n_points() - 2 {
            let vyy = (frame.v[i + 1] - 2.0 * frame.v[i] + frame.v[i - 1]) / (dy * dy);
            let shifted = vyy - 0.5 * yg.node(i) * vy[i] + frame.v[i]
                + 2.0 * (frame.u[i] - 1.0) * frame.v[i];
            assert!(
                (dv[i] - shifted).abs() <= 1e-12 * (1.0 + shifted.abs()),
                "node {i}: {} vs {}",
                dv[i],
                shifted
            );
        }
    }

    #[test]
    fn fixed_point_stays_fixed_over_long_runs() {
        let yg = SpatialGrid::new(20.0, 401).unwrap();
        let quad = build_quadrature(20.0, 401).unwrap();
        let basis = build_hermite_basis(2, &quad).unwrap();
        let frame = frame_from_fns(&yg, |_| 1.0, |_| 0.0);
        let cfg = RescaledConfig {
            s_end: 5.0,
            sample_interval: 0.5,
            ..Default::default()
        };
        let trace = run_rescaled(&frame, &cfg, &basis, &ledger()).unwrap();
        assert!(!trace.truncated);
        for s in &trace.samples {
            assert!(s.modes.x.abs() < 1e-20);
            assert!(s.modes.z.abs() < 1e-20);
            assert_eq!(s.modes.kappa, 0.0);
            // sup-deviation of the profile stays at round-off
            assert!(s.window_bound < 1e-10, "window bound {}", s.window_bound);
        }
    }

    #[test]
    fn kappa_transitions_flagged_only_in_regime() {
        let make_sample = |s: f64, kappa: f64, window: f64| ModeTraceSample {
            s,
            modes: crate::hermite::ModeDecomposition {
                kappa,
                ..crate::hermite::ModeDecomposition::zero()
            },
            window_bound: window,
            r_x: None,
            r_y: None,
            r_z: None,
        };
        // downward flip while the profile is far from flat: reported, not a violation
        let trace = ModeTrace {
            samples: vec![make_sample(0.0, 1.0, 0.5), make_sample(0.1, -1.0, 0.5)],
            truncated: false,
            delta_bar: 0.05,
            r_bar: 5.0,
        };
        let report = kappa_monitor(&trace, &ledger());
        assert_eq!(report.transitions.len(), 1);
        assert!(!report.transitions[0].in_regime);
        assert_eq!(report.violations, 0);

        // the same flip inside the flat regime is a violation
        let trace = ModeTrace {
            samples: vec![make_sample(0.0, 1.0, 0.01), make_sample(0.1, -1.0, 0.01)],
            truncated: false,
            delta_bar: 0.05,
            r_bar: 5.0,
        };
        let report = kappa_monitor(&trace, &ledger());
        assert_eq!(report.violations, 1);
        assert!(report.transitions[0].downward);
    }

    #[test]
    fn constants_examples() {
        // the displayed sample point fails its first inequality: 6 > 5
        let err = validate_constants(1.0, 1.0, 0.01, 5.0).unwrap_err();
        match err {
            CoreError::LedgerRejected(v) => {
                assert!(v.iter().any(|m| m.contains("eps1")), "{v:?}");
            }
            other => panic!("unexpected error {other}"),
        }
        // eps_bar outside (0, 1/4)
        assert!(validate_constants(2.0, 0.5, 1.0, 5.0).is_err());
        assert!(validate_constants(2.0, 0.5, 0.25, 5.0).is_err());
        // eta -> 0 blows up the first inequality
        assert!(validate_constants(1e-6, 0.5, 0.01, 5.0).is_err());
        // a valid point
        assert!(validate_constants(2.0, 0.5, 0.01, 5.0).is_ok());
    }

    #[test]
    fn search_finds_admissible_constants() {
        let ledger = search_constants(5.0).expect("admissible constants exist");
        assert!(validate_constants(
            ledger.eta_bar,
            ledger.zeta_bar,
            ledger.eps_bar,
            ledger.eps1
        )
        .is_ok());
    }

    #[test]
    fn kappa_monitor_on_flat_trace() {
        let yg = SpatialGrid::new(20.0, 401).unwrap();
        let quad = build_quadrature(20.0, 401).unwrap();
        let basis = build_hermite_basis(2, &quad).unwrap();
        let frame = frame_from_fns(&yg, |_| 1.0, |_| 0.0);
        let cfg = RescaledConfig {
            s_end: 1.0,
            sample_interval: 0.1,
            ..Default::default()
        };
        let trace = run_rescaled(&frame, &cfg, &basis, &ledger()).unwrap();
        let report = kappa_monitor(&trace, &ledger());
        assert!(report.transitions.is_empty());
        assert_eq!(report.violations, 0);
        assert_eq!(report.zeta_total, 0);
    }
}
