//! Four-point cubic interpolation on uniform grids.

/// Interpolates `f` (sampled at `x0 + i*dx`) at `x` with the cubic Lagrange
/// stencil through the four surrounding nodes. Returns `None` when `x` falls
/// outside `[x0 + dx, x0 + (n-2) dx]`, where a full centered stencil exists.
pub fn cubic_interpolate(x0: f64, dx: f64, f: &[f64], x: f64) -> Option<f64> {
    let n = f.len();
    if n < 4 || !x.is_finite() {
        return None;
    }
    let s = (x - x0) / dx;
    // Clamp tiny round-off at the edges of the valid window.
    let eps = 1e-12 * (n as f64);
    if s < 1.0 - eps || s > (n - 2) as f64 + eps {
        return None;
    }
    let mut j = s.floor() as usize;
    if j < 1 {
        j = 1;
    }
    if j > n - 3 {
        j = n - 3;
    }
    let t = s - j as f64;
    let wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w0 = (t - 1.0) * (t + 1.0) * (t - 2.0) / 2.0;
    let w1 = -t * (t + 1.0) * (t - 2.0) / 2.0;
    let w2 = t * (t + 1.0) * (t - 1.0) / 6.0;
    Some(wm1 * f[j - 1] + w0 * f[j] + w1 * f[j + 1] + w2 * f[j + 2])
}
