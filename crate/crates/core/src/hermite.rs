//! Polynomial eigenbasis of `A = d^2/dy^2 - (y/2) d/dy` in the rho-weighted
//! space, and low-mode projections of fields.
//!
//! The eigenfunctions are Hermite polynomials in `y/2`; they satisfy the
//! integer-coefficient recurrence `p_{k+1} = y p_k - 2k p_{k-1}` with
//! `p_0 = 1`, `p_1 = y`, and have eigenvalues `-k/2`. Their squared weighted
//! norms are `2 sqrt(pi) 2^k k!`, which is used to normalize analytically;
//! orthonormality and eigenvalue residuals are then re-verified against the
//! supplied quadrature so a bad quadrature fails loudly at build time.

use crate::error::{CoreError, Result};
use crate::quadrature::WeightedQuadrature;

/// Tolerance for the build-time orthonormality and eigen-residual checks.
pub const BASIS_TOL: f64 = 1e-8;

/// Absolute tolerance below which a negative mode remainder is treated as
/// round-off and clamped to zero.
pub const REMAINDER_CLAMP_TOL: f64 = 1e-10;

const SQRT_PI: f64 = 1.7724538509055159;

/// Dense polynomial with ascending coefficients. Small helper for exact
/// differentiation of the basis members.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, y: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * y + c;
        }
        acc
    }

    pub fn eval_on(&self, nodes: &[f64]) -> Vec<f64> {
        nodes.iter().map(|&y| self.eval(y)).collect()
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        Poly::new(out)
    }

    /// Multiplies by `y` (shifts coefficients up one degree).
    fn times_y(&self) -> Poly {
        let mut out = vec![0.0];
        out.extend_from_slice(&self.coeffs);
        Poly::new(out)
    }

    /// Applies `A p = p'' - (y/2) p'` by exact coefficient manipulation.
    pub fn apply_a(&self) -> Poly {
        let second = self.derivative().derivative();
        let drift = self.derivative().times_y().scale(0.5);
        second.sub(&drift)
    }
}

/// The first `order + 1` rho-orthonormal polynomial eigenfunctions of `A`,
/// together with their values on the quadrature nodes.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    order: usize,
    polys: Vec<Poly>,
    values: Vec<Vec<f64>>,
    quad: WeightedQuadrature,
}

/// Builds the basis `phi_0 .. phi_order` and verifies orthonormality and the
/// eigenvalue relation `A phi_k = -(k/2) phi_k` against the quadrature.
pub fn build_hermite_basis(order: usize, quad: &WeightedQuadrature) -> Result<HermiteBasis> {
    if order > 8 {
        return Err(CoreError::BasisCheck(format!(
            "order must be <= 8, got {order}"
        )));
    }

    // Raw recurrence p_{k+1} = y p_k - 2k p_{k-1}, then analytic normalization
    // by ||p_k||_rho^2 = 2 sqrt(pi) 2^k k!.
    let mut raw: Vec<Poly> = Vec::with_capacity(order + 1);
    raw.push(Poly::new(vec![1.0]));
    if order >= 1 {
        raw.push(Poly::new(vec![0.0, 1.0]));
    }
    for k in 1..order {
        let next = raw[k].times_y().sub(&raw[k - 1].scale(2.0 * k as f64));
        raw.push(next);
    }

    let mut polys = Vec::with_capacity(order + 1);
    let mut factorial = 1.0;
    let mut pow2 = 1.0;
    for (k, p) in raw.into_iter().enumerate() {
        if k > 0 {
            factorial *= k as f64;
            pow2 *= 2.0;
        }
        let norm_sq = 2.0 * SQRT_PI * pow2 * factorial;
        polys.push(p.scale(1.0 / norm_sq.sqrt()));
    }

    let values: Vec<Vec<f64>> = polys.iter().map(|p| p.eval_on(&quad.y_nodes)).collect();

    // Verify against the quadrature: a failure signals an inconsistent rule.
    for j in 0..=order {
        for k in j..=order {
            let got = quad.inner(&values[j], &values[k])?;
            let expect = if j == k { 1.0 } else { 0.0 };
            if (got - expect).abs() > BASIS_TOL {
                return Err(CoreError::BasisCheck(format!(
                    "<phi_{j}, phi_{k}> = {got:.3e}, expected {expect}"
                )));
            }
        }
    }
    for (k, p) in polys.iter().enumerate() {
        let residual = p.apply_a().sub(&p.scale(-(k as f64) / 2.0));
        let r = quad.rho_norm_sq(&residual.eval_on(&quad.y_nodes))?.sqrt();
        if r > BASIS_TOL {
            return Err(CoreError::BasisCheck(format!(
                "eigen residual for phi_{k} is {r:.3e}"
            )));
        }
    }

    Ok(HermiteBasis {
        order,
        polys,
        values,
        quad: quad.clone(),
    })
}

impl HermiteBasis {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        -(k as f64) / 2.0
    }

    pub fn poly(&self, k: usize) -> &Poly {
        &self.polys[k]
    }

    /// `phi_k` sampled on the quadrature nodes.
    pub fn values(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn quad(&self) -> &WeightedQuadrature {
        &self.quad
    }

    /// `⟨f, phi_k⟩_rho`.
    pub fn coefficient(&self, f: &[f64], k: usize) -> Result<f64> {
        self.quad.inner(f, &self.values[k])
    }
}

/// Low-mode content of a rescaled field `v` and its derivative, with the
/// derived functionals `X`, `Y`, `Z` and `kappa = eta_bar X - Y - Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDecomposition {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_c: f64,
    /// Squared weighted norm of the remainder `v - alpha phi_0 - beta phi_1 - gamma_c phi_2`.
    pub w_rho_sq: f64,
    pub mu: f64,
    pub nu: f64,
    /// Squared weighted norm of the derivative remainder.
    pub q_rho_sq: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub kappa: f64,
}

impl ModeDecomposition {
    pub fn zero() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma_c: 0.0,
            w_rho_sq: 0.0,
            mu: 0.0,
            nu: 0.0,
            q_rho_sq: 0.0,
            x: 0.0,
            y: 0.0,
            z: 0.0,
            kappa: 0.0,
        }
    }
}

/// Projects `v` onto `phi_0, phi_1, phi_2` and `v'` onto `phi_0, phi_1`,
/// forming remainder norms by Parseval. A remainder more negative than the
/// clamp tolerance means the basis and quadrature disagree and is an error.
pub fn project_modes(
    v: &[f64],
    v_prime: &[f64],
    basis: &HermiteBasis,
    eta_bar: f64,
) -> Result<ModeDecomposition> {
    if basis.order() < 2 {
        return Err(CoreError::BasisCheck(format!(
            "projection needs basis order >= 2, got {}",
            basis.order()
        )));
    }
    if !(eta_bar > 0.0) {
        return Err(CoreError::InvalidConfig(format!(
            "eta_bar must be positive, got {eta_bar}"
        )));
    }

    let alpha = basis.coefficient(v, 0)?;
    let beta = basis.coefficient(v, 1)?;
    let gamma_c = basis.coefficient(v, 2)?;
    let v_sq = basis.quad().rho_norm_sq(v)?;
    let w_rho_sq = clamp_remainder(v_sq - alpha * alpha - beta * beta - gamma_c * gamma_c, v_sq)?;

    let mu = basis.coefficient(v_prime, 0)?;
    let nu = basis.coefficient(v_prime, 1)?;
    let vp_sq = basis.quad().rho_norm_sq(v_prime)?;
    let q_rho_sq = clamp_remainder(vp_sq - mu * mu - nu * nu, vp_sq)?;

    let x = alpha * alpha + beta * beta + gamma_c * gamma_c;
    let y = mu * mu + nu * nu;
    let z = w_rho_sq + q_rho_sq;
    Ok(ModeDecomposition {
        alpha,
        beta,
        gamma_c,
        w_rho_sq,
        mu,
        nu,
        q_rho_sq,
        x,
        y,
        z,
        kappa: eta_bar * x - y - z,
    })
}

fn clamp_remainder(r: f64, scale: f64) -> Result<f64> {
    if r >= 0.0 {
        return Ok(r);
    }
    // Round-off in the Parseval subtraction grows with the field norm.
    if -r <= REMAINDER_CLAMP_TOL * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(CoreError::RemainderClamp { excess: -r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_quadrature;
    use approx::assert_relative_eq;

    fn basis() -> HermiteBasis {
        let quad = build_quadrature(20.0, 2001).unwrap();
        build_hermite_basis(4, &quad).unwrap()
    }

    #[test]
    fn poly_eval_and_derivative() {
        let p = Poly::new(vec![1.0, -2.0, 3.0]); // 1 - 2y + 3y^2
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 6.0]);
    }

    #[test]
    fn low_modes_have_expected_shape() {
        let b = basis();
        // phi_0 = (2 sqrt(pi))^{-1/2}: constant.
        let c0 = b.poly(0).coeffs();
        assert_eq!(c0.len(), 1);
        assert_relative_eq!(c0[0], 1.0 / (2.0 * SQRT_PI).sqrt(), max_relative = 1e-14);
        // phi_1 is an odd linear polynomial.
        assert_eq!(b.poly(1).coeffs()[0], 0.0);
        // phi_2 is proportional to y^2 - 2: applying A gives back -(y^2 - 2).
        let c2 = b.poly(2).coeffs();
        assert_relative_eq!(c2[0] / c2[2], -2.0, max_relative = 1e-14);
        assert_eq!(c2[1], 0.0);
    }

    #[test]
    fn eigenvalues_by_exact_differentiation() {
        // A y = -y/2 and A (y^2 - 2) = 2 - y^2: the displayed eigenpairs.
        let p1 = Poly::new(vec![0.0, 1.0]);
        assert_eq!(p1.apply_a().coeffs(), &[0.0, -0.5]);
        let p2 = Poly::new(vec![-2.0, 0.0, 1.0]);
        let a2 = p2.apply_a();
        assert_eq!(a2.eval(0.0), 2.0);
        assert_eq!(a2.eval(3.0), -7.0);
    }

    #[test]
    fn orthonormal_and_eigen_residuals_within_tol() {
        let b = basis();
        for j in 0..=4 {
            for k in 0..=4 {
                let got = b.quad().inner(b.values(j), b.values(k)).unwrap();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (got - expect).abs() < 1e-10,
                    "<phi_{j}, phi_{k}> = {got:.3e}"
                );
            }
        }
        for k in 0..=4 {
            let res = b
                .poly(k)
                .apply_a()
                .sub(&b.poly(k).scale(b.eigenvalue(k)))
                .eval_on(&b.quad().y_nodes);
            let r = b.quad().rho_norm_sq(&res).unwrap().sqrt();
            assert!(r < 1e-10, "eigen residual phi_{k} = {r:.3e}");
        }
    }

    #[test]
    fn build_fails_on_inconsistent_quadrature() {
        let quad = build_quadrature(20.0, 2001).unwrap();
        let mut bad = quad.clone();
        for w in bad.weights.iter_mut() {
            *w *= 1.001;
        }
        assert!(build_hermite_basis(2, &bad).is_err());
        assert!(build_hermite_basis(9, &quad).is_err());
    }

    #[test]
    fn project_unit_mode() {
        let b = basis();
        let v = b.values(1).to_vec();
        let v_prime = b.poly(1).derivative().eval_on(&b.quad().y_nodes);
        let d = project_modes(&v, &v_prime, &b, 1.0).unwrap();
        assert!(d.alpha.abs() < 1e-10);
        assert_relative_eq!(d.beta, 1.0, max_relative = 1e-10);
        assert!(d.gamma_c.abs() < 1e-10);
        assert!(d.w_rho_sq < 1e-10);
        assert_relative_eq!(d.x, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn project_zero_field() {
        let b = basis();
        let v = vec![0.0; b.quad().len()];
        let d = project_modes(&v, &v, &b, 2.0).unwrap();
        assert_eq!(d, ModeDecomposition::zero());
    }

    #[test]
    fn odd_field_has_no_even_modes() {
        let b = basis();
        let v: Vec<f64> = b
            .quad()
            .y_nodes
            .iter()
            .map(|&y| (0.3 * y + 0.01 * y * y * y) * (-0.05 * y * y).exp())
            .collect();
        let vp = crate::quadrature::central_derivative(&v, b.quad().spacing());
        let d = project_modes(&v, &vp, &b, 1.0).unwrap();
        assert!(d.alpha.abs() < 1e-10, "alpha = {}", d.alpha);
        assert!(d.gamma_c.abs() < 1e-10, "gamma_c = {}", d.gamma_c);
    }

    #[test]
    fn parseval_reconstruction_for_low_mode_combination() {
        let b = basis();
        let (ca, cb, cc) = (0.7, -1.3, 0.4);
        let v: Vec<f64> = (0..b.quad().len())
            .map(|i| ca * b.values(0)[i] + cb * b.values(1)[i] + cc * b.values(2)[i])
            .collect();
        let vp = vec![0.0; v.len()]; // derivative content irrelevant here
        let d = project_modes(&v, &vp, &b, 1.0).unwrap();
        let norm = b.quad().rho_norm_sq(&v).unwrap();
        assert_relative_eq!(
            norm,
            d.alpha * d.alpha + d.beta * d.beta + d.gamma_c * d.gamma_c + d.w_rho_sq,
            max_relative = 1e-12
        );
        assert!(d.w_rho_sq < 1e-12 * norm.max(1.0));
    }

    #[test]
    fn inconsistent_projection_is_an_error() {
        // Inflated weights overcount the mode coefficients relative to the
        // field norm, so the Parseval remainder goes negative beyond the clamp.
        let quad = build_quadrature(20.0, 2001).unwrap();
        let b = build_hermite_basis(2, &quad).unwrap();
        let mut inflated = quad.clone();
        for w in inflated.weights.iter_mut() {
            *w *= 1.01;
        }
        let forged = HermiteBasis {
            order: b.order,
            polys: b.polys.clone(),
            values: b.values.clone(),
            quad: inflated,
        };
        let v = b.values(0).to_vec();
        let vp = vec![0.0; v.len()];
        assert!(matches!(
            project_modes(&v, &vp, &forged, 1.0),
            Err(CoreError::RemainderClamp { .. })
        ));
    }

    #[test]
    fn phi2_derivative_equals_phi1() {
        // d/dy phi_2 = phi_1 exactly for this normalization; the nu-mode of a
        // pure gamma field therefore equals gamma.
        let b = basis();
        let d2 = b.poly(2).derivative();
        for (c_got, c_want) in d2.coeffs().iter().zip(b.poly(1).coeffs()) {
            assert_relative_eq!(c_got, c_want, max_relative = 1e-14);
        }
    }
}
