use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Field, VectorField};

/// `e^{At}` for `A = [[0, −ik], [−ik, −k²]]`, returned as
/// `(m11, m12, m21, m22)` with `m12 = m21 = −ik·S`.
///
/// With `τ = −k²`, `μ² = k⁴/4 − k²`:
/// `e^{At} = C·I + S·(A − τ/2·I)`, `C = e^{τt/2} cosh μt`, `S = e^{τt/2} sinh(μt)/μ`.
fn longitudinal_exp(k: f64, t: f64) -> (Complex64, Complex64, Complex64) {
    let k2 = k * k;
    let half_tau = -0.5 * k2;
    let m2 = 0.25 * k2 * k2 - k2;
    let (c, s) = if m2 > 0.0 {
        let mu = m2.sqrt();
        if mu * t > 1.0 {
            // both exponents −k²/2 ± μ are ≤ 0; the slow one via λ₊λ₋ = k²
            let lam_minus = half_tau - mu;
            let lam_plus = k2 / lam_minus;
            let (ep, em) = ((lam_plus * t).exp(), (lam_minus * t).exp());
            (0.5 * (ep + em), 0.5 * (ep - em) / mu)
        } else {
            let e = (half_tau * t).exp();
            (e * (mu * t).cosh(), e * sinh_over(mu, t))
        }
    } else {
        let nu = (-m2).sqrt();
        let e = (half_tau * t).exp();
        (e * (nu * t).cos(), e * sin_over(nu, t))
    };
    // A − τ/2 I = [[k²/2, −ik], [−ik, −k²/2]]
    let m11 = Complex64::new(c + s * 0.5 * k2, 0.0);
    let m12 = Complex64::new(0.0, -k * s);
    let m22 = Complex64::new(c - s * 0.5 * k2, 0.0);
    (m11, m12, m22)
}

fn sinh_over(mu: f64, t: f64) -> f64 {
    let x = mu * t;
    if x < 1e-4 {
        t * (1.0 + x * x / 6.0)
    } else {
        x.sinh() / mu
    }
}

fn sin_over(nu: f64, t: f64) -> f64 {
    let x = nu * t;
    if x < 1e-4 {
        t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / nu
    }
}

/// Exact solution of `∂ₜh + div u = 0`, `∂ₜu − Δu + ∇h = 0`, mode by mode:
/// the transverse part of `û` decays like `e^{−|ξ|²t}`, the longitudinal part
/// couples to `ĥ` through a 2×2 matrix exponential.
pub fn linearized_oracle(h0: &Field, u0: &VectorField, t: f64) -> Result<(Field, VectorField)> {
    if h0.grid() != u0.grid() {
        return Err(Error::GridMismatch);
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    let grid = *h0.grid();
    let w = grid.wavenumbers();
    let nx = grid.nx();
    let hs = h0.to_spectral();
    let (a1, a2) = (u0.u1().to_spectral(), u0.u2().to_spectral());
    let mut h = Vec::with_capacity(grid.len());
    let mut u1 = Vec::with_capacity(grid.len());
    let mut u2 = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let (x1, x2) = (w.kx[idx % nx], w.ky[idx / nx]);
        let k = x1.hypot(x2);
        let (hv, v1, v2) = (hs.values()[idx], a1.values()[idx], a2.values()[idx]);
        if k == 0.0 {
            h.push(hv);
            u1.push(v1);
            u2.push(v2);
            continue;
        }
        let (n1, n2) = (x1 / k, x2 / k);
        let ul = n1 * v1 + n2 * v2;
        let ut = -n2 * v1 + n1 * v2;
        let (m11, m12, m22) = longitudinal_exp(k, t);
        let h_t = m11 * hv + m12 * ul;
        let ul_t = m12 * hv + m22 * ul;
        let ut_t = ut * (-k * k * t).exp();
        h.push(h_t);
        u1.push(n1 * ul_t - n2 * ut_t);
        u2.push(n2 * ul_t + n1 * ut_t);
    }
    let real = h0.is_real() && u0.u1().is_real() && u0.u2().is_real();
    Ok((
        Field::from_spectral(grid, h, real)?,
        VectorField::new(Field::from_spectral(grid, u1, real)?, Field::from_spectral(grid, u2, real)?)?,
    ))
}
