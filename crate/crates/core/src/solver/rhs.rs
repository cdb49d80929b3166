//! Explicit part of the shallow-water right-hand side.

use crate::error::{Error, Result};
use crate::spectral::buffer::Tracked;
use crate::spectral::pack::{physical_pair, spectral_pair};
use crate::spectral::{Field, GridSpec, VectorField};

/// Floor on `1 + h` below which `ln(1+h)` is refused.
pub const POSITIVITY_FLOOR: f64 = 1e-6;

/// Which explicit terms are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Terms {
    /// Transport, `h div u`-type and `∇ln(1+h)·∇u` terms.
    pub nonlinear: bool,
    /// `∇h` in the momentum equation and `div u` in the height equation.
    pub linear_coupling: bool,
}

impl Default for Terms {
    fn default() -> Self {
        Self { nonlinear: true, linear_coupling: true }
    }
}

pub(crate) struct Rhs {
    pub dh: Field,
    pub du: [Field; 2],
    pub u_max: f64,
}

fn derivative_pair(f: &Field) -> (Field, Field) {
    (f.derivative(0), f.derivative(1))
}

/// `∂ₜh = −div u − div(h u)`,
/// `∂ₜu_k − Δu_k = −u·∇u_k − ∂_k h + ∇ln(1+h)·∇u_k`, without the `Δu` term.
pub(crate) fn evaluate(h: &Field, u: &VectorField, terms: Terms) -> Result<Rhs> {
    let grid: GridSpec = *h.grid();
    if *u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let hs = h.to_spectral();
    let us = [u.u1().to_spectral(), u.u2().to_spectral()];

    let mut dh = Field::zeros(grid);
    let mut du = [Field::zeros(grid), Field::zeros(grid)];
    if terms.linear_coupling {
        dh = us[0].derivative(0).add(&us[1].derivative(1))?.scale(-1.0);
        du = [hs.derivative(0).scale(-1.0), hs.derivative(1).scale(-1.0)];
    }

    let (u1, u2) = physical_pair(&us[0], &us[1]);
    let u_max = u1
        .iter()
        .zip(u2.iter())
        .map(|(a, b)| (a * a + b * b).sqrt())
        .fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) });
    let hp: Tracked<f64> =
        Tracked::from_vec(hs.to_physical().values().iter().map(|z| z.re).collect());
    let min_one_plus_h = hp.iter().fold(f64::INFINITY, |m, &v| if v.is_nan() { f64::NAN } else { m.min(1.0 + v) });
    if !(u_max.is_finite() && min_one_plus_h.is_finite()) {
        return Err(Error::BlowUp(f64::NAN));
    }
    if !terms.nonlinear {
        return Ok(Rhs { dh, du, u_max });
    }
    if min_one_plus_h <= POSITIVITY_FLOOR {
        return Err(Error::Positivity { t: f64::NAN, min: min_one_plus_h });
    }

    let n = grid.len();
    let log_h: Tracked<f64> = Tracked::from_vec(hp.iter().map(|&v| v.ln_1p()).collect());
    let hu1: Tracked<f64> = Tracked::from_vec(hp.iter().zip(u1.iter()).map(|(a, b)| a * b).collect());
    let (log_hat, hu1_hat) = spectral_pair(grid, &log_h, &hu1, true);
    drop((log_h, hu1));
    let (dl1, dl2) = {
        let (a, b) = derivative_pair(&log_hat);
        physical_pair(&a, &b)
    };
    let hu2: Tracked<f64> = Tracked::from_vec(hp.iter().zip(u2.iter()).map(|(a, b)| a * b).collect());

    let mut nl: [Tracked<f64>; 2] = [Tracked::filled(n, 0.0), Tracked::filled(n, 0.0)];
    for (k, out) in nl.iter_mut().enumerate() {
        let (g1, g2) = {
            let (a, b) = derivative_pair(&us[k]);
            physical_pair(&a, &b)
        };
        for i in 0..n {
            out[i] = -(u1[i] * g1[i] + u2[i] * g2[i]) + dl1[i] * g1[i] + dl2[i] * g2[i];
        }
    }
    let (n1, n2) = spectral_pair(grid, &nl[0], &nl[1], true);
    let zeros: Tracked<f64> = Tracked::filled(n, 0.0);
    let (hu2_hat, _) = spectral_pair(grid, &hu2, &zeros, true);

    let flux_div = hu1_hat.derivative(0).add(&hu2_hat.derivative(1))?;
    dh = dh.sub(&flux_div)?;
    du = [du[0].add(&n1)?, du[1].add(&n2)?];
    Ok(Rhs { dh, du, u_max })
}
