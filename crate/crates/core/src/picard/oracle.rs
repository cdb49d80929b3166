use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Field, GridSpec, VectorField};

/// Largest grid (points) the dense oracle accepts.
pub const ORACLE_MAX_POINTS: usize = 32 * 32;

/// `(1 − e^{−t d})/d`, replaced by its series when `|d| < tol`.
pub fn divided_difference(t: f64, d: f64, tol: f64) -> f64 {
    if d.abs() < tol {
        let x = t * d;
        t * (1.0 - 0.5 * x + x * x / 6.0)
    } else {
        -(-t * d).exp_m1() / d
    }
}

/// First-layer kernel `(e^{−t|ξ|²} − e^{−t(|ξ−η|²+|η|²)}) / (|ξ−η|²+|η|²−|ξ|²)`
/// with `a = |ξ−η|²`, `b = |η|²`, `c = |ξ|²`; equals `t e^{−tc}` when the
/// denominator vanishes.
pub fn kernel_first(t: f64, a: f64, b: f64, c: f64, tol: f64) -> f64 {
    (-t * c).exp() * divided_difference(t, a + b - c, tol)
}

/// Second-layer kernel `∫₀ᵗ e^{−(t−s)c} (1 − e^{−sa})/a · e^{−sb} ds`.
pub fn kernel_second(t: f64, a: f64, b: f64, c: f64, tol: f64) -> f64 {
    (-t * c).exp() * (divided_difference(t, b - c, tol) - divided_difference(t, a + b - c, tol)) / a
}

/// Dense frequency double sum for `B(f,g)(t)` using closed-form time kernels,
/// truncated to the resolved band. Cost `O(n⁴)`.
pub fn oracle_bilinear_b(f: &VectorField, g: &VectorField, t: f64) -> Result<VectorField> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    let grid: GridSpec = *f.grid();
    if grid.len() > ORACLE_MAX_POINTS {
        return Err(Error::Resource(format!(
            "oracle is limited to {ORACLE_MAX_POINTS} grid points, got {}",
            grid.len()
        )));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let w = grid.wavenumbers();
    let k2_max = w.k2.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-8 * k2_max;
    let fh = [f.u1().to_spectral(), f.u2().to_spectral()];
    let gh = [g.u1().to_spectral(), g.u2().to_spectral()];
    let norm = 1.0 / (grid.len() as f64).sqrt();
    let mut out = [vec![Complex64::new(0.0, 0.0); grid.len()], vec![Complex64::new(0.0, 0.0); grid.len()]];
    let signed = |i: usize, n: usize| GridSpec::signed_index(i, n);

    for xi in 0..grid.len() {
        if !w.mask[xi] {
            continue;
        }
        let (m1, m2) = (signed(xi % nx, nx), signed(xi / nx, ny));
        let (x1, x2, c) = (w.kx[xi % nx], w.ky[xi / nx], w.k2[xi]);
        let mut acc = [Complex64::new(0.0, 0.0); 2];
        for eta in 0..grid.len() {
            let (n1, n2) = (signed(eta % nx, nx), signed(eta / nx, ny));
            let Some(zeta) = grid.mode_index(m1 - n1, m2 - n2) else { continue };
            let fz = [fh[0].values()[zeta], fh[1].values()[zeta]];
            if fz[0] == Complex64::new(0.0, 0.0) && fz[1] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (e1, e2, b) = (w.kx[eta % nx], w.ky[eta / nx], w.k2[eta]);
            let (z1, z2) = (x1 - e1, x2 - e2);
            let a = z1 * z1 + z2 * z2;
            let i = Complex64::i();
            // Σ_i f̂_i(ζ) (iη_i)
            let t1 = i * (e1 * fz[0] + e2 * fz[1]);
            let mut coeff = kernel_first(t, a, b, c, tol) * t1;
            if a > 0.0 {
                // (iζ·f̂)(Σ_i (iζ_i)(iη_i)) = −(iζ·f̂)(ζ·η)
                let div = i * (z1 * fz[0] + z2 * fz[1]);
                coeff -= kernel_second(t, a, b, c, tol) * (z1 * e1 + z2 * e2) * div;
            }
            for (k, slot) in acc.iter_mut().enumerate() {
                *slot += coeff * gh[k].values()[eta];
            }
        }
        for k in 0..2 {
            out[k][xi] = -norm * acc[k];
        }
    }
    let [o1, o2] = out;
    VectorField::new(Field::from_spectral(grid, o1, true)?, Field::from_spectral(grid, o2, true)?)
}
