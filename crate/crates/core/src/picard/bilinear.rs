use rustfft::num_complex::Complex64;

use super::quad::{InnerRule, QuadratureSpec};
use crate::error::{Error, Result};
use crate::spectral::buffer::Tracked;
use crate::spectral::fft::{Direction, Fft2d};
use crate::spectral::multiplier::integrated_heat_symbol;
use crate::spectral::{Field, GaussLegendre, GridSpec, Representation, VectorField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral inputs of the Duhamel integrand, shared by all nodes.
struct Integrand {
    grid: GridSpec,
    f: [Field; 2],
    g: [Field; 2],
    div_f: Field,
    /// Physical `∂₁h₀`, `∂₂h₀` when the initial height is non-zero.
    grad_h: Option<(Tracked<f64>, Tracked<f64>)>,
    inner: InnerRule,
}

fn spectral_real(u: &VectorField) -> Result<[Field; 2]> {
    if !(u.u1().is_real() && u.u2().is_real()) {
        return Err(Error::InvalidArgument("Duhamel terms need real fields".into()));
    }
    Ok([u.u1().to_spectral(), u.u2().to_spectral()])
}

impl Integrand {
    fn new(f: &VectorField, g: &VectorField, h0: Option<&Field>, inner: InnerRule) -> Result<Self> {
        if f.grid() != g.grid() {
            return Err(Error::GridMismatch);
        }
        let grid = *f.grid();
        let grad_h = match h0 {
            Some(h) => {
                if *h.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                let (a, b) = crate::spectral::pack::physical_pair(&h.derivative(0), &h.derivative(1));
                Some((a, b))
            }
            None => None,
        };
        Ok(Self {
            grid,
            div_f: f.divergence()?,
            f: spectral_real(f)?,
            g: spectral_real(g)?,
            grad_h,
            inner,
        })
    }

    /// `F(s)` with `−∫ e^{(t−s)Δ} F(s) ds` the Duhamel term, as dealiased
    /// spectral coefficients of both components.
    fn eval(&self, s: f64, z: &mut Tracked<Complex64>) -> (Field, Field) {
        let grid = self.grid;
        let nx = grid.nx();
        let w = grid.wavenumbers();
        let fft = Fft2d::get(nx, grid.ny());
        let inner_rule = match self.inner {
            InnerRule::Quadrature(m) => Some(GaussLegendre::new(m)),
            InnerRule::ClosedForm => None,
        };
        let integrated = |k2: f64| match &inner_rule {
            None => integrated_heat_symbol(s, k2),
            Some(q) => q.integrate(0.0, s, |tau| (-tau * k2).exp()),
        };

        // A_i = e^{sΔ} f_i + ∂_i ∫₀^s div e^{τΔ} f dτ, packed as A₁ + i A₂
        let (f1, f2, d) = (self.f[0].values(), self.f[1].values(), self.div_f.values());
        for (k, zk) in z.iter_mut().enumerate() {
            let (a, b, k2) = (w.kx[k % nx], w.ky[k / nx], w.k2[k]);
            let e = (-s * k2).exp();
            let id = d[k] * integrated(k2);
            let a1 = e * f1[k] + Complex64::new(-a * id.im, a * id.re);
            let a2 = e * f2[k] + Complex64::new(-b * id.im, b * id.re);
            *zk = a1 + Complex64::new(-a2.im, a2.re);
        }
        fft.process(z, Direction::Inverse);
        let a1: Tracked<f64> = Tracked::from_vec(z.iter().map(|c| c.re).collect());
        let a2: Tracked<f64> = Tracked::from_vec(z.iter().map(|c| c.im).collect());

        let mut p: [Tracked<f64>; 2] = [Tracked::filled(grid.len(), 0.0), Tracked::filled(grid.len(), 0.0)];
        for (comp, pk) in p.iter_mut().enumerate() {
            // ∂₁ e^{sΔ} g_k + i ∂₂ e^{sΔ} g_k
            let gk = self.g[comp].values();
            for (k, zk) in z.iter_mut().enumerate() {
                let (a, b, k2) = (w.kx[k % nx], w.ky[k / nx], w.k2[k]);
                let v = gk[k] * (-s * k2).exp();
                // iξ₁v + i(iξ₂v) = i a v − b v
                *zk = Complex64::new(-a * v.im - b * v.re, a * v.re - b * v.im);
            }
            fft.process(z, Direction::Inverse);
            for (i, zk) in z.iter().enumerate() {
                pk[i] = a1[i] * zk.re + a2[i] * zk.im;
            }
            if let Some((h1, h2)) = &self.grad_h {
                for (i, zk) in z.iter().enumerate() {
                    pk[i] -= h1[i] * zk.re + h2[i] * zk.im;
                }
            }
        }
        drop((a1, a2));
        crate::spectral::pack::spectral_pair(grid, &p[0], &p[1], true)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    for (i, &t) in times.iter().enumerate() {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("times must be finite and >= 0, got {t}")));
        }
        if i > 0 && t < times[i - 1] {
            return Err(Error::InvalidArgument("times must be sorted ascending".into()));
        }
    }
    Ok(())
}

/// `−∫₀ᵗ e^{(t−s)Δ} F(s) ds` at every requested time, sharing the quadrature
/// across panels between consecutive times.
fn duhamel(
    integrand: &Integrand,
    times: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<VectorField>> {
    quad.validate()?;
    check_times(times)?;
    let grid = integrand.grid;
    let w = grid.wavenumbers();
    let mut acc = [Tracked::filled(grid.len(), ZERO), Tracked::filled(grid.len(), ZERO)];
    let mut z = Tracked::filled(grid.len(), ZERO);
    let mut out = Vec::with_capacity(times.len());
    let k2_band = w
        .k2
        .iter()
        .zip(&w.mask)
        .filter(|(_, &m)| m)
        .map(|(&k, _)| k)
        .fold(0.0, f64::max);
    let mut prev = 0.0;
    for &t in times {
        if t > prev {
            for a in acc.iter_mut() {
                for (v, &k2) in a.iter_mut().zip(&w.k2) {
                    *v *= (-(t - prev) * k2).exp();
                }
            }
            let levels = if quad.auto_grade {
                quad.grading_levels.max(QuadratureSpec::levels_for(t - prev, k2_band)).min(40)
            } else {
                quad.grading_levels
            };
            for (s, wt) in quad.panel_with_levels(prev, t, prev == 0.0, true, levels) {
                let (p1, p2) = integrand.eval(s, &mut z);
                for (a, p) in acc.iter_mut().zip([&p1, &p2]) {
                    for ((v, &k2), &pv) in a.iter_mut().zip(&w.k2).zip(p.values()) {
                        if pv != ZERO {
                            *v += pv * (wt * (-(t - s) * k2).exp());
                        }
                    }
                }
            }
            prev = t;
        }
        let comps: Vec<Field> = acc
            .iter()
            .map(|a| {
                Field::from_tracked(
                    grid,
                    Representation::Spectral,
                    Tracked::from_vec(a.iter().map(|v| -v).collect()),
                    true,
                )
            })
            .collect();
        let mut it = comps.into_iter();
        out.push(VectorField::new(it.next().unwrap(), it.next().unwrap())?);
    }
    Ok(out)
}

/// `B(f,g)(t) = −∫₀ᵗ e^{(t−s)Δ}( e^{sΔ}f·∇e^{sΔ}g + ∇∫₀^s div e^{τΔ}f dτ · ∇e^{sΔ}g ) ds`.
pub fn bilinear_b(
    f: &VectorField,
    g: &VectorField,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<VectorField> {
    Ok(bilinear_b_times(f, g, &[t], quad)?.pop().expect("one time requested"))
}

/// [`bilinear_b`] at several ascending times in one sweep.
pub fn bilinear_b_times(
    f: &VectorField,
    g: &VectorField,
    times: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<VectorField>> {
    let integrand = Integrand::new(f, g, None, quad.inner)?;
    duhamel(&integrand, times, quad)
}

/// `B(u₀,u₀)(t) + ∫₀ᵗ e^{(t−s)Δ}(∇h₀·∇e^{sΔ}u₀) ds`.
pub(crate) fn second_iterate(
    u0: &VectorField,
    h0: &Field,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<VectorField> {
    let integrand = Integrand::new(u0, u0, Some(h0), quad.inner)?;
    Ok(duhamel(&integrand, &[t], quad)?.pop().expect("one time requested"))
}
