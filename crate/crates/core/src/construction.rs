//! The two ill-posedness initial-data families and the observation time.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::besov::{profile, ANNULUS};
use crate::error::{Error, Result};
use crate::spectral::{Complex64, Field, GridSpec, VectorField, DEFAULT_DEALIAS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `1 ≤ q < 2`: spatially separated bumps, one carrier frequency.
    Qlt2,
    /// `q > 2`: one bump, many carrier frequencies.
    Qgt2,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Qlt2 => "qlt2",
            Regime::Qgt2 => "qgt2",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qlt2" => Ok(Regime::Qlt2),
            "qgt2" => Ok(Regime::Qgt2),
            _ => Err(Error::InvalidArgument(format!("unknown regime {s:?} (qlt2|qgt2)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InflationCase {
    pub regime: Regime,
    pub n: u32,
    pub delta: f64,
    pub q: f64,
    pub eps: f64,
    /// Offset exponent: bumps sit at `2^{|j| + c N} e₁`.
    pub c: u32,
}

impl InflationCase {
    pub fn new(regime: Regime, n: u32, delta: f64, q: f64, eps: f64, c: u32) -> Result<Self> {
        let case = Self { regime, n, delta, q, eps, c };
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match self.regime {
            Regime::Qlt2 if !(1.0..2.0).contains(&self.q) => {
                return bad(format!("qlt2 needs 1 <= q < 2, got {}", self.q))
            }
            Regime::Qgt2 if !(self.q > 2.0) => {
                return bad(format!("qgt2 needs q > 2, got {}", self.q))
            }
            _ => {}
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.eps > 0.0 && self.eps < 0.2) {
            return bad(format!("eps must lie in (0, 1/5), got {}", self.eps));
        }
        if 5.0 * self.eps + 3.0 * self.delta >= 1.0 {
            return bad(format!(
                "need 5 eps + 3 delta < 1, got {}",
                5.0 * self.eps + 3.0 * self.delta
            ));
        }
        if self.n < 2 {
            return bad(format!("N must be at least 2, got {}", self.n));
        }
        if self.c < 1 {
            return bad("placement exponent c must be >= 1".into());
        }
        Ok(())
    }

    /// Integer bump indices `j ∈ [−⌊δN⌋, 0]` (qlt2).
    pub fn bump_indices(&self) -> std::ops::RangeInclusive<i32> {
        -((self.delta * self.n as f64).floor() as i32)..=0
    }

    /// Carrier exponents `k ∈ [N, ⌊(1+δ)N⌋]` (qgt2).
    pub fn carrier_exponents(&self) -> std::ops::RangeInclusive<u32> {
        self.n..=((1.0 + self.delta) * self.n as f64).floor() as u32
    }

    pub fn amplitude(&self) -> f64 {
        let nf = self.n as f64;
        match self.regime {
            Regime::Qlt2 => 2f64.powf(nf / 2.0) / (nf.powf(0.25) * nf.ln()),
            Regime::Qgt2 => nf.ln() / nf.sqrt(),
        }
    }

    /// Bump offsets `2^{|j| + cN}` (qlt2).
    pub fn offsets(&self) -> Vec<f64> {
        self.bump_indices().map(|j| 2f64.powi(j.abs() + (self.c * self.n) as i32)).collect()
    }

    /// Smallest torus period that holds the bumps with separation. For qgt2
    /// this is `4π`, where the periodized `φ₀` differs from its tail-free
    /// value by about 1% of the peak.
    pub fn min_period(&self) -> f64 {
        let dn = self.delta * self.n as f64;
        match self.regime {
            Regime::Qlt2 => 2.0 * 2f64.powf(dn + (self.c * self.n) as f64) + 16.0 * 2f64.powf(dn),
            Regime::Qgt2 => 4.0 * PI,
        }
    }

    /// Half-widths `(ξ₁max, ξ₂max)` of a box holding the spectral support of `u₀`.
    pub fn support_box(&self) -> (f64, f64) {
        let hi = ANNULUS.1;
        match self.regime {
            Regime::Qlt2 => (2f64.powi(self.n as i32) + hi, hi),
            Regime::Qgt2 => (2f64.powi(*self.carrier_exponents().end() as i32) + hi, hi),
        }
    }
}

/// `(ln N)^{−1} 2^{−2N}`.
pub fn critical_time(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("critical time needs N >= 2, got {n}")));
    }
    Ok(2f64.powi(-2 * n as i32) / (n as f64).ln())
}

/// Grid for a case: period `2πL` with `L ≥ length_scale` large enough for
/// [`InflationCase::min_period`], and per-axis resolution such that products of
/// two fields supported in [`InflationCase::support_box`] stay inside the band.
pub fn plan_grid(case: &InflationCase, length_scale: u32, max_points: usize) -> Result<GridSpec> {
    let l = (length_scale.max(1) as f64).max((case.min_period() / (2.0 * PI)).ceil());
    let period = 2.0 * PI * l;
    let (b1, b2) = case.support_box();
    // corner (2b₁, 2b₂) of the product box must satisfy (2b₁/K₁)² + (2b₂/K₂)² ≤ 1,
    // split as 3/4 + 1/4
    let k1 = 2.0 * b1 / 0.75f64.sqrt();
    let k2 = 2.0 * b2 / 0.25f64.sqrt();
    let need = |k: f64| {
        let n = (k * period / (PI * DEFAULT_DEALIAS) * (1.0 - 1e-12)).ceil() as usize;
        n.next_power_of_two().max(16)
    };
    let (nx, ny) = (need(k1), need(k2));
    if nx.saturating_mul(ny) > max_points {
        return Err(Error::Resource(format!(
            "grid {nx}x{ny} exceeds the limit of {max_points} points \
             (nx >= 2*(2^k_max + 8/3)*P/(sqrt(3/4)*pi*2/3), ny >= 2*(8/3)*P/(sqrt(1/4)*pi*2/3), P = {period:.4})"
        )));
    }
    GridSpec::anisotropic(period, nx, ny, DEFAULT_DEALIAS)
}

/// Fourier transform on ℝ² of `φ₀(2^j(x − a e₁))`, i.e. `2^{−2j} φ(2^{−j}ξ) e^{−i a ξ₁}`.
fn scaled_bump_hat(j: i32, a: f64, xi1: f64, xi2: f64) -> Complex64 {
    let s = 2f64.powi(-j);
    let m = profile(s * xi1.hypot(xi2));
    if m == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(s * s * m, -a * xi1)
}

fn require_band(grid: &GridSpec, b1: f64, b2: f64) -> Result<()> {
    let (k1, k2) = grid.band_axes();
    if (b1 / k1).powi(2) + (b2 / k2).powi(2) > 1.0 {
        return Err(Error::Resource(format!(
            "resolution overflow: support box ({b1:.4}, {b2:.4}) exceeds band axes ({k1:.4}, {k2:.4})"
        )));
    }
    Ok(())
}

/// Torus coefficients (unitary DFT) of a function given by its ℝ² Fourier transform.
fn coefficient_scale(grid: &GridSpec) -> f64 {
    (grid.len() as f64).sqrt() / (grid.period() * grid.period())
}

/// `φ₀ = 𝓕^{−1} φ`, periodized onto the grid.
pub fn bump_phi0(grid: &GridSpec) -> Result<Field> {
    let hi = ANNULUS.1;
    if !grid.in_band(hi, 0.0) || !grid.in_band(0.0, hi) {
        return Err(Error::Resource("the unit annulus is outside the resolved band".into()));
    }
    let c = coefficient_scale(grid);
    Ok(Field::from_spectral_fn(*grid, true, |a, b| {
        Complex64::new(c * profile(a.hypot(b)), 0.0)
    }))
}

#[derive(Clone, Debug)]
pub struct InitialData {
    pub h0: Field,
    pub u0: VectorField,
    pub case: InflationCase,
    pub grid: GridSpec,
}

/// Builds `(A Σ_j g_j(ξ−ωe₁) ∓ g_j(ξ+ωe₁))` as the sine/cosine modulated pair.
fn modulated(
    grid: &GridSpec,
    amp: f64,
    terms: &[(f64, f64, i32, f64)],
) -> Result<VectorField> {
    let c = coefficient_scale(grid) * amp;
    let u1 = Field::from_spectral_fn(*grid, true, |a, b| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(w, omega, j, off) in terms {
            let d = scaled_bump_hat(j, off, a - omega, b) - scaled_bump_hat(j, off, a + omega, b);
            acc += w * d;
        }
        // divide by 2i
        Complex64::new(acc.im, -acc.re) * (0.5 * c)
    });
    let u2 = Field::from_spectral_fn(*grid, true, |a, b| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(w, omega, j, off) in terms {
            acc += w * (scaled_bump_hat(j, off, a - omega, b) + scaled_bump_hat(j, off, a + omega, b));
        }
        acc * (0.5 * c)
    });
    VectorField::new(u1, u2)
}

/// `u₀ = A Σ_{−⌊δN⌋≤j≤0} 2^{j/2} Φ_{j,N} (sin 2^N x₁, cos 2^N x₁)`, `h₀ = 0`.
pub fn make_data_q_lt_2(case: &InflationCase, grid: &GridSpec) -> Result<InitialData> {
    case.validate()?;
    if case.regime != Regime::Qlt2 {
        return Err(Error::InvalidArgument("make_data_q_lt_2 needs regime qlt2".into()));
    }
    let need = case.min_period();
    if grid.period() < need {
        return Err(Error::Placement(format!(
            "period {:.4} < 2*2^(delta*N + c*N) + 16*2^(delta*N) = {need:.4} \
             (N={}, delta={}, c={})",
            grid.period(),
            case.n,
            case.delta,
            case.c
        )));
    }
    let (b1, b2) = case.support_box();
    require_band(grid, b1, b2)?;
    let omega = 2f64.powi(case.n as i32);
    let terms: Vec<_> = case
        .bump_indices()
        .zip(case.offsets())
        .map(|(j, off)| (2f64.powf(j as f64 / 2.0), omega, j, off))
        .collect();
    let u0 = modulated(grid, case.amplitude(), &terms)?;
    Ok(InitialData { h0: Field::zeros(*grid), u0, case: *case, grid: *grid })
}

/// `u₀ = (ln N/√N) Σ_{N≤k≤(1+δ)N} 2^{k/2} φ₀ (sin 2^k x₁, cos 2^k x₁)`, `h₀ = 0`.
pub fn make_data_q_gt_2(case: &InflationCase, grid: &GridSpec) -> Result<InitialData> {
    case.validate()?;
    if case.regime != Regime::Qgt2 {
        return Err(Error::InvalidArgument("make_data_q_gt_2 needs regime qgt2".into()));
    }
    let (b1, b2) = case.support_box();
    require_band(grid, b1, b2)?;
    let terms: Vec<_> = case
        .carrier_exponents()
        .map(|k| (2f64.powf(k as f64 / 2.0), 2f64.powi(k as i32), 0, 0.0))
        .collect();
    let u0 = modulated(grid, case.amplitude(), &terms)?;
    Ok(InitialData { h0: Field::zeros(*grid), u0, case: *case, grid: *grid })
}

/// Dispatches on the regime.
pub fn make_data(case: &InflationCase, grid: &GridSpec) -> Result<InitialData> {
    match case.regime {
        Regime::Qlt2 => make_data_q_lt_2(case, grid),
        Regime::Qgt2 => make_data_q_gt_2(case, grid),
    }
}
