use rustfft::num_complex::Complex64;

use super::buffer::Tracked;
use super::fft::{Direction, Fft2d};
use super::grid::GridSpec;
use super::multiplier::{self, Multiplier};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

/// Scalar field on a periodic grid, stored either as samples or as unitary
/// DFT coefficients (row-major, rows along x₂).
#[derive(Clone, Debug)]
pub struct Field {
    grid: GridSpec,
    repr: Representation,
    data: Tracked<Complex64>,
    real: bool,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            repr: Representation::Spectral,
            data: Tracked::filled(grid.len(), ZERO),
            real: true,
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            repr: Representation::Physical,
            data: Tracked::filled(grid.len(), Complex64::new(c, 0.0)),
            real: true,
        }
    }

    /// Samples a real function at the grid points `(ix·dx, iy·dy)`.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let (dx, dy) = (grid.dx(), grid.dy());
        let mut v = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny() {
            for ix in 0..grid.nx() {
                v.push(Complex64::new(f(ix as f64 * dx, iy as f64 * dy), 0.0));
            }
        }
        Self { grid, repr: Representation::Physical, data: Tracked::from_vec(v), real: true }
    }

    pub fn from_physical(grid: GridSpec, values: Vec<Complex64>, real: bool) -> Result<Self> {
        Self::from_parts(grid, Representation::Physical, values, real)
    }

    pub fn from_spectral(grid: GridSpec, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        Self::from_parts(grid, Representation::Spectral, coeffs, real)
    }

    /// Coefficients given as a function of the wavevector.
    pub fn from_spectral_fn(
        grid: GridSpec,
        real: bool,
        mut f: impl FnMut(f64, f64) -> Complex64,
    ) -> Self {
        let w = grid.wavenumbers();
        let mut v = Vec::with_capacity(grid.len());
        for &b in &w.ky {
            for &a in &w.kx {
                v.push(f(a, b));
            }
        }
        Self { grid, repr: Representation::Spectral, data: Tracked::from_vec(v), real }
    }

    fn from_parts(
        grid: GridSpec,
        repr: Representation,
        values: Vec<Complex64>,
        real: bool,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let mut f = Self { grid, repr, data: Tracked::from_vec(values), real };
        if real && repr == Representation::Physical {
            f.drop_imaginary();
        }
        Ok(f)
    }

    pub(crate) fn from_tracked(
        grid: GridSpec,
        repr: Representation,
        data: Tracked<Complex64>,
        real: bool,
    ) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, repr, data, real }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn representation(&self) -> Representation {
        self.repr
    }
    pub fn is_real(&self) -> bool {
        self.real
    }
    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    fn drop_imaginary(&mut self) {
        for z in self.data.iter_mut() {
            z.im = 0.0;
        }
    }

    /// Unitary DFT in the given direction; the input must be in the matching
    /// representation.
    pub fn transform(&self, dir: Direction) -> Result<Field> {
        let expected = match dir {
            Direction::Forward => Representation::Physical,
            Direction::Inverse => Representation::Spectral,
        };
        if self.repr != expected {
            return Err(Error::InvalidArgument(format!(
                "{dir:?} transform needs a {expected:?} field"
            )));
        }
        Ok(self.clone().converted(dir))
    }

    fn converted(mut self, dir: Direction) -> Field {
        Fft2d::get(self.grid.nx(), self.grid.ny()).process(&mut self.data, dir);
        self.repr = match dir {
            Direction::Forward => Representation::Spectral,
            Direction::Inverse => Representation::Physical,
        };
        if self.real && self.repr == Representation::Physical {
            self.drop_imaginary();
        }
        self
    }

    pub fn into_spectral(self) -> Field {
        match self.repr {
            Representation::Spectral => self,
            Representation::Physical => self.converted(Direction::Forward),
        }
    }

    pub fn into_physical(self) -> Field {
        match self.repr {
            Representation::Physical => self,
            Representation::Spectral => self.converted(Direction::Inverse),
        }
    }

    pub fn to_spectral(&self) -> Field {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> Field {
        self.clone().into_physical()
    }

    fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Multiplies every spectral coefficient by `m(ξ)`.
    ///
    /// Non-finite symbol values inside the resolved band are an error; outside
    /// the band they annihilate the coefficient.
    pub fn apply_multiplier(&self, m: &Multiplier) -> Result<Field> {
        let mut out = self.to_spectral();
        let w = self.grid.wavenumbers();
        let nx = self.grid.nx();
        let mut hermitian = m.declared_hermitian().unwrap_or(true);
        let check = m.declared_hermitian().is_none() && self.real;
        for (iy, &b) in w.ky.iter().enumerate() {
            for (ix, &a) in w.kx.iter().enumerate() {
                let k = iy * nx + ix;
                let v = m.eval(a, b);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    if w.mask[k] {
                        return Err(Error::NonFiniteMultiplier(a, b));
                    }
                    out.data[k] = ZERO;
                    continue;
                }
                if check && hermitian {
                    let mirror = m.eval(w.kx[w.neg_x[ix]], w.ky[w.neg_y[iy]]);
                    let nyquist = 2 * ix == nx || 2 * iy == self.grid.ny();
                    if !nyquist && (mirror - v.conj()).norm() > 1e-14 * (1.0 + v.norm()) {
                        hermitian = false;
                    }
                }
                out.data[k] *= v;
            }
        }
        if m.declared_hermitian().is_none() && !check {
            hermitian = false;
        }
        out.real = self.real && hermitian;
        Ok(out)
    }

    /// Multiplies coefficients by a real symbol given `(k, ξ₁, ξ₂, |ξ|²)`;
    /// realness is preserved, so the symbol must be even.
    pub(crate) fn scale_even(&self, f: impl Fn(f64, f64, f64) -> f64) -> Field {
        let mut out = self.to_spectral();
        let w = self.grid.wavenumbers();
        let nx = self.grid.nx();
        for (iy, &b) in w.ky.iter().enumerate() {
            let row = &mut out.data[iy * nx..(iy + 1) * nx];
            for (ix, z) in row.iter_mut().enumerate() {
                *z *= f(w.kx[ix], b, w.k2[iy * nx + ix]);
            }
        }
        out
    }

    pub fn heat_propagate(&self, t: f64) -> Result<Field> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
        }
        Ok(self.scale_even(|_, _, k2| (-t * k2).exp()))
    }

    /// `∫₀ᵗ e^{τΔ} f dτ`, exact in Fourier space.
    pub fn integrated_heat(&self, t: f64) -> Result<Field> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
        }
        Ok(self.scale_even(|_, _, k2| multiplier::integrated_heat_symbol(t, k2)))
    }

    /// `∂₁` (axis 0) or `∂₂` (axis 1).
    pub fn derivative(&self, axis: usize) -> Field {
        let mut out = self.to_spectral();
        let w = self.grid.wavenumbers();
        let nx = self.grid.nx();
        for (iy, &b) in w.ky.iter().enumerate() {
            for ix in 0..nx {
                let xi = if axis == 0 { w.kx[ix] } else { b };
                let z = &mut out.data[iy * nx + ix];
                *z = Complex64::new(-xi * z.im, xi * z.re);
            }
        }
        out
    }

    /// Zeroes every coefficient outside the resolved band.
    pub fn dealias(&self) -> Field {
        self.to_spectral().into_dealiased()
    }

    pub(crate) fn into_dealiased(self) -> Field {
        let mut out = self.into_spectral();
        let w = out.grid.wavenumbers();
        for (z, &keep) in out.data.iter_mut().zip(&w.mask) {
            if !keep {
                *z = ZERO;
            }
        }
        out
    }

    /// Physical-space product followed by truncation to the resolved band.
    pub fn pointwise_product(&self, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let mut out = a;
        for (x, y) in out.data.iter_mut().zip(b.data.iter()) {
            *x *= *y;
        }
        out.real = self.real && other.real;
        Ok(out.into_dealiased())
    }

    /// `(Σ |f|ᵖ dx dy)^{1/p}`, or the maximum for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let phys;
        let vals: &[Complex64] = match self.repr {
            Representation::Physical => &self.data,
            Representation::Spectral => {
                phys = self.to_physical();
                &phys.data
            }
        };
        Ok(lp_of_magnitudes(vals.iter().map(|z| z.norm()), p, self.grid.cell_area()))
    }

    /// `∫ f` over the torus.
    pub fn integral(&self) -> Complex64 {
        match self.repr {
            Representation::Spectral => {
                self.data[0] * (self.grid.len() as f64).sqrt() * self.grid.cell_area()
            }
            Representation::Physical => {
                self.data.iter().sum::<Complex64>() * self.grid.cell_area()
            }
        }
    }

    /// `Σ |f̂|²`; equals `‖f‖²_{L²}/(dx·dy)` by Parseval.
    pub fn spectral_energy(&self) -> f64 {
        let s = self.to_spectral();
        s.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest `|f̂(−m) − conj f̂(m)|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let s = self.to_spectral();
        let w = self.grid.wavenumbers();
        let nx = self.grid.nx();
        let scale = s.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for iy in 0..self.grid.ny() {
            for ix in 0..nx {
                let a = s.data[iy * nx + ix];
                let b = s.data[w.neg_y[iy] * nx + w.neg_x[ix]];
                worst = worst.max((b - a.conj()).norm());
            }
        }
        worst / scale
    }

    pub fn scale(&self, c: f64) -> Field {
        let mut out = self.clone();
        for z in out.data.iter_mut() {
            *z *= c;
        }
        out
    }

    /// `self + c·other`, computed in the representation of `self`.
    pub fn add_scaled(&self, c: f64, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let conv;
        let o = if other.repr == self.repr {
            other
        } else {
            conv = match self.repr {
                Representation::Spectral => other.to_spectral(),
                Representation::Physical => other.to_physical(),
            };
            &conv
        };
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(o.data.iter()) {
            *x += c * *y;
        }
        out.real = self.real && other.real;
        Ok(out)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.add_scaled(1.0, other)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.add_scaled(-1.0, other)
    }

    /// `‖self − other‖_{L²} / ‖other‖_{L²}` (absolute when `other` vanishes).
    pub fn rel_l2_diff(&self, other: &Field) -> Result<f64> {
        let d = self.to_spectral().sub(other)?.spectral_energy().sqrt();
        let n = other.spectral_energy().sqrt();
        Ok(if n > 0.0 { d / n } else { d })
    }

    /// The same samples viewed on a torus of half the period, i.e. `x ↦ f(2x)`
    /// on the rescaled domain.
    pub fn dilate2(&self) -> Result<Field> {
        let grid = self.grid.with_period(self.grid.period() / 2.0)?;
        let mut out = self.to_physical();
        out.grid = grid;
        Ok(out)
    }

    /// Fraction of `Σ|f̂|²` carried by modes with `keep(ξ₁, ξ₂) == false`.
    pub fn energy_outside(&self, keep: impl Fn(f64, f64) -> bool) -> f64 {
        let s = self.to_spectral();
        let w = self.grid.wavenumbers();
        let nx = self.grid.nx();
        let (mut total, mut out) = (0.0, 0.0);
        for (iy, &b) in w.ky.iter().enumerate() {
            for ix in 0..nx {
                let e = s.data[iy * nx + ix].norm_sqr();
                total += e;
                if !keep(w.kx[ix], b) {
                    out += e;
                }
            }
        }
        if total > 0.0 {
            out / total
        } else {
            0.0
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    Ok(())
}

/// Riemann-sum Lᵖ norm of a sequence of magnitudes with cell area `da`.
pub(crate) fn lp_of_magnitudes(mags: impl Iterator<Item = f64>, p: f64, da: f64) -> f64 {
    if p.is_infinite() {
        return mags.fold(0.0, f64::max);
    }
    let s: f64 = if p == 2.0 {
        mags.map(|m| m * m).sum()
    } else if p == 4.0 {
        mags.map(|m| (m * m) * (m * m)).sum()
    } else if p == 1.0 {
        mags.sum()
    } else {
        mags.map(|m| m.powf(p)).sum()
    };
    (s * da).powf(1.0 / p)
}

/// Two real fields sharing one grid.
#[derive(Clone, Debug)]
pub struct VectorField {
    u1: Field,
    u2: Field,
}

impl VectorField {
    pub fn new(u1: Field, u2: Field) -> Result<Self> {
        if u1.grid != u2.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { u1, u2 })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { u1: Field::zeros(grid), u2: Field::zeros(grid) }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.u1.grid
    }
    pub fn u1(&self) -> &Field {
        &self.u1
    }
    pub fn u2(&self) -> &Field {
        &self.u2
    }
    pub fn component(&self, i: usize) -> &Field {
        if i == 0 {
            &self.u1
        } else {
            &self.u2
        }
    }
    pub fn into_parts(self) -> (Field, Field) {
        (self.u1, self.u2)
    }

    pub fn map(&self, mut f: impl FnMut(&Field) -> Result<Field>) -> Result<VectorField> {
        VectorField::new(f(&self.u1)?, f(&self.u2)?)
    }

    pub fn to_spectral(&self) -> VectorField {
        Self { u1: self.u1.to_spectral(), u2: self.u2.to_spectral() }
    }

    pub fn heat_propagate(&self, t: f64) -> Result<VectorField> {
        self.map(|f| f.heat_propagate(t))
    }

    pub fn scale(&self, c: f64) -> VectorField {
        Self { u1: self.u1.scale(c), u2: self.u2.scale(c) }
    }

    pub fn add_scaled(&self, c: f64, other: &VectorField) -> Result<VectorField> {
        VectorField::new(self.u1.add_scaled(c, &other.u1)?, self.u2.add_scaled(c, &other.u2)?)
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.add_scaled(1.0, other)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.add_scaled(-1.0, other)
    }

    /// `∂₁u₁ + ∂₂u₂`.
    pub fn divergence(&self) -> Result<Field> {
        self.u1.derivative(0).add(&self.u2.derivative(1))
    }

    /// Lᵖ norm of the pointwise Euclidean magnitude.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let a = self.u1.to_physical();
        let b = self.u2.to_physical();
        let mags = a.values().iter().zip(b.values()).map(|(x, y)| (x.norm_sqr() + y.norm_sqr()).sqrt());
        Ok(lp_of_magnitudes(mags, p, self.grid().cell_area()))
    }

    pub fn spectral_energy(&self) -> f64 {
        self.u1.spectral_energy() + self.u2.spectral_energy()
    }

    pub fn rel_l2_diff(&self, other: &VectorField) -> Result<f64> {
        let d = self.sub(other)?.spectral_energy().sqrt();
        let n = other.spectral_energy().sqrt();
        Ok(if n > 0.0 { d / n } else { d })
    }

    pub fn dilate2(&self) -> Result<VectorField> {
        VectorField::new(self.u1.dilate2()?, self.u2.dilate2()?)
    }
}
