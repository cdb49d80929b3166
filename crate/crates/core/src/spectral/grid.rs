use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cutoff: the 2/3 rule.
pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

/// Uniform grid on the periodic square `[0, P)^2`.
///
/// The point counts may differ between the two axes (both powers of two).
/// The resolved band is the ellipse `(ξ₁/K₁)² + (ξ₂/K₂)² ≤ 1` with
/// `K_i = dealias_fraction · π n_i / P`, which is the disk
/// `|ξ| ≤ dealias_fraction · π n / P` when `nx == ny`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    period: f64,
    nx: usize,
    ny: usize,
    dealias_fraction: f64,
}

/// Square grid with `n` points per side.
pub fn make_grid(period: f64, n: usize, dealias_fraction: f64) -> Result<GridSpec> {
    GridSpec::anisotropic(period, n, n, dealias_fraction)
}

impl GridSpec {
    pub fn square(period: f64, n: usize) -> Result<Self> {
        make_grid(period, n, DEFAULT_DEALIAS)
    }

    pub fn anisotropic(period: f64, nx: usize, ny: usize, dealias_fraction: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        for n in [nx, ny] {
            if !n.is_power_of_two() || n < 16 {
                return Err(Error::InvalidGrid(format!(
                    "points per dimension must be a power of two >= 16, got {n}"
                )));
            }
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Self { period, nx, ny, dealias_fraction })
    }

    pub fn period(&self) -> f64 {
        self.period
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn is_square(&self) -> bool {
        self.nx == self.ny
    }
    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Frequency lattice spacing `2π/P`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn dx(&self) -> f64 {
        self.period / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.period / self.ny as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn nyquist(&self) -> (f64, f64) {
        (PI * self.nx as f64 / self.period, PI * self.ny as f64 / self.period)
    }

    /// Semi-axes `(K₁, K₂)` of the resolved band.
    pub fn band_axes(&self) -> (f64, f64) {
        let (a, b) = self.nyquist();
        (self.dealias_fraction * a, self.dealias_fraction * b)
    }

    /// Largest radius `r` with the disk `|ξ| ≤ r` inside the resolved band.
    pub fn band_inner_radius(&self) -> f64 {
        let (a, b) = self.band_axes();
        a.min(b)
    }

    /// Same sample counts on a torus with a different period.
    pub fn with_period(&self, period: f64) -> Result<Self> {
        Self::anisotropic(period, self.nx, self.ny, self.dealias_fraction)
    }

    pub fn in_band(&self, xi1: f64, xi2: f64) -> bool {
        let (a, b) = self.band_axes();
        (xi1 / a).powi(2) + (xi2 / b).powi(2) <= 1.0 + 1e-12
    }

    /// Signed lattice index for array position `i` of an axis with `n` points.
    pub fn signed_index(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Array position of lattice index `m`, if it is represented.
    pub fn position(m: i64, n: usize) -> Option<usize> {
        let half = (n / 2) as i64;
        if m < -half || m >= half {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + n as i64) as usize)
        }
    }

    /// Flat row-major index of mode `(m1, m2)`; rows run along x₂.
    pub fn mode_index(&self, m1: i64, m2: i64) -> Option<usize> {
        Some(Self::position(m2, self.ny)? * self.nx + Self::position(m1, self.nx)?)
    }

    /// Shared frequency tables for this grid.
    pub fn wavenumbers(&self) -> Arc<Wavenumbers> {
        Wavenumbers::cached(self)
    }

    fn key(&self) -> (u64, usize, usize, u64) {
        (self.period.to_bits(), self.nx, self.ny, self.dealias_fraction.to_bits())
    }
}

/// Frequency tables: per-axis wavenumbers, `|ξ|²` and the band mask, row-major.
#[derive(Debug)]
pub struct Wavenumbers {
    pub kx: Vec<f64>,
    pub ky: Vec<f64>,
    pub k2: Vec<f64>,
    pub mask: Vec<bool>,
    /// Position of `-m` for each x position (and likewise for y).
    pub neg_x: Vec<usize>,
    pub neg_y: Vec<usize>,
}

type Key = (u64, usize, usize, u64);
static TABLES: LazyLock<Mutex<HashMap<Key, Arc<Wavenumbers>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

impl Wavenumbers {
    fn cached(grid: &GridSpec) -> Arc<Self> {
        let mut map = TABLES.lock().expect("wavenumber cache poisoned");
        if let Some(w) = map.get(&grid.key()) {
            return w.clone();
        }
        if map.len() >= 16 {
            map.clear();
        }
        let w = Arc::new(Self::build(grid));
        map.insert(grid.key(), w.clone());
        w
    }

    fn build(grid: &GridSpec) -> Self {
        let h = grid.spacing();
        let kx: Vec<f64> =
            (0..grid.nx).map(|i| h * GridSpec::signed_index(i, grid.nx) as f64).collect();
        let ky: Vec<f64> =
            (0..grid.ny).map(|i| h * GridSpec::signed_index(i, grid.ny) as f64).collect();
        let mut k2 = Vec::with_capacity(grid.len());
        let mut mask = Vec::with_capacity(grid.len());
        for (iy, &b) in ky.iter().enumerate() {
            for (ix, &a) in kx.iter().enumerate() {
                k2.push(a * a + b * b);
                let nyq = ix == grid.nx / 2 || iy == grid.ny / 2;
                mask.push(!nyq && grid.in_band(a, b));
            }
        }
        let neg = |n: usize| (0..n).map(|i| (n - i) % n).collect::<Vec<_>>();
        Self { kx, ky, k2, mask, neg_x: neg(grid.nx), neg_y: neg(grid.ny) }
    }
}
