use crate::error::{Error, Result};
use crate::spectral::{Field, GridSpec};

/// Inner and outer radius of the Δ̇₀ annulus.
pub const ANNULUS: (f64, f64) = (0.75, 8.0 / 3.0);

/// `log b(r)` for the bump `exp(−1/(1−u²))`, `u` the affine image of `r`
/// from the annulus onto `(−1, 1)`; `−∞` outside.
fn log_bump(r: f64) -> f64 {
    let (lo, hi) = ANNULUS;
    let u = (2.0 * r - (lo + hi)) / (hi - lo);
    if u.abs() >= 1.0 {
        f64::NEG_INFINITY
    } else {
        -1.0 / (1.0 - u * u)
    }
}

/// `log Σ exp(x_i)` over finite entries; `−∞` when all are `−∞`.
fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// The Δ̇₀ profile on ℝ²: `b(r) / Σ_{k∈ℤ} b(2^{−k} r)`.
pub fn profile(r: f64) -> f64 {
    let lb = log_bump(r);
    if lb == f64::NEG_INFINITY {
        return 0.0;
    }
    let terms = [log_bump(2.0 * r), lb, log_bump(0.5 * r)];
    (lb - log_sum_exp(&terms)).exp()
}

/// Littlewood–Paley blocks `j_min..=j_max` resolved by a grid.
///
/// Interior blocks are exact dilations `φ(2^{−j}ξ)` of [`profile`]; the two
/// edge blocks absorb their missing neighbours so that the blocks sum to one
/// on the whole open range `2^{j_min}·3/4 < |ξ| < 2^{j_max}·8/3`.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicPartition {
    grid: GridSpec,
    j_min: i32,
    j_max: i32,
}

pub fn build_partition(grid: &GridSpec) -> Result<DyadicPartition> {
    let (a, b) = grid.band_axes();
    let k_max = a.max(b);
    let (lo, hi) = ANNULUS;
    let j_max = (k_max / hi).log2().floor() as i32;
    // guard the floor against rounding when 2^j·8/3 hits the band edge exactly
    let j_max = if 2f64.powi(j_max + 1) * hi <= k_max * (1.0 + 1e-9) { j_max + 1 } else { j_max };
    let spacing = grid.spacing();
    let mut j_min = (spacing / lo).log2().floor() as i32;
    if 2f64.powi(j_min) * lo >= spacing {
        j_min -= 1;
    }
    let count = j_max - j_min + 1;
    if count < 3 {
        return Err(Error::TooCoarse(count.max(0) as usize));
    }
    Ok(DyadicPartition { grid: *grid, j_min, j_max })
}

impl DyadicPartition {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn j_min(&self) -> i32 {
        self.j_min
    }
    pub fn j_max(&self) -> i32 {
        self.j_max
    }
    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// Radii covered with partition sum exactly one.
    pub fn covered_range(&self) -> (f64, f64) {
        (2f64.powi(self.j_min) * ANNULUS.0, 2f64.powi(self.j_max) * ANNULUS.1)
    }

    pub fn check_block(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::BlockOutOfRange { j, min: self.j_min, max: self.j_max });
        }
        Ok(())
    }

    /// `φ_j(r)` for a block in range (zero outside the range).
    pub fn block_symbol(&self, j: i32, r: f64) -> f64 {
        if j < self.j_min || j > self.j_max {
            return 0.0;
        }
        let own = log_bump(r * 2f64.powi(-j));
        if own == f64::NEG_INFINITY {
            return 0.0;
        }
        let mut terms = [f64::NEG_INFINITY; 3];
        for (slot, k) in terms.iter_mut().zip(j - 1..=j + 1) {
            if k >= self.j_min && k <= self.j_max {
                *slot = log_bump(r * 2f64.powi(-k));
            }
        }
        (own - log_sum_exp(&terms)).exp()
    }

    /// `Σ_{k<j} φ_k(r)`, with `j` clamped to the block range.
    pub fn low_symbol(&self, j: i32, r: f64) -> f64 {
        if j <= self.j_min {
            return 0.0;
        }
        if j > self.j_max {
            let (lo, hi) = self.covered_range();
            return if r > lo && r < hi { 1.0 } else { 0.0 };
        }
        // only blocks j−2 and j−1 can overlap the upper edge of the sum
        let (_, hi) = ANNULUS;
        if r <= 2f64.powi(j - 1) * ANNULUS.0 && r > self.covered_range().0 {
            return 1.0;
        }
        if r >= 2f64.powi(j - 1) * hi {
            return 0.0;
        }
        (self.j_min.max(j - 3)..j).map(|k| self.block_symbol(k, r)).sum()
    }

    pub fn lp_block(&self, f: &Field, j: i32) -> Result<Field> {
        self.check_grid(f)?;
        self.check_block(j)?;
        Ok(self.block_unchecked(f, j))
    }

    pub(crate) fn block_unchecked(&self, f: &Field, j: i32) -> Field {
        f.scale_even(|_, _, k2| self.block_symbol(j, k2.sqrt()))
    }

    /// `Ṡ_j f = Σ_{k<j} Δ̇_k f`; `j` may range up to `j_max + 1` (the full sum).
    pub fn low_pass(&self, f: &Field, j: i32) -> Result<Field> {
        self.check_grid(f)?;
        if j < self.j_min || j > self.j_max + 1 {
            return Err(Error::BlockOutOfRange { j, min: self.j_min, max: self.j_max + 1 });
        }
        Ok(self.low_unchecked(f, j))
    }

    pub(crate) fn low_unchecked(&self, f: &Field, j: i32) -> Field {
        if j <= self.j_min {
            return Field::zeros(self.grid);
        }
        f.scale_even(|_, _, k2| self.low_symbol(j, k2.sqrt()))
    }

    pub(crate) fn check_grid(&self, f: &Field) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Fraction of `Σ|f̂|²` on lattice points outside the covered range
    /// (including the zero mode).
    pub fn uncovered_mass_fraction(&self, f: &Field) -> f64 {
        let (lo, hi) = self.covered_range();
        f.energy_outside(|a, b| {
            let r = a.hypot(b);
            r > lo && r < hi
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn profile_support() {
        assert_eq!(profile(0.75 - 1e-12), 0.0);
        assert_eq!(profile(8.0 / 3.0 + 1e-12), 0.0);
        assert!(profile(1.0) > 0.0);
    }

    #[test]
    fn block_range_from_grid() {
        let g = GridSpec::square(2.0 * PI, 1024).unwrap();
        let p = build_partition(&g).unwrap();
        assert_eq!(p.j_max(), 7);
        assert_eq!(p.j_min(), 0);
        let g = GridSpec::square(2.0 * PI, 16).unwrap();
        assert!(matches!(build_partition(&g), Err(Error::TooCoarse(_))));
    }

    #[test]
    fn interior_blocks_are_dilations() {
        let g = GridSpec::square(2.0 * PI, 1024).unwrap();
        let p = build_partition(&g).unwrap();
        for &r in &[3.1, 4.0, 7.7, 10.0] {
            assert!((p.block_symbol(2, r) - profile(r / 4.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn low_symbol_matches_sum() {
        let g = GridSpec::square(2.0 * PI, 1024).unwrap();
        let p = build_partition(&g).unwrap();
        for i in 1..400 {
            let r = i as f64 * 0.85;
            for j in p.j_min()..=p.j_max() + 1 {
                let direct: f64 = (p.j_min()..j).map(|k| p.block_symbol(k, r)).sum();
                assert!((p.low_symbol(j, r) - direct).abs() < 1e-14, "r={r} j={j}");
            }
        }
    }
}
