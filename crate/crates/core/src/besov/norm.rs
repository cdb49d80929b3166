use log::warn;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::partition::{DyadicPartition, ANNULUS};
use crate::error::{Error, Result};
use crate::spectral::buffer::Tracked;
use crate::spectral::fft::{Direction, Fft2d};
use crate::spectral::field::lp_of_magnitudes;
use crate::spectral::{Field, VectorField};

/// Regularity `s`, integrability `p` and summation exponent `q` of `Ḃ^s_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("regularity must be finite, got {s}")));
        }
        if p.is_nan() || p < 1.0 || q.is_nan() || q < 1.0 {
            return Err(Error::InvalidArgument(format!("need p, q >= 1, got p={p}, q={q}")));
        }
        Ok(Self { s, p, q })
    }
}

const UNCOVERED_WARN: f64 = 1e-10;

/// `ℓ^q` norm of a finite sequence.
pub(crate) fn lq(values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        values.iter().cloned().fold(0.0, f64::max)
    } else if q == 1.0 {
        values.iter().sum()
    } else {
        values.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `2^{js}‖Δ̇_j f‖_{L^p}` for every block, for a real field or a pair of real
/// components (pointwise Euclidean magnitude).
pub fn block_norms(comps: &[&Field], s: f64, p: f64, part: &DyadicPartition) -> Result<Vec<f64>> {
    let raw = block_lp_norms(comps, &[p], part)?.pop().expect("one exponent");
    Ok(part.blocks().zip(raw).map(|(j, v)| 2f64.powf(j as f64 * s) * v).collect())
}

/// Unweighted `‖Δ̇_j f‖_{L^p}` for each requested `p` (outer index) and block.
///
/// Each inverse FFT carries two real signals: two blocks of a scalar field, or
/// both components of one block of a vector field. All-zero blocks are skipped.
pub fn block_lp_norms(comps: &[&Field], ps: &[f64], part: &DyadicPartition) -> Result<Vec<Vec<f64>>> {
    let grid = *part.grid();
    for c in comps {
        part.check_grid(c)?;
    }
    if comps.is_empty() || comps.len() > 2 {
        return Err(Error::InvalidArgument("one or two components expected".into()));
    }
    for &p in ps {
        crate::spectral::field::check_exponent(p)?;
    }
    let spec: Vec<Field> = comps.iter().map(|c| c.to_spectral()).collect();
    let real = spec.iter().all(|c| c.is_real());
    let fft = Fft2d::get(grid.nx(), grid.ny());
    let w = grid.wavenumbers();
    let da = grid.cell_area();
    let radii: Tracked<f64> = Tracked::from_vec(w.k2.iter().map(|k| k.sqrt()).collect());
    let blocks: Vec<i32> = part.blocks().collect();
    let mut out = vec![vec![0.0; blocks.len()]; ps.len()];

    let fill = |z: &mut [Complex64], f: &Field, j: i32, imag: bool| -> bool {
        let (lo, hi) = (2f64.powi(j) * ANNULUS.0, 2f64.powi(j) * ANNULUS.1);
        let mut any = false;
        for ((zk, fk), &r) in z.iter_mut().zip(f.values()).zip(radii.iter()) {
            if r <= lo || r >= hi || *fk == Complex64::new(0.0, 0.0) {
                continue;
            }
            let m = part.block_symbol(j, r);
            if m != 0.0 {
                any = true;
                let v = fk * m;
                *zk += if imag { Complex64::new(-v.im, v.re) } else { v };
            }
        }
        any
    };
    let record = |out: &mut Vec<Vec<f64>>, b: usize, mags: &dyn Fn() -> Vec<f64>| {
        let m = mags();
        for (slot, &p) in out.iter_mut().zip(ps) {
            slot[b] = lp_of_magnitudes(m.iter().cloned(), p, da);
        }
    };
    let mut z = Tracked::filled(grid.len(), Complex64::new(0.0, 0.0));

    if spec.len() == 2 && real {
        for (b, &j) in blocks.iter().enumerate() {
            z.fill(Complex64::new(0.0, 0.0));
            let a1 = fill(&mut z, &spec[0], j, false);
            let a2 = fill(&mut z, &spec[1], j, true);
            if !(a1 || a2) {
                continue;
            }
            fft.process(&mut z, Direction::Inverse);
            record(&mut out, b, &|| z.iter().map(|c| c.norm()).collect());
        }
    } else if spec.len() == 1 && real {
        let mut b = 0;
        while b < blocks.len() {
            z.fill(Complex64::new(0.0, 0.0));
            let a1 = fill(&mut z, &spec[0], blocks[b], false);
            let a2 = b + 1 < blocks.len() && fill(&mut z, &spec[0], blocks[b + 1], true);
            if a1 || a2 {
                fft.process(&mut z, Direction::Inverse);
                if a1 {
                    record(&mut out, b, &|| z.iter().map(|c| c.re.abs()).collect());
                }
                if a2 {
                    record(&mut out, b + 1, &|| z.iter().map(|c| c.im.abs()).collect());
                }
            }
            b += 2;
        }
    } else {
        // complex data: one transform per component and block
        let mut z2 = Tracked::filled(grid.len(), Complex64::new(0.0, 0.0));
        for (b, &j) in blocks.iter().enumerate() {
            z.fill(Complex64::new(0.0, 0.0));
            z2.fill(Complex64::new(0.0, 0.0));
            let a1 = fill(&mut z, &spec[0], j, false);
            let a2 = spec.len() == 2 && fill(&mut z2, &spec[1], j, false);
            if !(a1 || a2) {
                continue;
            }
            fft.process(&mut z, Direction::Inverse);
            fft.process(&mut z2, Direction::Inverse);
            record(&mut out, b, &|| {
                z.iter().zip(z2.iter()).map(|(a, c)| (a.norm_sqr() + c.norm_sqr()).sqrt()).collect()
            });
        }
    }
    Ok(out)
}

fn warn_uncovered(comps: &[&Field], part: &DyadicPartition) {
    for c in comps {
        let frac = part.uncovered_mass_fraction(c);
        if frac > UNCOVERED_WARN {
            warn!(
                "{:.3e} of the spectral mass lies outside blocks {}..={}; the Besov norm is unreliable",
                frac,
                part.j_min(),
                part.j_max()
            );
        }
    }
}

/// Homogeneous `Ḃ^s_{p,q}` norm over the resolved blocks.
pub fn besov_norm(f: &Field, idx: BesovIndex, part: &DyadicPartition) -> Result<f64> {
    warn_uncovered(&[f], part);
    Ok(lq(&block_norms(&[f], idx.s, idx.p, part)?, idx.q))
}

/// Vector version, using the Euclidean magnitude inside `L^p`.
pub fn besov_norm_vec(u: &VectorField, idx: BesovIndex, part: &DyadicPartition) -> Result<f64> {
    warn_uncovered(&[u.u1(), u.u2()], part);
    Ok(lq(&block_norms(&[u.u1(), u.u2()], idx.s, idx.p, part)?, idx.q))
}

/// `‖f‖_{Ḃ^s_{2,1}} + ‖f‖_{Ḃ^s_{∞,1}}`.
pub fn hybrid_norm(f: &Field, s: f64, part: &DyadicPartition) -> Result<f64> {
    Ok(besov_norm(f, BesovIndex::new(s, 2.0, 1.0)?, part)?
        + besov_norm(f, BesovIndex::new(s, f64::INFINITY, 1.0)?, part)?)
}

pub fn hybrid_norm_vec(u: &VectorField, s: f64, part: &DyadicPartition) -> Result<f64> {
    Ok(besov_norm_vec(u, BesovIndex::new(s, 2.0, 1.0)?, part)?
        + besov_norm_vec(u, BesovIndex::new(s, f64::INFINITY, 1.0)?, part)?)
}
