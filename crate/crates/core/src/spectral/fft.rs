//! Unitary 2D FFT on row-major `ny × nx` arrays.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::buffer::Tracked;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub struct Fft2d {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

static PLANS: LazyLock<Mutex<HashMap<(usize, usize), Arc<Fft2d>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

const BLOCK: usize = 32;

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl Fft2d {
    pub fn get(nx: usize, ny: usize) -> Arc<Self> {
        let mut map = PLANS.lock().expect("fft plan cache poisoned");
        map.entry((nx, ny))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Self {
                    nx,
                    ny,
                    fwd_x: planner.plan_fft_forward(nx),
                    inv_x: planner.plan_fft_inverse(nx),
                    fwd_y: planner.plan_fft_forward(ny),
                    inv_y: planner.plan_fft_inverse(ny),
                })
            })
            .clone()
    }

    /// In-place transform with `1/√(nx·ny)` normalization in both directions.
    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        assert_eq!(data.len(), self.nx * self.ny);
        let (px, py) = match dir {
            Direction::Forward => (&self.fwd_x, &self.fwd_y),
            Direction::Inverse => (&self.inv_x, &self.inv_y),
        };
        let scratch_len =
            px.get_inplace_scratch_len().max(py.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
        px.process_with_scratch(data, &mut scratch);

        let mut t = Tracked::filled(data.len(), Complex64::new(0.0, 0.0));
        transpose(data, &mut t, self.ny, self.nx);
        py.process_with_scratch(&mut t, &mut scratch);
        transpose(&t, data, self.nx, self.ny);

        let s = 1.0 / ((self.nx * self.ny) as f64).sqrt();
        for z in data.iter_mut() {
            *z *= s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_naive_dft() {
        let (nx, ny) = (16, 4 * 4);
        let data: Vec<Complex64> = (0..nx * ny)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        Fft2d::get(nx, ny).process(&mut fast, Direction::Forward);
        let norm = 1.0 / ((nx * ny) as f64).sqrt();
        for my in 0..ny {
            for mx in 0..nx {
                let mut acc = Complex64::new(0.0, 0.0);
                for y in 0..ny {
                    for x in 0..nx {
                        let ph = -2.0 * PI
                            * ((mx * x) as f64 / nx as f64 + (my * y) as f64 / ny as f64);
                        acc += data[y * nx + x] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((acc * norm - fast[my * nx + mx]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_square_roundtrip() {
        let (nx, ny) = (64, 16);
        let data: Vec<Complex64> =
            (0..nx * ny).map(|k| Complex64::new(k as f64, -(k as f64).sqrt())).collect();
        let mut z = data.clone();
        let f = Fft2d::get(nx, ny);
        f.process(&mut z, Direction::Forward);
        f.process(&mut z, Direction::Inverse);
        let err: f64 = z.iter().zip(&data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}
