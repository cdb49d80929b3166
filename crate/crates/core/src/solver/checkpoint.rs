//! Binary snapshot of a solver state.
//!
//! Little-endian layout: magic `SWCK`, `u32` version (1), `f64` period,
//! `u32` nx, `u32` ny, `f64` dealias fraction, `f64` t, `f64` dt, `u64` step
//! count, then the spectral coefficients of `h`, `u₁`, `u₂`, each `ny·nx`
//! row-major `(re, im)` pairs of `f64`.

use std::io::{Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use super::SolverState;
use crate::error::{Error, Result};
use crate::spectral::{Field, GridSpec, VectorField};

const MAGIC: &[u8; 4] = b"SWCK";
const VERSION: u32 = 1;

pub fn write_checkpoint(path: &Path, state: &SolverState) -> Result<()> {
    let g = state.h.grid();
    let mut out = Vec::with_capacity(64 + 3 * g.len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&g.period().to_le_bytes());
    out.extend_from_slice(&(g.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny() as u32).to_le_bytes());
    out.extend_from_slice(&g.dealias_fraction().to_le_bytes());
    out.extend_from_slice(&state.t.to_le_bytes());
    out.extend_from_slice(&state.dt.to_le_bytes());
    out.extend_from_slice(&state.step_count.to_le_bytes());
    for f in [&state.h, state.u.u1(), state.u.u2()] {
        for z in f.to_spectral().values() {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    std::fs::File::create(path)?.write_all(&out)?;
    Ok(())
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.0.len() < N {
            return Err(Error::Config("checkpoint truncated".into()));
        }
        let (a, b) = self.0.split_at(N);
        self.0 = b;
        Ok(a.try_into().expect("length checked"))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
}

pub fn read_checkpoint(path: &Path) -> Result<SolverState> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut c = Cursor(&bytes);
    if &c.take::<4>()? != MAGIC {
        return Err(Error::Config("not a checkpoint file".into()));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::Config(format!("unsupported checkpoint version {version}")));
    }
    let period = c.f64()?;
    let nx = c.u32()? as usize;
    let ny = c.u32()? as usize;
    let dealias = c.f64()?;
    let grid = GridSpec::anisotropic(period, nx, ny, dealias)?;
    let t = c.f64()?;
    let dt = c.f64()?;
    let step_count = u64::from_le_bytes(c.take()?);
    let mut fields = Vec::with_capacity(3);
    for _ in 0..3 {
        let mut v = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            v.push(Complex64::new(c.f64()?, c.f64()?));
        }
        fields.push(Field::from_spectral(grid, v, true)?);
    }
    if !c.0.is_empty() {
        return Err(Error::Config("trailing bytes in checkpoint".into()));
    }
    let u2 = fields.pop().expect("three fields");
    let u1 = fields.pop().expect("three fields");
    let h = fields.pop().expect("three fields");
    Ok(SolverState { h, u: VectorField::new(u1, u2)?, t, dt, step_count })
}
