//! Two real fields through one complex FFT.

use rustfft::num_complex::Complex64;

use super::buffer::Tracked;
use super::fft::{Direction, Fft2d};
use super::field::{Field, Representation};
use super::grid::GridSpec;

/// Physical samples of two real fields.
pub(crate) fn physical_pair(a: &Field, b: &Field) -> (Tracked<f64>, Tracked<f64>) {
    debug_assert_eq!(a.grid(), b.grid());
    let grid = *a.grid();
    if a.representation() == Representation::Physical
        && b.representation() == Representation::Physical
    {
        let re = a.values().iter().map(|z| z.re).collect();
        let im = b.values().iter().map(|z| z.re).collect();
        return (Tracked::from_vec(re), Tracked::from_vec(im));
    }
    let sa = a.to_spectral();
    let sb = b.to_spectral();
    let mut z: Tracked<Complex64> = Tracked::from_vec(
        sa.values().iter().zip(sb.values()).map(|(x, y)| x + Complex64::i() * y).collect(),
    );
    drop((sa, sb));
    Fft2d::get(grid.nx(), grid.ny()).process(&mut z, Direction::Inverse);
    let re = z.iter().map(|c| c.re).collect();
    let im = z.iter().map(|c| c.im).collect();
    (Tracked::from_vec(re), Tracked::from_vec(im))
}

/// Spectral coefficients of two real sample arrays, truncated to the band
/// when `dealias` is set.
pub(crate) fn spectral_pair(grid: GridSpec, a: &[f64], b: &[f64], dealias: bool) -> (Field, Field) {
    let mut z: Tracked<Complex64> =
        Tracked::from_vec(a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect());
    Fft2d::get(grid.nx(), grid.ny()).process(&mut z, Direction::Forward);
    let w = grid.wavenumbers();
    let nx = grid.nx();
    let mut fa = Tracked::filled(grid.len(), Complex64::new(0.0, 0.0));
    let mut fb = Tracked::filled(grid.len(), Complex64::new(0.0, 0.0));
    for iy in 0..grid.ny() {
        for ix in 0..nx {
            let k = iy * nx + ix;
            if dealias && !w.mask[k] {
                continue;
            }
            let zm = z[k];
            let zn = z[w.neg_y[iy] * nx + w.neg_x[ix]].conj();
            fa[k] = 0.5 * (zm + zn);
            let d = zm - zn;
            fb[k] = Complex64::new(0.5 * d.im, -0.5 * d.re);
        }
    }
    (
        Field::from_tracked(grid, Representation::Spectral, fa, true),
        Field::from_tracked(grid, Representation::Spectral, fb, true),
    )
}
