//! Periodic grids, fields and the Fourier-multiplier calculus.

pub mod buffer;
pub mod fft;
pub mod field;
pub mod grid;
pub mod multiplier;
pub(crate) mod pack;
pub mod quadrature;

pub use fft::Direction;
pub use field::{Field, Representation, VectorField};
pub use grid::{make_grid, GridSpec, Wavenumbers, DEFAULT_DEALIAS};
pub use multiplier::{Multiplier, Origin};
pub use quadrature::GaussLegendre;
pub use rustfft::num_complex::Complex64;
