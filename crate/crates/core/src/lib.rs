//! Pseudo-spectral laboratory for norm inflation of the 2D viscous shallow
//! water system in critical Besov spaces.

pub mod besov;
pub mod construction;
pub mod error;
pub mod experiments;
pub mod picard;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
