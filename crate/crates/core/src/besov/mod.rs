//! Littlewood–Paley blocks, homogeneous Besov norms and the Bony split.

mod bony;
mod norm;
mod partition;

pub use bony::{bony_decompose, BonySplit};
pub use norm::{
    besov_norm, besov_norm_vec, block_lp_norms, block_norms, hybrid_norm, hybrid_norm_vec, BesovIndex,
};
pub use partition::{build_partition, profile, DyadicPartition, ANNULUS};
