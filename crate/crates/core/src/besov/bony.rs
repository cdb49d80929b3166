use super::partition::DyadicPartition;
use crate::error::{Error, Result};
use crate::spectral::Field;

/// Paraproduct split of `fg`.
#[derive(Clone, Debug)]
pub struct BonySplit {
    /// `T_f g = Σ_j Ṡ_{j−1} f · Δ̇_j g`.
    pub t_fg: Field,
    /// `T_g f = Σ_j Ṡ_{j−1} g · Δ̇_j f`.
    pub t_gf: Field,
    /// `R(f,g) = Σ_{|j−j'|≤1} Δ̇_j f · Δ̇_{j'} g`.
    pub rem: Field,
}

impl BonySplit {
    pub fn total(&self) -> Result<Field> {
        self.t_fg.add(&self.t_gf)?.add(&self.rem)
    }
}

fn paraproduct(low: &Field, high: &Field, part: &DyadicPartition) -> Result<Field> {
    let mut acc = Field::zeros(*part.grid());
    for j in part.blocks() {
        let hj = part.block_unchecked(high, j);
        if hj.spectral_energy() == 0.0 {
            continue;
        }
        let lj = part.low_unchecked(low, j - 1);
        acc = acc.add(&lj.pointwise_product(&hj)?)?;
    }
    Ok(acc)
}

pub fn bony_decompose(f: &Field, g: &Field, part: &DyadicPartition) -> Result<BonySplit> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    part.check_grid(f)?;
    let t_fg = paraproduct(f, g, part)?;
    let t_gf = paraproduct(g, f, part)?;
    let fb: Vec<Field> = part.blocks().map(|j| part.block_unchecked(f, j)).collect();
    let gb: Vec<Field> = part.blocks().map(|j| part.block_unchecked(g, j)).collect();
    let mut rem = Field::zeros(*part.grid());
    for (a, fa) in fb.iter().enumerate() {
        for gbb in gb.iter().take((a + 2).min(gb.len())).skip(a.saturating_sub(1)) {
            rem = rem.add(&fa.pointwise_product(gbb)?)?;
        }
    }
    Ok(BonySplit { t_fg, t_gf, rem })
}
