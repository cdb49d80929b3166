use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bilinear::bilinear_b_times;
use super::quad::QuadratureSpec;
use crate::besov::{besov_norm_vec, build_partition, BesovIndex, DyadicPartition};
use crate::error::{Error, Result};
use crate::spectral::{Complex64, Field, GridSpec, VectorField};

/// Random zero-mean band-limited vector fields.
///
/// Each draw picks a log-uniform sub-annulus of `[k_min, k_max]` and fills it
/// with Gaussian coefficients. With `scale_exponent = N` the torus period and
/// the annulus are rescaled by `2^{−N}` and `2^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerSpec {
    pub n: usize,
    pub period: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub scale_exponent: i32,
    pub seed: u64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            n: 64,
            period: 2.0 * std::f64::consts::PI,
            k_min: 1.0,
            k_max: 10.0,
            scale_exponent: 0,
            seed: 7,
        }
    }
}

impl SamplerSpec {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::square(self.period * 2f64.powi(-self.scale_exponent), self.n)
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        let scale = 2f64.powi(self.scale_exponent);
        if !(self.k_min > 0.0 && self.k_max > self.k_min) {
            return Err(Error::InvalidArgument(format!(
                "sampler needs 0 < k_min < k_max, got {} and {}",
                self.k_min, self.k_max
            )));
        }
        if self.k_max * scale > 0.5 * grid.band_inner_radius() {
            return Err(Error::InvalidArgument(format!(
                "sampler band {} exceeds half the resolved band {:.3}",
                self.k_max * scale,
                0.5 * grid.band_inner_radius()
            )));
        }
        if self.k_max * scale < grid.spacing() {
            return Err(Error::InvalidArgument("sampler band contains no lattice point".into()));
        }
        Ok(())
    }
}

/// One draw from the sampler on `grid`.
pub fn random_vector_field(spec: &SamplerSpec, grid: &GridSpec, rng: &mut impl Rng) -> Result<VectorField> {
    let scale = 2f64.powi(spec.scale_exponent);
    let (lo, hi) = (spec.k_min.ln(), spec.k_max.ln());
    let mut a: f64 = rng.random_range(lo..hi);
    let mut b: f64 = rng.random_range(lo..hi);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    // keep at least one octave so the annulus is never empty
    let b = b.max(a + std::f64::consts::LN_2).min(hi);
    let a = a.min(b - std::f64::consts::LN_2).max(lo);
    let (r0, r1) = (a.exp() * scale, b.exp() * scale);
    let mut comp = || -> Result<Field> {
        let f = Field::from_spectral_fn(*grid, false, |x, y| {
            let r = x.hypot(y);
            if r >= r0 && r <= r1 {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let phys = f.into_physical();
        let re = phys.values().iter().map(|z| Complex64::new(z.re, 0.0)).collect();
        Ok(Field::from_physical(*grid, re, true)?.into_spectral())
    };
    let u1 = comp()?;
    let u2 = comp()?;
    VectorField::new(u1, u2)
}

/// `max_t ‖B(f,g)(t)‖ / (‖f‖ ‖g‖)` in `Ḃ^{−1/2}_{4,q}`, or `None` when the
/// denominator is below `1e−12`.
pub fn pair_ratio(
    f: &VectorField,
    g: &VectorField,
    q: f64,
    times: &[f64],
    quad: &QuadratureSpec,
    part: &DyadicPartition,
) -> Result<Option<f64>> {
    Ok(pair_ratios(f, g, &[q], times, quad, part)?[0])
}

/// [`pair_ratio`] for several `q` sharing one evaluation of `B`.
pub fn pair_ratios(
    f: &VectorField,
    g: &VectorField,
    qs: &[f64],
    times: &[f64],
    quad: &QuadratureSpec,
    part: &DyadicPartition,
) -> Result<Vec<Option<f64>>> {
    let idx: Vec<BesovIndex> = qs.iter().map(|&q| BesovIndex::new(-0.5, 4.0, q)).collect::<Result<_>>()?;
    let mut denom = Vec::with_capacity(qs.len());
    for &i in &idx {
        denom.push(besov_norm_vec(f, i, part)? * besov_norm_vec(g, i, part)?);
    }
    if denom.iter().all(|&d| d < 1e-12) {
        return Ok(vec![None; qs.len()]);
    }
    let mut best = vec![0.0f64; qs.len()];
    for b in bilinear_b_times(f, g, times, quad)? {
        for (k, &i) in idx.iter().enumerate() {
            if denom[k] >= 1e-12 {
                best[k] = best[k].max(besov_norm_vec(&b, i, part)? / denom[k]);
            }
        }
    }
    Ok(best.into_iter().zip(&denom).map(|(b, &d)| (d >= 1e-12).then_some(b)).collect())
}

#[derive(Clone, Debug)]
pub struct OpNormEstimate {
    pub max_ratio: f64,
    /// Per-trial maxima over the time list (`None` for degenerate draws).
    pub trials: Vec<Option<f64>>,
}

/// Largest observed `‖B(f,g)(t)‖/(‖f‖‖g‖)` over random pairs and the time list.
/// Trials run in parallel; each trial draws from its own ChaCha stream, so the
/// result does not depend on scheduling.
pub fn operator_norm_estimate(
    q: f64,
    sampler: &SamplerSpec,
    trials: usize,
    t_list: &[f64],
    quad: &QuadratureSpec,
) -> Result<OpNormEstimate> {
    Ok(operator_norm_estimates(&[q], sampler, trials, t_list, quad)?.remove(0))
}

/// [`operator_norm_estimate`] for several `q` on the same draws.
pub fn operator_norm_estimates(
    qs: &[f64],
    sampler: &SamplerSpec,
    trials: usize,
    t_list: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<OpNormEstimate>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial required".into()));
    }
    let grid = sampler.grid()?;
    sampler.validate(&grid)?;
    let part = build_partition(&grid)?;
    let mut times = t_list.to_vec();
    times.sort_by(|a, b| a.total_cmp(b));
    let results: Vec<Result<Vec<Option<f64>>>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
            rng.set_stream(k as u64);
            let f = random_vector_field(sampler, &grid, &mut rng)?;
            let g = random_vector_field(sampler, &grid, &mut rng)?;
            pair_ratios(&f, &g, qs, &times, quad, &part)
        })
        .collect();
    let per_trial: Vec<Vec<Option<f64>>> = results.into_iter().collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(qs.len());
    for k in 0..qs.len() {
        let trials: Vec<Option<f64>> = per_trial.iter().map(|r| r[k]).collect();
        let max_ratio = trials.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max_ratio.is_finite() {
            return Err(Error::InvalidArgument("sampler produced only degenerate pairs".into()));
        }
        out.push(OpNormEstimate { max_ratio, trials });
    }
    Ok(out)
}
