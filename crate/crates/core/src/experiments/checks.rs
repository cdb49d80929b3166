//! Self-checks of the numerical substrate, shared by the CLI and the
//! acceptance harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::fit::line_fit;
use crate::besov::{besov_norm, bony_decompose, build_partition, BesovIndex};
use crate::error::Result;
use crate::picard::{bilinear_b, oracle_bilinear_b, random_vector_field, QuadratureSpec, SamplerSpec};
use crate::solver::{integrate_state, linearized_oracle, RunSpec, SolverState};
use crate::spectral::{Complex64, Direction, Field, GridSpec, VectorField};

pub const ROUNDTRIP_TOL: f64 = 1e-12;
pub const PARSEVAL_TOL: f64 = 1e-10;
pub const SEMIGROUP_TOL: f64 = 1e-12;
pub const PARTITION_TOL: f64 = 1e-12;
pub const DILATION_TOL: f64 = 1e-10;
pub const BONY_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-8;
pub const MASS_TOL: f64 = 1e-9;
pub const LINEAR_SLOPE: (f64, f64) = (2.0, 0.1);
pub const TEMPORAL_FACTOR: (f64, f64) = (4.0, 0.5);

/// Real field with Gaussian coefficients on `0 < |ξ| ≤ radius`, plus `mean`.
pub fn random_real_field(grid: &GridSpec, radius: f64, mean: f64, rng: &mut impl Rng) -> Result<Field> {
    let f = Field::from_spectral_fn(*grid, false, |a, b| {
        let r = a.hypot(b);
        if r > 0.0 && r <= radius {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let phys = f.into_physical();
    let vals = phys.values().iter().map(|z| Complex64::new(z.re + mean, 0.0)).collect();
    Ok(Field::from_physical(*grid, vals, true)?.into_spectral())
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct SubstrateReport {
    /// Max abs error of forward then inverse on unit-scale complex data.
    pub roundtrip: f64,
    /// Relative gap between physical and spectral `L²` energy.
    pub parseval: f64,
    /// `e^{tΔ}e^{sΔ}f` against `e^{(t+s)Δ}f`, relative to `max|f̂|`.
    pub semigroup: f64,
    /// Max `|Σ_j φ_j − 1|` over band points in the covered range.
    pub partition: f64,
}

impl SubstrateReport {
    pub fn pass(&self) -> bool {
        self.roundtrip <= ROUNDTRIP_TOL
            && self.parseval <= PARSEVAL_TOL
            && self.semigroup <= SEMIGROUP_TOL
            && self.partition <= PARTITION_TOL
    }
}

fn substrate_grids() -> Result<Vec<GridSpec>> {
    let p = 2.0 * std::f64::consts::PI;
    Ok(vec![
        GridSpec::square(p, 64)?,
        GridSpec::square(2.0 * p, 128)?,
        GridSpec::anisotropic(7.0 * p, 256, 64, crate::spectral::DEFAULT_DEALIAS)?,
    ])
}

pub fn substrate_check(seed: u64) -> Result<SubstrateReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SubstrateReport { roundtrip: 0.0, parseval: 0.0, semigroup: 0.0, partition: 0.0 };
    for grid in substrate_grids()? {
        for _ in 0..10 {
            let vals: Vec<Complex64> = (0..grid.len())
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let f = Field::from_physical(grid, vals.clone(), false)?;
            let back = f.transform(Direction::Forward)?.transform(Direction::Inverse)?;
            rep.roundtrip = rep.roundtrip.max(max_abs_diff(back.values(), &vals));

            let phys: f64 = vals.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_area();
            let spec = f.spectral_energy() * grid.cell_area();
            rep.parseval = rep.parseval.max((phys - spec).abs() / phys);

            let g = random_real_field(&grid, grid.band_inner_radius(), 0.0, &mut rng)?;
            let (t, s) = (rng.random_range(0.0..0.05), rng.random_range(0.0..0.05));
            let two = g.heat_propagate(t)?.heat_propagate(s)?;
            let one = g.heat_propagate(t + s)?;
            rep.semigroup = rep.semigroup.max(max_abs_diff(two.values(), one.values()) / max_abs(g.values()));
        }
        let part = build_partition(&grid)?;
        let (_, hi) = part.covered_range();
        let w = grid.wavenumbers();
        for (iy, &b) in w.ky.iter().enumerate() {
            for (ix, &a) in w.kx.iter().enumerate() {
                let r = a.hypot(b);
                if !w.mask[iy * grid.nx() + ix] || r == 0.0 || r >= hi {
                    continue;
                }
                let sum: f64 = part.blocks().map(|j| part.block_symbol(j, r)).sum();
                rep.partition = rep.partition.max((sum - 1.0).abs());
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct BesovReport {
    /// Max relative error of `‖f(2·)‖ = 2^{s−2/p}‖f‖` over fields and indices.
    pub dilation: f64,
    /// Max `‖T_f g + T_g f + R − fg‖_∞ / ‖fg‖_∞`.
    pub bony: f64,
    pub fields: usize,
}

impl BesovReport {
    pub fn pass(&self) -> bool {
        self.dilation <= DILATION_TOL && self.bony <= BONY_TOL
    }
}

pub fn besov_check(seed: u64, fields: usize) -> Result<BesovReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = GridSpec::square(2.0 * std::f64::consts::PI, 64)?;
    let part = build_partition(&grid)?;
    let small = grid.with_period(grid.period() / 2.0)?;
    let part_small = build_partition(&small)?;
    let indices = [
        BesovIndex::new(-0.5, 4.0, 2.0)?,
        BesovIndex::new(-0.5, 4.0, 1.0)?,
        BesovIndex::new(0.5, 2.0, 1.0)?,
        BesovIndex::new(1.0, f64::INFINITY, f64::INFINITY)?,
        BesovIndex::new(0.0, 3.0, 4.0)?,
    ];
    let mut rep = BesovReport { dilation: 0.0, bony: 0.0, fields };
    for k in 0..fields {
        let f = random_real_field(&grid, grid.band_inner_radius(), 0.0, &mut rng)?;
        let d = f.dilate2()?;
        for idx in &indices {
            let base = besov_norm(&f, *idx, &part)?;
            let dil = besov_norm(&d, *idx, &part_small)?;
            let expect = 2f64.powf(idx.s - 2.0 / idx.p) * base;
            rep.dilation = rep.dilation.max((dil - expect).abs() / expect);
        }
        if k < 10 {
            let half = 0.5 * grid.band_inner_radius();
            let a = random_real_field(&grid, half, 0.0, &mut rng)?;
            let b = random_real_field(&grid, half, 0.0, &mut rng)?;
            let total = bony_decompose(&a, &b, &part)?.total()?.into_physical();
            let prod = a.pointwise_product(&b)?.into_physical();
            let err = max_abs_diff(total.values(), prod.values()) / max_abs(prod.values());
            rep.bony = rep.bony.max(err);
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub max_rel: f64,
    pub pairs: usize,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.max_rel <= ORACLE_TOL
    }
}

/// `bilinear_b` against the dense oracle on a `16²` grid at a few times.
pub fn oracle_check(seed: u64, pairs: usize, quad: &QuadratureSpec) -> Result<OracleReport> {
    let sampler = SamplerSpec { n: 16, k_min: 1.0, k_max: 2.6, seed, ..SamplerSpec::default() };
    let grid = sampler.grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel = 0.0f64;
    for k in 0..pairs {
        let f = random_vector_field(&sampler, &grid, &mut rng)?;
        let g = random_vector_field(&sampler, &grid, &mut rng)?;
        let t = [0.01, 0.1, 1.0][k % 3];
        let fast = bilinear_b(&f, &g, t, quad)?;
        let slow = oracle_bilinear_b(&f, &g, t)?;
        max_rel = max_rel.max(fast.rel_l2_diff(&slow)?);
    }
    Ok(OracleReport { max_rel, pairs })
}

#[derive(Clone, Debug)]
pub struct SolverReport {
    /// Relative drift of `∫h` on data with non-zero mean.
    pub mass_drift: f64,
    pub linear_slope: f64,
    pub linear_residual: f64,
    /// `err(dt)/err(dt/2)` against a reference at a quarter of the finer step.
    pub temporal_factor: f64,
}

impl SolverReport {
    pub fn pass(&self) -> bool {
        self.mass_drift <= MASS_TOL
            && (self.linear_slope - LINEAR_SLOPE.0).abs() <= LINEAR_SLOPE.1
            && (self.temporal_factor - TEMPORAL_FACTOR.0).abs() <= TEMPORAL_FACTOR.1
    }
}

fn random_state(grid: &GridSpec, amp: f64, mean: f64, seed: u64, dt: f64) -> Result<SolverState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 4.0 * grid.spacing();
    let mut draw = |m: f64| -> Result<Field> {
        let f = random_real_field(grid, radius, 0.0, &mut rng)?;
        let scale = amp / f.lp_norm(f64::INFINITY)?;
        let g = f.scale(scale);
        Ok(if m != 0.0 { g.add(&Field::constant(*grid, m).to_spectral())? } else { g })
    };
    let h = draw(mean)?;
    let u = VectorField::new(draw(0.0)?, draw(0.0)?)?;
    SolverState::new(h, u, dt)
}

fn run_to(state: SolverState, t: f64) -> Result<SolverState> {
    let spec = RunSpec { sample_every: usize::MAX, ..RunSpec::default() };
    Ok(integrate_state(state, t, &spec)?.1)
}

fn state_diff(a: &SolverState, b: &SolverState) -> Result<f64> {
    let dh = a.h.sub(&b.h)?.spectral_energy();
    let du = a.u.sub(&b.u)?.spectral_energy();
    Ok((dh + du).sqrt())
}

/// Mass drift, amplitude scaling of the deviation from the linearized flow,
/// and the observed temporal order, on a `32²` torus of period `2π`.
pub fn solver_check(seed: u64) -> Result<SolverReport> {
    let grid = GridSpec::square(2.0 * std::f64::consts::PI, 32)?;

    let state = random_state(&grid, 0.2, 0.05, seed, 1e-3)?;
    let spec = RunSpec { sample_every: 16, ..RunSpec::default() };
    let (traj, _) = integrate_state(state, 0.5, &spec)?;
    let mass_drift = traj.max_mass_drift();

    let t_lin = 0.25;
    let mut pts = Vec::new();
    for k in 0..4 {
        let amp = 0.04 / 2f64.powi(k);
        let s0 = random_state(&grid, amp, 0.0, seed + 1, 2.5e-4)?;
        let (h_lin, u_lin) = linearized_oracle(&s0.h, &s0.u, t_lin)?;
        let fin = run_to(s0, t_lin)?;
        let dev = (fin.h.sub(&h_lin)?.spectral_energy() + fin.u.sub(&u_lin)?.spectral_energy()).sqrt();
        pts.push((amp, dev));
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|(a, d)| (a.ln(), d.ln())).collect();
    let (slope, _, residual) = line_fit(&xy);

    let t_ord = 0.5;
    let dt = t_ord / 64.0;
    let base = random_state(&grid, 0.3, 0.0, seed + 2, dt)?;
    let coarse = run_to(base.clone(), t_ord)?;
    let fine = run_to(SolverState { dt: dt / 2.0, ..base.clone() }, t_ord)?;
    let reference = run_to(SolverState { dt: dt / 8.0, ..base }, t_ord)?;
    let temporal_factor = state_diff(&coarse, &reference)? / state_diff(&fine, &reference)?;

    Ok(SolverReport { mass_drift, linear_slope: slope, linear_residual: residual, temporal_factor })
}
