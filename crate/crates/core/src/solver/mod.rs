//! Integrating-factor Heun integration of the viscous shallow water system
//! `∂ₜh + div u + u·∇h = −h div u`, `∂ₜu + u·∇u − Δu + ∇h = ∇ln(1+h)·∇u`.

mod checkpoint;
mod linear;
mod rhs;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use linear::linearized_oracle;
pub use rhs::{Terms, POSITIVITY_FLOOR};

use serde::{Deserialize, Serialize};

use crate::besov::{block_lp_norms, build_partition, DyadicPartition};
use crate::construction::{critical_time, InitialData};
use crate::error::{Error, Result};
use crate::picard::{u_one, u_zero, QuadratureSpec};
use crate::spectral::{Field, VectorField};

/// Default CFL number.
pub const DEFAULT_CFL: f64 = 0.4;

#[derive(Clone, Debug)]
pub struct SolverState {
    pub h: Field,
    pub u: VectorField,
    pub t: f64,
    pub dt: f64,
    pub step_count: u64,
}

impl SolverState {
    pub fn new(h: Field, u: VectorField, dt: f64) -> Result<Self> {
        if h.grid() != u.grid() {
            return Err(Error::GridMismatch);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { h: h.dealias(), u: u.map(|c| Ok(c.dealias()))?, t: 0.0, dt, step_count: 0 })
    }

    /// `∫ h` over the torus.
    pub fn mass(&self) -> f64 {
        self.h.integral().re
    }
}

fn with_time(e: Error, t: f64) -> Error {
    match e {
        Error::Positivity { min, .. } => Error::Positivity { t, min },
        Error::BlowUp(_) => Error::BlowUp(t),
        other => other,
    }
}

fn heat_factor(f: &Field, dt: f64) -> Field {
    f.scale_even(|_, _, k2| (-dt * k2).exp())
}

/// One integrating-factor Heun step: with `E = e^{dtΔ}`,
/// `u* = E(uⁿ + dt N(uⁿ))`, `uⁿ⁺¹ = E uⁿ + dt/2 (E N(uⁿ) + N(u*))`;
/// `h` uses plain Heun. Returns the new state and `max|u|` at the start.
pub fn step_with(state: &SolverState, terms: Terms) -> Result<(SolverState, f64)> {
    let dt = state.dt;
    let r0 = rhs::evaluate(&state.h, &state.u, terms).map_err(|e| with_time(e, state.t))?;
    let u_star = VectorField::new(
        heat_factor(&state.u.u1().add_scaled(dt, &r0.du[0])?, dt),
        heat_factor(&state.u.u2().add_scaled(dt, &r0.du[1])?, dt),
    )?;
    let h_star = state.h.add_scaled(dt, &r0.dh)?;
    let r1 = rhs::evaluate(&h_star, &u_star, terms).map_err(|e| with_time(e, state.t + dt))?;
    drop((u_star, h_star));
    let next_u = |k: usize| -> Result<Field> {
        let base = heat_factor(&state.u.component(k).add_scaled(0.5 * dt, &r0.du[k])?, dt);
        Ok(base.add_scaled(0.5 * dt, &r1.du[k])?.dealias())
    };
    let u = VectorField::new(next_u(0)?, next_u(1)?)?;
    let h = state.h.add_scaled(0.5 * dt, &r0.dh)?.add_scaled(0.5 * dt, &r1.dh)?.dealias();
    let t = state.t + dt;
    let next = SolverState { h, u, t, dt, step_count: state.step_count + 1 };
    Ok((next, r0.u_max))
}

pub fn step(state: &SolverState) -> Result<SolverState> {
    Ok(step_with(state, Terms::default())?.0)
}

/// Norm quantities sampled along a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    /// `‖h‖_{Ḃ^ε_{[2,∞],1}}`
    pub h_eps: f64,
    /// `‖h‖_{Ḃ^{1+ε}_{[2,∞],1}}`
    pub h_1eps: f64,
    /// `‖u‖_{Ḃ^ε_{[2,∞],1}}`
    pub u_eps: f64,
    /// `‖u‖_{Ḃ^{2+ε}_{[2,∞],1}}`
    pub u_2eps: f64,
    /// Trapezoidal `∫₀ᵗ ‖u‖_{Ḃ^{2+ε}_{[2,∞],1}}` over the samples so far.
    pub u_2eps_l1: f64,
    pub mass: f64,
    pub min_one_plus_h: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn sup(&self, f: impl Fn(&Sample) -> f64) -> f64 {
        self.samples.iter().map(f).fold(0.0, f64::max)
    }

    pub fn max_mass_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else { return 0.0 };
        let scale = self.samples.iter().map(|s| s.mass.abs()).fold(0.0, f64::max);
        let drift = self.samples.iter().map(|s| (s.mass - first.mass).abs()).fold(0.0, f64::max);
        if scale > 0.0 {
            drift / scale
        } else {
            drift
        }
    }
}

fn hybrid_weighted(raw: &[Vec<f64>], part: &DyadicPartition, s: f64) -> f64 {
    part.blocks()
        .enumerate()
        .map(|(b, j)| 2f64.powf(j as f64 * s) * (raw[0][b] + raw[1][b]))
        .sum()
}

fn sample(state: &SolverState, part: &DyadicPartition, eps: f64, prev: Option<&Sample>) -> Result<Sample> {
    let ps = [2.0, f64::INFINITY];
    let hraw = block_lp_norms(&[&state.h], &ps, part)?;
    let uraw = block_lp_norms(&[state.u.u1(), state.u.u2()], &ps, part)?;
    let u_2eps = hybrid_weighted(&uraw, part, 2.0 + eps);
    let u_2eps_l1 = match prev {
        Some(p) => p.u_2eps_l1 + 0.5 * (state.t - p.t) * (p.u_2eps + u_2eps),
        None => 0.0,
    };
    let hp = state.h.to_physical();
    let min_one_plus_h = hp.values().iter().map(|z| 1.0 + z.re).fold(f64::INFINITY, f64::min);
    Ok(Sample {
        t: state.t,
        h_eps: hybrid_weighted(&hraw, part, eps),
        h_1eps: hybrid_weighted(&hraw, part, 1.0 + eps),
        u_eps: hybrid_weighted(&uraw, part, eps),
        u_2eps,
        u_2eps_l1,
        mass: state.mass(),
        min_one_plus_h,
    })
}

/// Run controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSpec {
    pub cfl: f64,
    pub sample_every: usize,
    /// Regularity offset ε of the sampled norms.
    pub eps: f64,
    #[serde(skip)]
    pub terms: Terms,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self { cfl: DEFAULT_CFL, sample_every: 64, eps: 0.01, terms: Terms::default() }
    }
}

/// Largest step allowed by the CFL guard for speed `u_max` on this grid.
pub fn stable_dt(state: &SolverState, u_max: f64, cfl: f64) -> f64 {
    let g = state.h.grid();
    let dx = g.dx().min(g.dy());
    cfl * (dx / u_max.max(1e-300)).min(dx)
}

/// Advances to `t_end` with a step no larger than `state.dt`, adjusted so that
/// `t_end` is hit exactly. Samples at the start, every `sample_every` steps and
/// at the end.
pub fn integrate_state(
    mut state: SolverState,
    t_end: f64,
    spec: &RunSpec,
) -> Result<(Trajectory, SolverState)> {
    if !(t_end >= state.t) {
        return Err(Error::InvalidArgument(format!("t_end {t_end} precedes current time {}", state.t)));
    }
    let part = build_partition(state.h.grid())?;
    let span = t_end - state.t;
    let steps = (span / state.dt * (1.0 - 1e-12)).ceil().max(0.0) as u64;
    if steps > 0 {
        state.dt = span / steps as f64;
    }
    let t_start = state.t;
    let mut traj = Trajectory { samples: vec![sample(&state, &part, spec.eps, None)?] };
    let every = spec.sample_every.max(1) as u64;
    for k in 1..=steps {
        let (mut next, u_max) = step_with(&state, spec.terms)?;
        let limit = stable_dt(&state, u_max, spec.cfl);
        if state.dt > limit {
            return Err(Error::StepTooLarge { dt: state.dt, suggested: limit });
        }
        if k == steps {
            next.t = t_end;
        } else {
            next.t = t_start + k as f64 * state.dt;
        }
        state = next;
        if k % every == 0 || k == steps {
            let prev = traj.samples.last();
            let s = sample(&state, &part, spec.eps, prev)?;
            traj.samples.push(s);
        }
    }
    Ok((traj, state))
}

/// Runs construction data to `t_end` with step `dt`.
pub fn integrate(
    data: &InitialData,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<(Trajectory, SolverState)> {
    let state = SolverState::new(data.h0.clone(), data.u0.clone(), dt)?;
    let spec = RunSpec { sample_every, eps: data.case.eps, ..RunSpec::default() };
    integrate_state(state, t_end, &spec)
}

/// Default acceptance step `t₀/2048`.
pub fn default_dt(n: u32) -> Result<f64> {
    Ok(critical_time(n)? / 2048.0)
}

/// `U₂ = u − U₀ − U₁` at time `t`.
pub fn remainder_u2(
    u_final: &VectorField,
    data: &InitialData,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<VectorField> {
    if *u_final.grid() != data.grid {
        return Err(Error::GridMismatch);
    }
    let u0 = u_zero(&data.u0, t)?;
    let u1 = u_one(data, t, quad)?;
    u_final.sub(&u0)?.sub(&u1)
}
