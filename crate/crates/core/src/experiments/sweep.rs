use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;

use super::config::{CaseConfig, Config};
use super::record::{grid_label, SweepRecord};
use crate::besov::{besov_norm_vec, build_partition, BesovIndex};
use crate::construction::{critical_time, make_data, plan_grid, InflationCase};
use crate::error::{Error, Result};
use crate::picard::{u_one, u_zero};
use crate::solver::{integrate_state, RunSpec, SolverState, Trajectory};
use crate::spectral::{buffer, GridSpec};

/// How far a row is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// `‖u₀‖` only.
    Data,
    /// `‖u₀‖`, `‖U₀(t₀)‖`, `‖U₁(t₀)‖`.
    Picard,
    /// Also `‖u(t₀)‖` and `‖U₂(t₀)‖` from the solver.
    Solver,
}

impl Stage {
    /// Peak live field storage of the stage, in complex grids.
    pub fn peak_grids(self) -> f64 {
        match self {
            Stage::Data => DATA_PEAK_GRIDS,
            Stage::Picard => PICARD_PEAK_GRIDS,
            Stage::Solver => SOLVER_PEAK_GRIDS,
        }
    }
}

/// Largest fraction of `u₀`'s mass allowed outside the resolved blocks.
pub const UNCOVERED_LIMIT: f64 = 1e-10;

pub const DATA_PEAK_GRIDS: f64 = 8.0;
pub const PICARD_PEAK_GRIDS: f64 = 24.0;
pub const SOLVER_PEAK_GRIDS: f64 = 40.0;

/// Predicted peak field allocation in bytes: `F · nx · ny · 16`, `F` from
/// [`Stage::peak_grids`].
pub fn predict_peak_bytes(grid: &GridSpec, stage: Stage) -> f64 {
    stage.peak_grids() * grid.len() as f64 * 16.0
}

/// Solver diagnostics of one row.
#[derive(Clone, Debug)]
pub struct SolverSummary {
    pub steps: u64,
    pub dt: f64,
    pub mass_drift: f64,
    pub min_one_plus_h: f64,
    pub trajectory: Trajectory,
    pub state: SolverState,
}

/// A record plus the measurements that do not go into the CSV.
#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub record: SweepRecord,
    pub grid: Option<GridSpec>,
    pub predicted_bytes: Option<f64>,
    /// Peak growth of tracked field storage during the row.
    pub measured_bytes: Option<f64>,
    pub solver: Option<SolverSummary>,
    /// Why the row was rejected.
    pub rejection: Option<String>,
}

fn empty_record(cfg: &CaseConfig, n: u32, t0: f64, seed: u64) -> SweepRecord {
    SweepRecord {
        regime: cfg.regime,
        n,
        delta: cfg.delta,
        q: cfg.q,
        c: cfg.c,
        t0,
        norm_u0: None,
        norm_big_u0: None,
        norm_big_u1: None,
        norm_u: None,
        norm_big_u2: None,
        ratio: None,
        grid_n: String::new(),
        seconds: None,
        seed,
    }
}

/// Grid for one row, refused with [`Error::Resource`] when it exceeds the
/// point limit or the memory budget.
pub fn admit(cfg: &Config, family: &CaseConfig, case: &InflationCase, stage: Stage) -> Result<GridSpec> {
    let ls = family.length_scale.unwrap_or(cfg.grid.length_scale);
    let grid = plan_grid(case, ls, cfg.grid.max_points)?;
    let mib = predict_peak_bytes(&grid, stage) / (1024.0 * 1024.0);
    if mib > cfg.grid.memory_budget_mb {
        return Err(Error::Resource(format!(
            "grid {}x{} needs about {mib:.0} MiB (budget {} MiB)",
            grid.nx(),
            grid.ny(),
            cfg.grid.memory_budget_mb
        )));
    }
    Ok(grid)
}

/// Runs one row. Resource refusals produce a rejected record; other
/// failures are errors.
pub fn run_inflation_case(cfg: &Config, family: &CaseConfig, n: u32, stage: Stage) -> Result<CaseOutcome> {
    let seed = cfg.sweep.seed;
    let t0 = critical_time(n)?;
    let case = family.case(n)?;
    let grid = match admit(cfg, family, &case, stage) {
        Ok(g) => g,
        Err(Error::Resource(msg)) => {
            warn!("N={n}: rejected: {msg}");
            return Ok(CaseOutcome {
                record: empty_record(family, n, t0, seed),
                grid: None,
                predicted_bytes: None,
                measured_bytes: None,
                solver: None,
                rejection: Some(msg),
            });
        }
        Err(e) => return Err(e),
    };
    let predicted = predict_peak_bytes(&grid, stage);
    info!("N={n}: grid {}x{}, predicted peak {:.1} MiB", grid.nx(), grid.ny(), predicted / 1048576.0);

    let start = Instant::now();
    let base = buffer::live_bytes();
    buffer::reset_peak();

    let data = make_data(&case, &grid)?;
    let part = build_partition(&grid)?;
    let idx = BesovIndex::new(-0.5, 4.0, family.q)?;
    for c in [data.u0.u1(), data.u0.u2()] {
        let frac = part.uncovered_mass_fraction(c);
        if frac > UNCOVERED_LIMIT {
            return Err(Error::Placement(format!("N={n}: {frac:.2e} of the data mass lies outside the blocks")));
        }
    }
    let norm_u0 = besov_norm_vec(&data.u0, idx, &part)?;
    let mut record = empty_record(family, n, t0, seed);
    record.norm_u0 = Some(norm_u0);
    record.grid_n = grid_label(grid.nx(), grid.ny());
    if stage == Stage::Data {
        let measured = buffer::peak_bytes().saturating_sub(base) as f64;
        if cfg.sweep.record_timing {
            record.seconds = Some(start.elapsed().as_secs_f64());
        }
        return Ok(CaseOutcome {
            record,
            grid: Some(grid),
            predicted_bytes: Some(predicted),
            measured_bytes: Some(measured),
            solver: None,
            rejection: None,
        });
    }
    let big_u0 = u_zero(&data.u0, t0)?;
    let norm_big_u0 = besov_norm_vec(&big_u0, idx, &part)?;
    let big_u1 = u_one(&data, t0, &cfg.quadrature)?;
    let norm_big_u1 = besov_norm_vec(&big_u1, idx, &part)?;

    record.norm_big_u0 = Some(norm_big_u0);
    record.norm_big_u1 = Some(norm_big_u1);
    record.ratio = Some(norm_big_u1 / norm_u0);

    let mut solver = None;
    if stage == Stage::Solver {
        let dt = t0 / cfg.solver.dt_divisor;
        let state = SolverState::new(data.h0.clone(), data.u0.clone(), dt)?;
        let spec = RunSpec {
            cfl: cfg.solver.cfl,
            sample_every: cfg.solver.sample_every,
            eps: family.eps,
            ..RunSpec::default()
        };
        let (trajectory, fin) = integrate_state(state, t0, &spec)?;
        let big_u2 = fin.u.sub(&big_u0)?.sub(&big_u1)?;
        record.norm_u = Some(besov_norm_vec(&fin.u, idx, &part)?);
        record.norm_big_u2 = Some(besov_norm_vec(&big_u2, idx, &part)?);
        solver = Some(SolverSummary {
            steps: fin.step_count,
            dt: fin.dt,
            mass_drift: trajectory.max_mass_drift(),
            min_one_plus_h: trajectory
                .samples
                .iter()
                .map(|s| s.min_one_plus_h)
                .fold(f64::INFINITY, f64::min),
            trajectory,
            state: fin,
        });
    }
    let measured = buffer::peak_bytes().saturating_sub(base) as f64;
    if cfg.sweep.record_timing {
        record.seconds = Some(start.elapsed().as_secs_f64());
    }
    info!("N={n}: ratio {:.6e} in {:.1}s", norm_big_u1 / norm_u0, start.elapsed().as_secs_f64());
    Ok(CaseOutcome {
        record,
        grid: Some(grid),
        predicted_bytes: Some(predicted),
        measured_bytes: Some(measured),
        solver,
        rejection: None,
    })
}

/// All rows of the `[case]` family, ordered by the `N` list. Rows run on a
/// pool of `sweep.workers` threads; with more than one worker the measured
/// peaks mix between rows.
pub fn run_inflation_outcomes(cfg: &Config, stage: Stage) -> Result<Vec<CaseOutcome>> {
    let family = cfg.require_case()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.sweep.workers)
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    pool.install(|| {
        family
            .n_list
            .par_iter()
            .map(|&n| run_inflation_case(cfg, family, n, stage))
            .collect()
    })
}

pub fn run_inflation_sweep(cfg: &Config, with_solver: bool) -> Result<Vec<SweepRecord>> {
    let stage = if with_solver { Stage::Solver } else { Stage::Picard };
    Ok(run_inflation_outcomes(cfg, stage)?.into_iter().map(|o| o.record).collect())
}
