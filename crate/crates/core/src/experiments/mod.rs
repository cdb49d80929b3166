//! Configuration, inflation sweeps, scaling fits and table/plot output.

pub mod checks;
mod config;
mod fit;
mod q2;
mod record;
mod sweep;
pub mod verdict;

pub use config::{CaseConfig, Config, GridConfig, SolverConfig, SweepConfig};
pub use fit::{fit_points, fit_scaling, non_increasing, strictly_increasing, FitResult, Model};
pub use q2::{rows_to_csv, run_q2_boundedness, Q2Report, Q2Row, Q2Verdict, FLAT_TOLERANCE};
pub use record::{emit, grid_label, parse_csv, to_csv_string, to_svg, Column, Format, SweepRecord, CSV_HEADER};
pub use sweep::{
    admit, predict_peak_bytes, run_inflation_case, run_inflation_outcomes, run_inflation_sweep, CaseOutcome,
    SolverSummary, Stage, UNCOVERED_LIMIT, DATA_PEAK_GRIDS, PICARD_PEAK_GRIDS, SOLVER_PEAK_GRIDS,
};
