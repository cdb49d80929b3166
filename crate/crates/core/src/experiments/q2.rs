use std::collections::BTreeMap;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::config::Config;
use super::fit::{fit_points, FitResult, Model};
use super::sweep::{admit, Stage};
use crate::besov::build_partition;
use crate::construction::{critical_time, make_data};
use crate::error::{Error, Result};
use crate::picard::{operator_norm_estimates, pair_ratios, SamplerSpec};

/// Largest `‖B(f,g)(t)‖/(‖f‖‖g‖)` of one source at one `N` and one `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Q2Row {
    /// `random`, `random/<batch>` or the construction regime.
    pub source: String,
    #[serde(rename = "N")]
    pub n: u32,
    pub q: f64,
    pub max_ratio: f64,
}

/// Trend of the per-`N` maxima for one `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Q2Verdict {
    pub q: f64,
    pub maxima: Vec<(u32, f64)>,
    pub fit: Option<FitResult>,
    /// `q = 2`: slope within `±0.1` of zero. Other `q`: slope positive.
    /// `None` when fewer than three `N` values have a maximum.
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Q2Report {
    pub rows: Vec<Q2Row>,
    pub verdicts: Vec<Q2Verdict>,
}

/// Tolerance on the `q = 2` log-slope.
pub const FLAT_TOLERANCE: f64 = 0.1;

/// Random pairs dilated by `2^N`, plus `B(u₀, u₀)` of every configured
/// construction family, observed at `t₀(N)` times `sweep.time_factors`.
/// Each `q` in `sweep.q_values` gets a verdict on the slope of
/// `log max-ratio` against `log N`.
pub fn run_q2_boundedness(cfg: &Config) -> Result<Q2Report> {
    let sw = &cfg.sweep;
    if sw.q_values.is_empty() {
        return Err(Error::Config("sweep.q_values is empty".into()));
    }
    let mut rows = Vec::new();

    if sw.trials > 0 {
        let batch = (sw.trials / 4).max(1);
        for &n in &sw.n_list {
            let t0 = critical_time(n)?;
            let times: Vec<f64> = sw.time_factors.iter().map(|f| f * t0).collect();
            let sampler = SamplerSpec { scale_exponent: n as i32, seed: sw.seed, ..sw.sampler.clone() };
            let est = operator_norm_estimates(&sw.q_values, &sampler, sw.trials, &times, &cfg.quadrature)?;
            for (k, e) in est.iter().enumerate() {
                let q = sw.q_values[k];
                rows.push(Q2Row { source: "random".into(), n, q, max_ratio: e.max_ratio });
                for (b, chunk) in e.trials.chunks(batch).enumerate() {
                    let m = chunk.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
                    if m.is_finite() {
                        rows.push(Q2Row { source: format!("random/{b}"), n, q, max_ratio: m });
                    }
                }
            }
            info!("q2: random pairs at N={n} done");
        }
    }

    for family in &sw.family {
        for &n in &family.n_list {
            let case = family.case(n)?;
            let grid = match admit(cfg, family, &case, Stage::Picard) {
                Ok(g) => g,
                Err(Error::Resource(msg)) => {
                    warn!("q2: {} N={n} skipped: {msg}", family.regime);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let data = make_data(&case, &grid)?;
            let part = build_partition(&grid)?;
            let t0 = critical_time(n)?;
            let mut times: Vec<f64> = sw.time_factors.iter().map(|f| f * t0).collect();
            times.sort_by(|a, b| a.total_cmp(b));
            let ratios = pair_ratios(&data.u0, &data.u0, &sw.q_values, &times, &cfg.quadrature, &part)?;
            for (k, r) in ratios.into_iter().enumerate() {
                if let Some(r) = r {
                    rows.push(Q2Row { source: family.regime.to_string(), n, q: sw.q_values[k], max_ratio: r });
                }
            }
            info!("q2: {} N={n} done", family.regime);
        }
    }

    let verdicts = sw
        .q_values
        .iter()
        .map(|&q| {
            let mut per_n: BTreeMap<u32, f64> = BTreeMap::new();
            for r in rows.iter().filter(|r| r.q == q && !r.source.starts_with("random/")) {
                let e = per_n.entry(r.n).or_insert(f64::NEG_INFINITY);
                *e = e.max(r.max_ratio);
            }
            let maxima: Vec<(u32, f64)> = per_n.into_iter().collect();
            let fit = fit_points(&maxima, Model::Power).ok();
            let pass = fit.as_ref().map(|f| {
                if q == 2.0 {
                    f.within(0.0, FLAT_TOLERANCE)
                } else {
                    f.exponent > 0.0
                }
            });
            Q2Verdict { q, maxima, fit, pass }
        })
        .collect();
    Ok(Q2Report { rows, verdicts })
}

pub fn rows_to_csv(rows: &[Q2Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["source", "N", "q", "max_ratio"])?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(body).expect("csv output is utf-8"))
}
