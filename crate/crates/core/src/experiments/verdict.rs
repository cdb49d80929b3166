//! Pass/fail rules over sweep results.

use super::fit::{fit_scaling, non_increasing, strictly_increasing, FitResult, Model};
use super::record::{Column, SweepRecord};
use super::sweep::CaseOutcome;
use crate::construction::Regime;

/// Tolerance on fitted exponents of the data norm and of the qgt2 ratio.
pub const EXPONENT_TOLERANCE: f64 = 0.15;
/// Tolerance on the qlt2 ratio exponent.
pub const QLT2_RATIO_TOLERANCE: f64 = 0.2;
/// Upper bound on `‖U₂(t₀)‖ / ‖U₁(t₀)‖`.
pub const REMAINDER_RATIO: f64 = 0.5;
/// Slack of the triangle inequality.
pub const TRIANGLE_SLACK: f64 = 1e-9;
/// Lower bound on `min (1 + h)` over a solver run.
pub const DEPTH_FLOOR: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

fn accepted(records: &[SweepRecord]) -> Vec<&SweepRecord> {
    let mut v: Vec<&SweepRecord> = records.iter().filter(|r| !r.rejected()).collect();
    v.sort_by_key(|r| r.n);
    v
}

fn describe(fit: &Result<FitResult, crate::Error>) -> String {
    match fit {
        Ok(f) => format!(
            "exponent {:.4}, residual {:.4}, N {}..{}",
            f.exponent, f.residual, f.n_range.0, f.n_range.1
        ),
        Err(e) => format!("no fit ({e})"),
    }
}

/// qgt2: the exponent of `‖u₀‖/ln N` against `N` is within
/// [`EXPONENT_TOLERANCE`] of `−(1/2 − 1/q)`.
/// qlt2: `‖u₀‖ ln N` is non-increasing.
pub fn data_norm_verdict(records: &[SweepRecord], threshold: f64) -> Verdict {
    let rows = accepted(records);
    if rows.len() < records.len() {
        return Verdict { pass: false, detail: format!("{} of {} rows rejected", records.len() - rows.len(), records.len()) };
    }
    let Some(first) = rows.first() else {
        return Verdict { pass: false, detail: "no rows".into() };
    };
    match first.regime {
        Regime::Qgt2 => {
            let target = -(0.5 - 1.0 / first.q);
            let fit = fit_scaling(records, Column::NormU0, Model::LogPower { log_exponent: 1.0 });
            let pass = fit
                .as_ref()
                .map(|f| f.usable(threshold) && f.within(target, EXPONENT_TOLERANCE))
                .unwrap_or(false);
            Verdict { pass, detail: format!("norm_u0/ln N: {} (target {target:.4})", describe(&fit)) }
        }
        Regime::Qlt2 => {
            let scaled: Vec<f64> =
                rows.iter().map(|r| r.norm_u0.unwrap_or(f64::NAN) * (r.n as f64).ln()).collect();
            let pass = rows.len() >= 2 && non_increasing(&scaled);
            let shown: Vec<String> = scaled.iter().map(|v| format!("{v:.6}")).collect();
            Verdict { pass, detail: format!("norm_u0 * ln N = [{}]", shown.join(", ")) }
        }
    }
}

/// The inflation ratio is strictly increasing in `N`; for qgt2 the exponent
/// of `ratio/ln N` must also be within [`EXPONENT_TOLERANCE`] of `1/2 − 1/q`
/// with an acceptable residual.
pub fn inflation_verdict(records: &[SweepRecord], threshold: f64) -> Verdict {
    let rows = accepted(records);
    if rows.len() < records.len() || rows.len() < 2 {
        return Verdict { pass: false, detail: format!("{} usable rows of {}", rows.len(), records.len()) };
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio.unwrap_or(f64::NAN)).collect();
    let increasing = strictly_increasing(&ratios);
    let shown: Vec<String> = ratios.iter().map(|v| format!("{v:.6e}")).collect();
    let q = rows[0].q;
    match rows[0].regime {
        Regime::Qgt2 => {
            let target = 0.5 - 1.0 / q;
            let fit = fit_scaling(records, Column::Ratio, Model::LogPower { log_exponent: 1.0 });
            let fit_ok = fit
                .as_ref()
                .map(|f| f.usable(threshold) && f.within(target, EXPONENT_TOLERANCE))
                .unwrap_or(false);
            Verdict {
                pass: increasing && fit_ok,
                detail: format!(
                    "ratio = [{}], increasing: {increasing}; ratio/ln N: {} (target {target:.4})",
                    shown.join(", "),
                    describe(&fit)
                ),
            }
        }
        Regime::Qlt2 => {
            let fit = fit_scaling(records, Column::Ratio, Model::LogPower { log_exponent: -3.0 });
            Verdict {
                pass: increasing,
                detail: format!(
                    "ratio = [{}], increasing: {increasing}; ratio*(ln N)^3: {} (reference {:.4})",
                    shown.join(", "),
                    describe(&fit),
                    1.0 / q - 0.5
                ),
            }
        }
    }
}

/// Triangle inequality on every solver row.
pub fn triangle_verdict(records: &[SweepRecord]) -> Verdict {
    let bad: Vec<u32> =
        records.iter().filter(|r| r.triangle_holds(TRIANGLE_SLACK) == Some(false)).map(|r| r.n).collect();
    Verdict {
        pass: bad.is_empty(),
        detail: if bad.is_empty() { "triangle inequality holds".into() } else { format!("violated at N = {bad:?}") },
    }
}

/// Triangle inequality, `‖U₂‖/‖U₁‖ <` [`REMAINDER_RATIO`], mass drift and
/// depth bound on one solver row.
pub fn solver_row_verdict(outcome: &CaseOutcome, mass_tol: f64) -> Verdict {
    let r = &outcome.record;
    let Some(s) = &outcome.solver else {
        return Verdict { pass: false, detail: "no solver data".into() };
    };
    let (Some(u), Some(u0), Some(u1), Some(u2)) = (r.norm_u, r.norm_big_u0, r.norm_big_u1, r.norm_big_u2) else {
        return Verdict { pass: false, detail: "missing norms".into() };
    };
    let tri = u >= u1 - u0 - u2 - TRIANGLE_SLACK;
    let rem = u2 / u1;
    let pass = tri && rem < REMAINDER_RATIO && s.mass_drift <= mass_tol && s.min_one_plus_h > DEPTH_FLOOR;
    Verdict {
        pass,
        detail: format!(
            "|u|={u:.6e} |U0|={u0:.6e} |U1|={u1:.6e} |U2|={u2:.6e} U2/U1={rem:.4} triangle={tri} \
             mass drift={:.2e} min(1+h)={:.4} steps={}",
            s.mass_drift, s.min_one_plus_h, s.steps
        ),
    }
}

/// Measured peak within a factor of two of the prediction on every admitted row.
pub fn resource_verdict(outcomes: &[CaseOutcome]) -> Verdict {
    let mut worst = 1.0f64;
    for o in outcomes {
        if let (Some(p), Some(m)) = (o.predicted_bytes, o.measured_bytes) {
            if m > 0.0 {
                worst = worst.max(p / m).max(m / p);
            }
        }
    }
    Verdict { pass: worst <= 2.0, detail: format!("worst predicted/measured factor {worst:.3}") }
}
