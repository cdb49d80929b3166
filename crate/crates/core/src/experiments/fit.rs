use serde::{Deserialize, Serialize};

use super::record::{Column, SweepRecord};
use crate::error::{Error, Result};

/// Transform applied before the least-squares line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Model {
    /// `log y = a + b log N`.
    Power,
    /// `log(y / (ln N)^k) = a + b log N`.
    LogPower { log_exponent: f64 },
    /// `log y = a + b N ln 2`.
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS residual in log units.
    pub residual: f64,
    pub n_range: (u32, u32),
    pub points: usize,
}

impl FitResult {
    /// A verdict is only drawn from fits whose residual is at most `threshold`.
    pub fn usable(&self, threshold: f64) -> bool {
        self.residual <= threshold
    }

    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.exponent - target).abs() <= tol
    }
}

/// Least-squares fit of `(N, y)` pairs under `model`; needs three distinct
/// `N` with positive `y`.
pub fn fit_points(points: &[(u32, f64)], model: Model) -> Result<FitResult> {
    let usable: Vec<(u32, f64)> =
        points.iter().cloned().filter(|&(n, y)| n >= 2 && y > 0.0 && y.is_finite()).collect();
    let mut ns: Vec<u32> = usable.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::Insufficient(format!(
            "fit needs at least 3 distinct N with positive values, got {}",
            ns.len()
        )));
    }
    let xy: Vec<(f64, f64)> = usable
        .iter()
        .map(|&(n, y)| {
            let nf = n as f64;
            match model {
                Model::Power => (nf.ln(), y.ln()),
                Model::LogPower { log_exponent } => (nf.ln(), y.ln() - log_exponent * nf.ln().ln()),
                Model::Exponential => (nf * std::f64::consts::LN_2, y.ln()),
            }
        })
        .collect();
    let (exponent, intercept, residual) = line_fit(&xy);
    Ok(FitResult {
        exponent,
        intercept,
        residual,
        n_range: (ns[0], *ns.last().unwrap()),
        points: xy.len(),
    })
}

/// Least-squares `(slope, intercept, RMS residual)` of `y` on `x`.
pub(crate) fn line_fit(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let res = (xy.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum::<f64>() / m).sqrt();
    (b, a, res)
}

/// Fits `quantity` across the non-rejected records.
pub fn fit_scaling(records: &[SweepRecord], quantity: Column, model: Model) -> Result<FitResult> {
    let pts: Vec<(u32, f64)> =
        records.iter().filter_map(|r| quantity.get(r).map(|v| (r.n, v))).collect();
    fit_points(&pts, model)
}

/// `values[i+1] > values[i]` for all `i`.
pub fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

/// `values[i+1] <= values[i]` for all `i`.
pub fn non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_models() {
        let pts: Vec<(u32, f64)> = (2..8).map(|n| (n, 3.0 * (n as f64).powf(0.25))).collect();
        let f = fit_points(&pts, Model::Power).unwrap();
        assert!((f.exponent - 0.25).abs() < 1e-12 && f.residual < 1e-12);
        assert_eq!(f.n_range, (2, 7));

        let pts: Vec<(u32, f64)> =
            (3..9).map(|n| (n, (n as f64).ln().powi(2) * (n as f64).powf(-0.5))).collect();
        let f = fit_points(&pts, Model::LogPower { log_exponent: 2.0 }).unwrap();
        assert!((f.exponent + 0.5).abs() < 1e-12);

        let pts: Vec<(u32, f64)> = (3..9).map(|n| (n, 2f64.powf(0.6 * n as f64))).collect();
        let f = fit_points(&pts, Model::Exponential).unwrap();
        assert!((f.exponent - 0.6).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_points(&[(2, 1.0), (3, 2.0)], Model::Power), Err(Error::Insufficient(_))));
        assert!(fit_points(&[(2, 1.0), (3, 2.0), (3, 2.5)], Model::Power).is_err());
        assert!(fit_points(&[(2, 1.0), (3, 2.0), (4, 0.0)], Model::Power).is_err());
    }

    #[test]
    fn monotonicity() {
        assert!(strictly_increasing(&[1.0, 2.0, 3.0]));
        assert!(!strictly_increasing(&[1.0, 1.0]));
        assert!(non_increasing(&[3.0, 3.0, 1.0]));
        assert!(!non_increasing(&[1.0, 1.5]));
    }
}
