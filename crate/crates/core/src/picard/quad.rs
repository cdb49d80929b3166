use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::GaussLegendre;

pub const MIN_NODES: usize = 8;

/// How the inner `∫₀^s e^{τΔ} dτ` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerRule {
    /// Exact symbol `(1 − e^{−s|ξ|²})/|ξ|²`.
    ClosedForm,
    /// Gauss–Legendre with this many nodes on `[0, s]`.
    Quadrature(usize),
}

/// Gauss–Legendre rule for the outer Duhamel integral.
///
/// With `grading_levels = L > 0` each time panel is split geometrically towards
/// its stiff ends, panel widths halving `L` times, and every subpanel gets
/// `nodes` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub grading_levels: usize,
    /// Deepen the grading per panel from its stiffness (see [`Self::levels_for`]).
    pub auto_grade: bool,
    pub inner: InnerRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: 32, grading_levels: 0, auto_grade: false, inner: InnerRule::ClosedForm }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes: usize) -> Self {
        Self { nodes, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "at least {MIN_NODES} quadrature nodes required, got {}",
                self.nodes
            )));
        }
        if let InnerRule::Quadrature(m) = self.inner {
            if m < MIN_NODES {
                return Err(Error::InvalidArgument(format!(
                    "at least {MIN_NODES} inner nodes required, got {m}"
                )));
            }
        }
        Ok(())
    }

    /// Grading depth for a panel of length `len` on data with `|ξ|² ≤ k2_max`:
    /// enough halvings that the innermost subpanel sees `len·k2_max/2^L ≤ 10`.
    pub fn levels_for(len: f64, k2_max: f64) -> usize {
        let stiff = len * k2_max;
        if stiff <= 10.0 {
            0
        } else {
            (stiff / 10.0).log2().ceil() as usize
        }
    }

    /// Nodes and weights on `[a, b]`, graded towards the flagged ends.
    #[cfg(test)]
    fn panel(&self, a: f64, b: f64, left: bool, right: bool) -> Vec<(f64, f64)> {
        self.panel_with_levels(a, b, left, right, self.grading_levels)
    }

    pub(crate) fn panel_with_levels(
        &self,
        a: f64,
        b: f64,
        left: bool,
        right: bool,
        l: usize,
    ) -> Vec<(f64, f64)> {
        let gl = GaussLegendre::new(self.nodes);
        let mut cuts = vec![a, b];
        if l > 0 && (left || right) {
            let (lo, hi) = match (left, right) {
                (true, true) => (a, 0.5 * (a + b)),
                _ => (a, b),
            };
            let h = hi - lo;
            cuts.clear();
            let mut left_cuts = vec![lo];
            for k in (0..l).rev() {
                left_cuts.push(lo + h * 0.5f64.powi(k as i32 + 1));
            }
            left_cuts.push(hi);
            // left_cuts grades towards lo; mirror for the right end
            let mirrored: Vec<f64> = left_cuts.iter().rev().map(|&x| a + b - x).collect();
            match (left, right) {
                (true, true) => {
                    cuts.extend(&left_cuts);
                    cuts.extend(mirrored.iter().skip(1));
                }
                (true, false) => cuts.extend(&left_cuts),
                _ => cuts.extend(mirrored.iter()),
            }
        }
        let mut out = Vec::with_capacity((cuts.len() - 1) * self.nodes);
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                out.extend(gl.on(w[0], w[1]));
            }
        }
        out
    }
}
