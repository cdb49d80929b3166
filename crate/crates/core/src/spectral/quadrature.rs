//! Gauss–Legendre rules.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, Mutex};

/// Nodes and weights on `[−1, 1]`, nodes ascending.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static RULES: LazyLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Legendre `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(n: usize) -> Arc<Self> {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut map = RULES.lock().expect("quadrature cache poisoned");
        map.entry(n).or_insert_with(|| Arc::new(Self::compute(n))).clone()
    }

    fn compute(n: usize) -> Self {
        if n == 1 {
            return Self { nodes: vec![0.0], weights: vec![2.0] };
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root.
            let theta = PI * (4.0 * i as f64 + 3.0) / (4.0 * nf + 2.0);
            let mut x = (1.0 - (nf - 1.0) / (8.0 * nf.powi(3))) * theta.cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        Self { nodes, weights }
    }

    /// `(node, weight)` pairs mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (m + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for n in [2usize, 5, 8, 32, 64] {
            let q = GaussLegendre::new(n);
            assert!((q.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q.integrate(-1.0, 1.0, |x| x.powi(deg as i32)) - exact).abs() < 1e-12);
            let even = 2 * n - 2;
            let v = q.integrate(0.0, 1.0, |x| x.powi(even as i32));
            assert!((v - 1.0 / (even as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        let q = GaussLegendre::new(33);
        assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(q.nodes[16].abs() < 1e-15);
    }

    #[test]
    fn smooth_integrand() {
        let q = GaussLegendre::new(20);
        let v = q.integrate(0.0, 3.0, f64::exp);
        assert!((v - (3.0f64.exp() - 1.0)).abs() < 1e-12);
    }
}
