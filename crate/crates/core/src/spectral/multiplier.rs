use rustfft::num_complex::Complex64;

/// Value used at `ξ = 0`. Required so that singular symbols state their choice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Origin {
    /// Evaluate the formula at the origin like any other point.
    Formula,
    /// Use this value at the origin.
    Value(Complex64),
}

/// A Fourier symbol `m(ξ₁, ξ₂)`.
pub struct Multiplier<'a> {
    eval: Box<dyn Fn(f64, f64) -> Complex64 + Send + Sync + 'a>,
    origin: Origin,
    hermitian: Option<bool>,
}

impl<'a> Multiplier<'a> {
    /// General complex symbol. Realness of the output is decided by checking
    /// `m(−ξ) = conj m(ξ)` on the lattice.
    pub fn new(origin: Origin, f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'a) -> Self {
        Self { eval: Box::new(f), origin, hermitian: None }
    }

    /// Real symbol, even in `ξ`; always maps real fields to real fields.
    pub fn real_even(origin: Origin, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'a) -> Self {
        Self {
            eval: Box::new(move |a, b| Complex64::new(f(a, b), 0.0)),
            origin,
            hermitian: Some(true),
        }
    }

    /// Radial real symbol `m(|ξ|)`.
    pub fn radial(origin: Origin, f: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        Self::real_even(origin, move |a, b| f(a.hypot(b)))
    }

    pub fn eval(&self, xi1: f64, xi2: f64) -> Complex64 {
        if xi1 == 0.0 && xi2 == 0.0 {
            if let Origin::Value(v) = self.origin {
                return v;
            }
        }
        (self.eval)(xi1, xi2)
    }

    pub(crate) fn declared_hermitian(&self) -> Option<bool> {
        self.hermitian
    }
}

/// `iξ₁` or `iξ₂`.
pub fn derivative(axis: usize) -> Multiplier<'static> {
    assert!(axis < 2, "axis must be 0 or 1");
    let mut m = Multiplier::new(Origin::Formula, move |a, b| {
        Complex64::new(0.0, if axis == 0 { a } else { b })
    });
    m.hermitian = Some(true);
    m
}

/// `e^{−t|ξ|²}`.
pub fn heat(t: f64) -> Multiplier<'static> {
    Multiplier::real_even(Origin::Formula, move |a, b| (-t * (a * a + b * b)).exp())
}

/// `(1 − e^{−t|ξ|²})/|ξ|²`, equal to `t` at the origin.
pub fn integrated_heat(t: f64) -> Multiplier<'static> {
    Multiplier::real_even(Origin::Value(Complex64::new(t, 0.0)), move |a, b| {
        integrated_heat_symbol(t, a * a + b * b)
    })
}

/// `(1 − e^{−t k2})/k2` with the `k2 → 0` limit.
pub fn integrated_heat_symbol(t: f64, k2: f64) -> f64 {
    let x = t * k2;
    if x < 1e-8 {
        t * (1.0 - 0.5 * x + x * x / 6.0)
    } else {
        -(-x).exp_m1() / k2
    }
}
