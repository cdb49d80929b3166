//! Linear flow, second Picard iterate and the bilinear Duhamel operator.

mod bilinear;
mod opnorm;
mod oracle;
mod quad;

pub use bilinear::{bilinear_b, bilinear_b_times};
pub use opnorm::{
    operator_norm_estimate, operator_norm_estimates, pair_ratio, pair_ratios, random_vector_field,
    OpNormEstimate, SamplerSpec,
};
pub use oracle::{divided_difference, kernel_first, kernel_second, oracle_bilinear_b, ORACLE_MAX_POINTS};
pub use quad::{InnerRule, QuadratureSpec, MIN_NODES};

use crate::construction::InitialData;
use crate::error::{Error, Result};
use crate::spectral::{Field, VectorField};

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `U₀ = e^{tΔ} u₀`.
pub fn u_zero(u0: &VectorField, t: f64) -> Result<VectorField> {
    check_time(t)?;
    u0.heat_propagate(t)
}

/// `−∫₀ᵗ div U₀ ds = −div ∫₀ᵗ e^{sΔ} u₀ ds`.
pub fn h_linear(u0: &VectorField, t: f64) -> Result<Field> {
    check_time(t)?;
    let a = u0.u1().integrated_heat(t)?.derivative(0);
    let b = u0.u2().integrated_heat(t)?.derivative(1);
    Ok(a.add(&b)?.scale(-1.0))
}

/// Second Picard iterate
/// `U₁ = −∫₀ᵗ e^{(t−s)Δ}(U₀·∇U₀ + ∇∫₀^s div U₀ dτ · ∇U₀ − ∇h₀·∇e^{sΔ}u₀) ds`.
///
/// When `h₀` vanishes identically this is exactly `B(u₀, u₀)(t)`.
pub fn u_one(data: &InitialData, t: f64, quad: &QuadratureSpec) -> Result<VectorField> {
    check_time(t)?;
    if data.h0.spectral_energy() == 0.0 {
        bilinear_b(&data.u0, &data.u0, t, quad)
    } else {
        bilinear::second_iterate(&data.u0, &data.h0, t, quad)
    }
}
