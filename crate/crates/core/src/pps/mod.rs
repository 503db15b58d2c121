//! Pointer response of pre- and post-selected measurements.
//!
//! [`response`] holds the weak-coupling formulas (linear, nonlinear, inverted,
//! resonance and the coupling series), [`exact`] the arbitrary-strength
//! solutions for observables with Â² = C₀I, and [`distribution`] the pointer
//! distributions.

pub mod distribution;
pub mod exact;
pub mod response;

pub use distribution::{
    beta_factor, distribution_peak, distribution_peak_shift, pointer_distribution_exact,
    pointer_distribution_exact_matrix, pointer_distribution_weak, pointer_distribution_weak_matrix,
    transient_equivalence, DistributionKind, MeterProfile, PeakContext, PointerDistribution,
    TransientState, WaveFunction,
};
pub use exact::{
    exact_pps, exact_pps_system, exact_standard, exact_standard_system, involution_constant,
    rescale_involutory, trig_moments_matrix,
};
pub use response::{
    pps_deflection_inverted, pps_deflection_linear, pps_deflection_nonlinear,
    pps_deflection_resonance, pps_deflection_series, resonance_parameters, standard_linear,
    ResonanceParameters, SeriesTerms,
};

use crate::meters::MeterMoments;
use crate::quantum_core::C64;

/// Thresholds on μ_w = |γA_w|(|F̄| + ΔF) separating the regimes.
pub const LINEAR_LIMIT: f64 = 0.1;
pub const INVERTED_LIMIT: f64 = 10.0;

/// Measurement regime of a weak pre- and post-selected measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Linear,
    StronglyNonlinear,
    Inverted,
    Resonance,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Linear => "linear",
            Regime::StronglyNonlinear => "strongly-nonlinear",
            Regime::Inverted => "inverted",
            Regime::Resonance => "resonance",
        }
    }

    /// Tag from μ_w alone (no resonance detection).
    pub fn from_mu_w(mu_w: f64) -> Self {
        if mu_w < LINEAR_LIMIT {
            Regime::Linear
        } else if mu_w <= INVERTED_LIMIT {
            Regime::StronglyNonlinear
        } else {
            Regime::Inverted
        }
    }
}

/// μ_w = |γA_w|(|F̄| + ΔF).
pub fn mu_w(gamma: f64, a_w: C64, m: &MeterMoments) -> f64 {
    (gamma * a_w).norm() * (m.f_bar.abs() + m.delta_f)
}

/// Conditional pointer average and its context.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    /// R̄_s.
    pub r_s: f64,
    /// R̄_s − R̄.
    pub deflection: f64,
    /// Post-selection probability, when the normalization Tr(Eρ) is known.
    pub post_prob: Option<f64>,
    pub regime: Option<Regime>,
    /// The numerator is negligible against the denominator; higher-order
    /// terms may dominate the deflection.
    pub low_signal: bool,
}
