//! Numerical tolerances shared across the crate.

/// Normalization of states and traces.
pub const EPS_NORM: f64 = 1e-12;
/// Hermiticity of operators.
pub const EPS_HERM: f64 = 1e-12;
/// Unitarity of matrix exponentials.
pub const EPS_UNIT: f64 = 1e-10;
/// Lower bound on eigenvalues of positive operators.
pub const EPS_PSD: f64 = 1e-10;
/// Relative tolerance for closed-form identities.
pub const EPS_REL: f64 = 1e-9;
/// Smallest admissible response denominator.
pub const EPS_DEN: f64 = 1e-12;
/// Normalization of sampled distributions.
pub const EPS_DIST: f64 = 1e-6;
/// Relative tolerance for inversion round trips.
pub const EPS_INV: f64 = 1e-9;
/// Angular degeneracy threshold.
pub const EPS_ANGLE: f64 = 1e-6;
/// Maximum probability mass allowed at the edges of a grid.
pub const EPS_TAIL: f64 = 1e-10;

/// Scale factor for the vanishing post-selection test, multiplied by ‖E‖·‖ρ‖.
pub const EPS_OVERLAP_SCALE: f64 = 1e-14;
