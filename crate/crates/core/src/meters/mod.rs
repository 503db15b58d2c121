//! Meter models reduced to the moments that enter the pointer-response formulas.
//!
//! Every deflection formula consumes a [`MeterMoments`]; exact solutions for
//! two-valued observables consume [`TrigMoments`] instead.

mod gaussian;
mod qubit;
mod raw;

pub use gaussian::{
    free_meter_hamiltonian_effects, moments_gaussian, trig_moments_gaussian, EffectivePointer,
    GaussianMeter, Pointer,
};
pub use qubit::{moments_qubit, trig_moments_qubit, QubitAverages, QubitMeter};
pub use raw::{MatrixMeter, RawMoments};

use crate::error::{Error, Result};
use crate::quantum_core::{c64, hermitian_expm, CMatrix, DensityMatrix, Observable, Operator, C64};
use crate::tol::EPS_REL;

/// Meter statistics: F̄, ΔF, R̄, ΔR, ⟨R_cF⟩, ⟨FR_cF⟩, ⟨F_cR_cF_c⟩, ⟨F²⟩.
///
/// The subscript c denotes the centered operator, X_c = X − X̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterMoments {
    pub f_bar: f64,
    pub delta_f: f64,
    pub r_bar: f64,
    pub delta_r: f64,
    pub rcf: C64,
    pub frcf: f64,
    pub fcrcfc: f64,
    pub f2: f64,
}

impl MeterMoments {
    /// Covariance σ_FR = Re⟨R_cF⟩.
    pub fn sigma_fr(&self) -> f64 {
        self.rcf.re
    }

    /// Im⟨[R, F]⟩ = 2 Im⟨R_cF⟩.
    pub fn commutator_im(&self) -> f64 {
        2.0 * self.rcf.im
    }

    /// Phase θ₀ of ⟨R_cF⟩.
    pub fn theta0(&self) -> f64 {
        self.rcf.arg()
    }

    /// |⟨R_cF⟩|/|Im⟨R_cF⟩| = |csc θ₀|; infinite when F and R commute on average.
    pub fn enhancement(&self) -> f64 {
        if self.rcf.im == 0.0 {
            f64::INFINITY
        } else {
            self.rcf.norm() / self.rcf.im.abs()
        }
    }

    /// Checks the consistency relations between the moments.
    pub fn validate(&self) -> Result<()> {
        let scale = |x: f64| EPS_REL * (1.0 + x.abs());
        let f2 = self.f_bar * self.f_bar + self.delta_f * self.delta_f;
        if (self.f2 - f2).abs() > scale(self.f2) {
            return Err(Error::InvalidParameter(format!(
                "<F^2> = {} but F̄²+ΔF² = {f2}",
                self.f2
            )));
        }
        let frcf = self.fcrcfc + 2.0 * self.f_bar * self.rcf.re;
        if (self.frcf - frcf).abs() > scale(self.frcf) {
            return Err(Error::InvalidParameter(format!(
                "<FR_cF> = {} inconsistent with {frcf}",
                self.frcf
            )));
        }
        if self.delta_f * self.delta_r < self.rcf.norm() - scale(self.rcf.norm()) {
            return Err(Error::InvalidParameter(
                "uncertainty relation ΔRΔF ≥ |<R_cF>| violated".into(),
            ));
        }
        if self.delta_f <= 0.0 {
            return Err(Error::NonPositiveSpread(self.delta_f));
        }
        Ok(())
    }

    /// Moments of the combined pointer a·R₁ + b·R₂ for two pointers read on the
    /// same meter state with the same coupled variable F.
    pub fn combine_pointers(
        a: f64,
        m1: &MeterMoments,
        b: f64,
        m2: &MeterMoments,
        delta_r: f64,
    ) -> MeterMoments {
        MeterMoments {
            f_bar: m1.f_bar,
            delta_f: m1.delta_f,
            r_bar: a * m1.r_bar + b * m2.r_bar,
            delta_r,
            rcf: m1.rcf * a + m2.rcf * b,
            frcf: a * m1.frcf + b * m2.frcf,
            fcrcfc: a * m1.fcrcfc + b * m2.fcrcfc,
            f2: m1.f2,
        }
    }
}

/// Moments of a meter whose pointer is the coupled variable itself (R = F).
///
/// Needs only F̄, ΔF and the third central moment ⟨F_c³⟩.
pub fn moments_coinciding(f_bar: f64, delta_f: f64, fc3: f64) -> Result<MeterMoments> {
    if !(delta_f > 0.0) {
        return Err(Error::NonPositiveSpread(delta_f));
    }
    let var = delta_f * delta_f;
    Ok(MeterMoments {
        f_bar,
        delta_f,
        r_bar: f_bar,
        delta_r: delta_f,
        rcf: c64(var, 0.0),
        frcf: fc3 + 2.0 * f_bar * var,
        fcrcfc: fc3,
        f2: f_bar * f_bar + var,
    })
}

/// Trigonometric meter averages used by the exact solution for Â² = I.
///
/// M_c = ⟨cos 2γF⟩, M_s = ⟨sin 2γF⟩, G_xy = ⟨x(γF) R y(γF)⟩ with x, y ∈ {cos, sin}.
/// The optional fields are the auxiliary averages of the continuous meters:
/// ⟨F sin 2γF⟩, ⟨F cos 2γF⟩ and ⟨ζ′(p) cos 2γp⟩, ⟨ζ′(p) sin 2γp⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigMoments {
    pub gamma: f64,
    pub r_bar: f64,
    pub m_c: f64,
    pub m_s: f64,
    pub g_cc: f64,
    pub g_ss: f64,
    pub g_cs: C64,
    pub m_c_prime: Option<f64>,
    pub m_s_prime: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
}

/// Unitary exp(−iγF₀Â) that compensates a shift F → F − F₀ of the coupled variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemGauge {
    pub f0: f64,
}

impl SystemGauge {
    pub fn unitary(&self, a: &Observable, gamma: f64) -> Result<CMatrix> {
        hermitian_expm(a.matrix(), gamma * self.f0)
    }

    /// ρ → exp(−iγF₀Â) ρ exp(iγF₀Â).
    pub fn apply(&self, rho: &DensityMatrix, a: &Observable, gamma: f64) -> Result<DensityMatrix> {
        rho.transformed(&self.unitary(a, gamma)?)
    }
}

/// Shifts the coupled variable by −F₀ and returns the system transform that
/// leaves every conditional pointer average unchanged.
pub fn gauge_shift_f(m: &MeterMoments, f0: f64) -> (MeterMoments, SystemGauge) {
    let f_bar = m.f_bar - f0;
    let shifted = MeterMoments {
        f_bar,
        frcf: m.fcrcfc + 2.0 * f_bar * m.rcf.re,
        f2: f_bar * f_bar + m.delta_f * m.delta_f,
        ..*m
    };
    (shifted, SystemGauge { f0 })
}
