//! Continuous-variable meter with a Gaussian momentum profile and quadratic phase.
//!
//! The coupled variable is always F = p. The state in the momentum
//! representation is
//! ψ(p) = (2πΔp²)^{−1/4} exp[−(1 + ib)(p − p̄)²/(4Δp²) − i q̄ p].

use std::f64::consts::PI;

use super::{moments_coinciding, MeterMoments, TrigMoments};
use crate::error::{Error, Result};
use crate::quantum_core::{c64, C64};

/// Which meter variable is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pointer {
    /// R = q, conjugate to the coupled variable.
    Position,
    /// R = p, the coupled variable itself.
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMeter {
    pub p_bar: f64,
    pub q_bar: f64,
    pub delta_p: f64,
    /// Quadratic-phase parameter; σ_pq = b/2.
    pub b: f64,
    pub pointer: Pointer,
}

impl GaussianMeter {
    pub fn new(p_bar: f64, q_bar: f64, delta_p: f64, b: f64, pointer: Pointer) -> Result<Self> {
        if !(delta_p > 0.0) || !delta_p.is_finite() {
            return Err(Error::NonPositiveSpread(delta_p));
        }
        if !p_bar.is_finite() || !q_bar.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(
                "non-finite Gaussian meter parameter".into(),
            ));
        }
        Ok(Self {
            p_bar,
            q_bar,
            delta_p,
            b,
            pointer,
        })
    }

    /// Δq = √(1 + b²)/(2Δp).
    pub fn delta_q(&self) -> f64 {
        (1.0 + self.b * self.b).sqrt() / (2.0 * self.delta_p)
    }

    /// ψ(p).
    pub fn psi_p(&self, p: f64) -> C64 {
        let x = p - self.p_bar;
        let s2 = self.delta_p * self.delta_p;
        let amp = (2.0 * PI * s2).powf(-0.25) * (-x * x / (4.0 * s2)).exp();
        let phase = -self.b * x * x / (4.0 * s2) - self.q_bar * p;
        C64::from_polar(amp, phase)
    }

    /// ψ(q) = (2π)^{−1/2}∫ e^{ipq} ψ(p) dp, up to a constant phase.
    pub fn psi_q(&self, q: f64) -> C64 {
        let x = q - self.q_bar;
        let s2 = self.delta_q() * self.delta_q();
        let amp = (2.0 * PI * s2).powf(-0.25) * (-x * x / (4.0 * s2)).exp();
        let phase = self.b * x * x / (4.0 * s2) + self.p_bar * x;
        C64::from_polar(amp, phase)
    }

    /// dψ/dq.
    pub fn dpsi_q(&self, q: f64) -> C64 {
        let x = q - self.q_bar;
        let s2 = self.delta_q() * self.delta_q();
        let factor = c64(-x / (2.0 * s2), self.b * x / (2.0 * s2) + self.p_bar);
        self.psi_q(q) * factor
    }

    /// ζ′(p) = q̄ + b(p − p̄)/(2Δp²), the derivative of the phase.
    pub fn phase_slope(&self, p: f64) -> f64 {
        self.q_bar + self.b * (p - self.p_bar) / (2.0 * self.delta_p * self.delta_p)
    }

    /// Raw moments ⟨p^n⟩ for n = 0..=n_max.
    pub fn p_moments(&self, n_max: usize) -> Vec<f64> {
        let s2 = self.delta_p * self.delta_p;
        let mut m = Vec::with_capacity(n_max + 1);
        m.push(1.0);
        if n_max >= 1 {
            m.push(self.p_bar);
        }
        for n in 2..=n_max {
            let v = self.p_bar * m[n - 1] + (n as f64 - 1.0) * s2 * m[n - 2];
            m.push(v);
        }
        m
    }
}

/// Moments of the Gaussian meter for its configured pointer.
pub fn moments_gaussian(m: &GaussianMeter) -> Result<MeterMoments> {
    let dp = m.delta_p;
    match m.pointer {
        Pointer::Momentum => moments_coinciding(m.p_bar, dp, 0.0),
        Pointer::Position => Ok(MeterMoments {
            f_bar: m.p_bar,
            delta_f: dp,
            r_bar: m.q_bar,
            delta_r: m.delta_q(),
            rcf: c64(m.b / 2.0, 0.5),
            frcf: m.b * m.p_bar,
            fcrcfc: 0.0,
            f2: m.p_bar * m.p_bar + dp * dp,
        }),
    }
}

/// Trigonometric averages of the Gaussian meter at coupling γ.
pub fn trig_moments_gaussian(m: &GaussianMeter, gamma: f64) -> TrigMoments {
    let s2 = m.delta_p * m.delta_p;
    let damp = (-2.0 * gamma * gamma * s2).exp();
    let (sn, cs) = (2.0 * gamma * m.p_bar).sin_cos();
    let m_c = cs * damp;
    let m_s = sn * damp;
    // ⟨p sin 2γp⟩ and ⟨p cos 2γp⟩
    let m_c_prime = (m.p_bar * sn + 2.0 * gamma * s2 * cs) * damp;
    let m_s_prime = (m.p_bar * cs - 2.0 * gamma * s2 * sn) * damp;
    // ⟨ζ′ cos 2γp⟩ and ⟨ζ′ sin 2γp⟩
    let g1 = (m.q_bar * cs - gamma * m.b * sn) * damp;
    let g2 = (m.q_bar * sn + gamma * m.b * cs) * damp;
    let (r_bar, g_cc, g_ss, g_cs) = match m.pointer {
        Pointer::Momentum => (
            m.p_bar,
            (m.p_bar + m_s_prime) / 2.0,
            (m.p_bar - m_s_prime) / 2.0,
            c64(m_c_prime / 2.0, 0.0),
        ),
        Pointer::Position => (
            m.q_bar,
            (m.q_bar + g1) / 2.0,
            (m.q_bar - g1) / 2.0,
            c64(g2 / 2.0, gamma / 2.0),
        ),
    };
    TrigMoments {
        gamma,
        r_bar,
        m_c,
        m_s,
        g_cc,
        g_ss,
        g_cs,
        m_c_prime: Some(m_c_prime),
        m_s_prime: Some(m_s_prime),
        g1: Some(g1),
        g2: Some(g2),
    }
}

/// Pointer q(t) = q + (t/m) p read after free evolution of the meter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePointer {
    pub position_coeff: f64,
    pub momentum_coeff: f64,
}

impl EffectivePointer {
    /// Deflection of the effective pointer from the deflections of q and p
    /// computed without free evolution.
    pub fn combine(&self, q_deflection: f64, p_deflection: f64) -> f64 {
        self.position_coeff * q_deflection + self.momentum_coeff * p_deflection
    }
}

/// Free evolution H = p²/2m for time t_M before read-out.
///
/// Returns the equivalent meter with b → b + 2Δp²t_M/m, the equivalent
/// effective pointer, and the enhancement 2Δp²t_M/m.
pub fn free_meter_hamiltonian_effects(
    m: &GaussianMeter,
    mass: f64,
    t_m: f64,
) -> Result<(GaussianMeter, EffectivePointer, f64)> {
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mass must be positive, got {mass}"
        )));
    }
    if !(t_m >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "duration must be non-negative, got {t_m}"
        )));
    }
    let shift = 2.0 * m.delta_p * m.delta_p * t_m / mass;
    let evolved = GaussianMeter {
        b: m.b + shift,
        ..*m
    };
    let pointer = EffectivePointer {
        position_coeff: 1.0,
        momentum_coeff: t_m / mass,
    };
    Ok((evolved, pointer, shift))
}
