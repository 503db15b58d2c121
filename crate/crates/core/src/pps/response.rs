//! Weak-coupling response formulas.

use super::{mu_w, MeasurementOutcome, Regime};
use crate::error::{Error, Result};
use crate::meters::{MeterMoments, RawMoments};
use crate::quantum_core::{DensityMatrix, Observable, PovmElement, C64};
use crate::tol::EPS_DEN;
use crate::weak_values::{generalized_weak_values, WeakValueReport, MAX_ORDER};

/// Standard (not post-selected) linear response γĀ·Im⟨[R,F]⟩.
pub fn standard_linear(gamma: f64, a_bar: f64, m: &MeterMoments) -> f64 {
    gamma * a_bar * m.commutator_im()
}

/// Linear response 2γ Im(⟨R_cF⟩A_w).
pub fn pps_deflection_linear(gamma: f64, a_w: C64, m: &MeterMoments) -> f64 {
    2.0 * gamma * (m.rcf * a_w).im
}

/// Nonlinear response
/// [2γ Im(⟨R_cF⟩A_w) + γ²⟨FR_cF⟩A_w^(1,1)] / [1 + 2γF̄ Im A_w + γ²⟨F²⟩A_w^(1,1)].
///
/// The denominator times Tr(Eρ) is the post-selection probability.
pub fn pps_deflection_nonlinear(
    gamma: f64,
    wv: &WeakValueReport,
    m: &MeterMoments,
) -> Result<MeasurementOutcome> {
    let num = 2.0 * gamma * (m.rcf * wv.a_w).im + gamma * gamma * m.frcf * wv.a_w_11;
    let den = 1.0 + 2.0 * gamma * m.f_bar * wv.a_w.im + gamma * gamma * m.f2 * wv.a_w_11;
    if den <= EPS_DEN {
        return Err(Error::DegenerateDenominator(den));
    }
    let deflection = num / den;
    Ok(MeasurementOutcome {
        r_s: m.r_bar + deflection,
        deflection,
        post_prob: wv.post_norm.map(|p| p * den),
        regime: Some(Regime::from_mu_w(mu_w(gamma, wv.a_w, m))),
        low_signal: num.abs() < EPS_DEN * den.abs(),
    })
}

/// Large-|γA_w| expansion to first order in (γA_w)⁻¹.
///
/// Returns (R̄_s at A_w → ∞, adjusted deflection) where the first entry is
/// ⟨FRF⟩/⟨F²⟩ and the second is the system-dependent correction
/// 2Im(⟨R_cF⟩A_w)/(γ⟨F²⟩A_w^(1,1)) − 2F̄⟨FR_cF⟩Im A_w/(γ⟨F²⟩²A_w^(1,1)).
pub fn pps_deflection_inverted(
    gamma: f64,
    wv: &WeakValueReport,
    m: &MeterMoments,
) -> Result<(f64, f64)> {
    if m.f2 <= 0.0 {
        return Err(Error::ZeroSecondMoment);
    }
    let r_inf = m.r_bar + m.frcf / m.f2;
    let scale = gamma * m.f2 * wv.a_w_11;
    if scale == 0.0 {
        return Err(Error::DegenerateDenominator(scale));
    }
    let adjusted =
        2.0 * (m.rcf * wv.a_w).im / scale - 2.0 * m.f_bar * m.frcf * wv.a_w.im / (scale * m.f2);
    Ok((r_inf, adjusted))
}

/// Dimensionless parameters of the narrow resonance at |F̄| ≫ ΔF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceParameters {
    /// x = 1 + γF̄ Im A_w.
    pub x: f64,
    /// ε = Re A_w / Im A_w.
    pub epsilon: f64,
    /// v = √(A_w^(1,1) − |A_w|²)/|Im A_w|, zero for pure pre-selection.
    pub v: f64,
}

pub fn resonance_parameters(
    gamma: f64,
    wv: &WeakValueReport,
    m: &MeterMoments,
) -> Result<ResonanceParameters> {
    let im = wv.a_w.im;
    if im == 0.0 {
        return Err(Error::InvalidParameter("resonance needs Im A_w ≠ 0".into()));
    }
    Ok(ResonanceParameters {
        x: 1.0 + gamma * m.f_bar * im,
        epsilon: wv.a_w.re / im,
        v: wv.mixedness().max(0.0).sqrt() / im.abs(),
    })
}

/// Deflection near the resonance x ≈ 0:
/// [⟨F_cR_cF_c⟩ − εF̄ Im⟨[R,F]⟩ − 2xF̄σ_FR] / {F̄²[x² + ε² + (ΔF/F̄)² + v²]}.
pub fn pps_deflection_resonance(x: f64, epsilon: f64, v: f64, m: &MeterMoments) -> Result<f64> {
    let f = m.f_bar;
    if f == 0.0 {
        return Err(Error::ZeroMean);
    }
    let ratio = m.delta_f / f;
    let num = m.fcrcfc - epsilon * f * m.commutator_im() - 2.0 * x * f * m.sigma_fr();
    Ok(num / (f * f * (x * x + epsilon * epsilon + ratio * ratio + v * v)))
}

/// Which second-order terms the coupling series keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesTerms {
    /// Every term up to the requested order.
    Full,
    /// Drops the second-order terms carrying (A²)_w and its conjugate, the
    /// approximation behind the nonlinear formula.
    DropSquareWeakValue,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Partial sums of the expansion of R̄_s − R̄ in powers of γ.
///
/// Entry n−1 is the ratio of the numerator and denominator series, each
/// truncated after order n. Uses
/// ⟨ER_c⟩_f/Tr(Eρ) = Σ_n (iγ)ⁿ/n! Σ_k (−1)^k C(n,k) A_w^(k,n−k) ⟨F^{n−k}R_cF^k⟩
/// and the same sum with ⟨F^n⟩ for ⟨E⟩_f/Tr(Eρ).
pub fn pps_deflection_series(
    gamma: f64,
    rho: &DensityMatrix,
    e: &PovmElement,
    a: &Observable,
    meter: &dyn RawMoments,
    order: usize,
    terms: SeriesTerms,
) -> Result<Vec<f64>> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "series order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    let w = generalized_weak_values(a, rho, e, order)?;
    let mut num = C64::new(0.0, 0.0);
    let mut den = C64::new(1.0, 0.0);
    let mut factor = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(order);
    for n in 1..=order {
        factor = factor * C64::new(0.0, gamma) / n as f64;
        let mut num_n = C64::new(0.0, 0.0);
        let mut den_n = C64::new(0.0, 0.0);
        for k in 0..=n {
            if n == 2 && (k == 0 || k == n) && terms == SeriesTerms::DropSquareWeakValue {
                continue;
            }
            let coeff = if k % 2 == 0 { 1.0 } else { -1.0 } * binomial(n, k);
            let wk = w[&(k, n - k)] * coeff;
            num_n += wk * meter.sandwich(n - k, k);
            den_n += wk;
        }
        num += factor * num_n;
        den += factor * den_n * meter.f_power(n);
        if den.re <= EPS_DEN {
            return Err(Error::DegenerateDenominator(den.re));
        }
        out.push(num.re / den.re);
    }
    Ok(out)
}
