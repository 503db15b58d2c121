//! Regime classification, amplification, ensemble size and parameter inversion.

use crate::error::{Error, Result};
use crate::meters::{moments_coinciding, MeterMoments};
use crate::pps::{mu_w, pps_deflection_nonlinear, MeasurementOutcome, Regime};
use crate::quantum_core::{c64, DensityMatrix, Ket, Observable, PovmElement, C64};
use crate::tol::{EPS_ANGLE, EPS_DEN};
use crate::weak_values::{weak_value, WeakValueReport};
use std::f64::consts::PI;

/// Upper bound on μ for which the weak-coupling formulas are trusted.
pub const MU_MAX: f64 = 0.1;

/// |F̄|/ΔF above which the resonance can be flagged.
pub const RESONANCE_MEAN_RATIO: f64 = 10.0;

/// Resonance window in units of ΔF/|F̄| for √(x² + ε²).
pub const RESONANCE_WINDOW: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// μ = |γA_φψ|(|F̄| + ΔF).
    pub mu: f64,
    /// μ₀ = |γA_φψ|ΔF.
    pub mu0: f64,
    /// μ₁ = |γA_φψ F̄|.
    pub mu1: f64,
    /// μ′ = |γ|[(A²)_φφ]^{1/2}(|F̄| + ΔF), only when (A²)_φφ is supplied.
    pub mu_prime: Option<f64>,
    /// μ_w = |γA_w|(|F̄| + ΔF).
    pub mu_w: f64,
    pub regime: Regime,
    pub weak_valid: bool,
    /// Pure-state estimate of ⟨Π_φ⟩_f/|⟨φ|ψ⟩|²:
    /// 1 + 2γF̄ Im A_w + γ²⟨F²⟩|A_w|².
    pub post_factor: f64,
}

impl RegimeReport {
    /// Adds μ′ for a mixed preselection given (A²)_φφ.
    pub fn with_mu_prime(mut self, gamma: f64, a2_phiphi: f64, m: &MeterMoments) -> Self {
        self.mu_prime = Some(gamma.abs() * a2_phiphi.max(0.0).sqrt() * (m.f_bar.abs() + m.delta_f));
        self
    }
}

/// Whether the pointer sits in the narrow resonance at γF̄ Im A_w ≈ −1.
pub fn is_resonant(gamma: f64, a_w: C64, m: &MeterMoments) -> bool {
    if m.f_bar.abs() < RESONANCE_MEAN_RATIO * m.delta_f || a_w.im == 0.0 {
        return false;
    }
    let x = 1.0 + gamma * m.f_bar * a_w.im;
    let eps = a_w.re / a_w.im;
    (x * x + eps * eps).sqrt() <= RESONANCE_WINDOW * m.delta_f / m.f_bar.abs()
}

pub fn classify_regime(gamma: f64, a_phipsi: C64, a_w: C64, m: &MeterMoments) -> RegimeReport {
    let g = (gamma * a_phipsi).norm();
    let mu0 = g * m.delta_f;
    let mu1 = g * m.f_bar.abs();
    let mw = mu_w(gamma, a_w, m);
    let regime = if is_resonant(gamma, a_w, m) {
        Regime::Resonance
    } else {
        Regime::from_mu_w(mw)
    };
    RegimeReport {
        mu: mu0 + mu1,
        mu0,
        mu1,
        mu_prime: None,
        mu_w: mw,
        regime,
        weak_valid: mu0 + mu1 < MU_MAX,
        post_factor: 1.0 + 2.0 * gamma * m.f_bar * a_w.im + gamma * gamma * m.f2 * a_w.norm_sqr(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationReport {
    /// 𝒜 in the linear, strongly-nonlinear and resonance branches, 𝒜′ in the inverted one.
    pub proper_a: f64,
    /// ℰ = |2⟨R_cF⟩/⟨[R,F]⟩|.
    pub enhancement: f64,
    /// 𝒜_T = proper_a · enhancement.
    pub total: f64,
    /// Estimated per-event signal-to-noise ℛ₀ ≈ 𝒜μ₀.
    pub snr_r0: f64,
    /// Estimated minimal ensemble size 1/(⟨Π_φ⟩_f ℛ₀²).
    pub n0: f64,
    /// ⟨Π_φ⟩_f^{-1/2} from the pure-state estimate, to compare with `proper_a`.
    pub post_prob_scale: f64,
}

/// Order-of-magnitude amplification coefficients.
pub fn amplification(
    _gamma: f64,
    overlap: C64,
    m: &MeterMoments,
    regime: &RegimeReport,
) -> Result<AmplificationReport> {
    let ov = overlap.norm();
    let proper_a = match regime.regime {
        Regime::Inverted => {
            if regime.mu0 == 0.0 {
                return Err(Error::InvalidParameter(
                    "measurement strength vanishes".into(),
                ));
            }
            1.0 / regime.mu0
        }
        _ if ov == 0.0 => return Err(Error::ZeroOverlap),
        Regime::Linear | Regime::StronglyNonlinear => 1.0 / ov,
        Regime::Resonance => m.f_bar.abs() / (m.delta_f * ov),
    };
    let enhancement = m.enhancement();
    let snr_r0 = match regime.regime {
        // ℛ₀ ∼ 𝒜′|⟨φ|ψ⟩| in the inverted region.
        Regime::Inverted => proper_a * ov,
        _ => proper_a * regime.mu0,
    };
    let post_prob = ov * ov * regime.post_factor;
    Ok(AmplificationReport {
        proper_a,
        enhancement,
        total: proper_a * enhancement,
        snr_r0,
        n0: 1.0 / (post_prob * snr_r0 * snr_r0),
        post_prob_scale: post_prob.powf(-0.5),
    })
}

/// (N₀, ℛ) with N₀ = (ΔR_s)²/(⟨Π_φ⟩_f (R̄_s − R̄)²) and ℛ = √(N/N₀).
pub fn ensemble_size_and_snr(
    outcome: &MeasurementOutcome,
    delta_r_s: f64,
    n: u64,
) -> Result<(f64, f64)> {
    if outcome.deflection == 0.0 {
        return Err(Error::InfiniteEnsemble);
    }
    let p = outcome
        .post_prob
        .ok_or_else(|| Error::InvalidParameter("post-selection probability unknown".into()))?;
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "post-selection probability must be positive, got {p}"
        )));
    }
    if !(delta_r_s >= 0.0) {
        return Err(Error::NonPositiveSpread(delta_r_s));
    }
    let n0 = delta_r_s * delta_r_s / (p * outcome.deflection * outcome.deflection);
    Ok((n0, (n as f64 / n0).sqrt()))
}

/// Recovers γ from a measured nonlinear deflection with known weak values.
///
/// Clearing the denominator gives
/// γ²A11(d⟨F²⟩ − ⟨FR_cF⟩) + 2γ(dF̄ Im A_w − Im(⟨R_cF⟩A_w)) + d = 0;
/// the returned root is the one vanishing with d. Fails with
/// [`Error::AmbiguousRoot`] when the other root is also a weak coupling.
pub fn invert_gamma(deflection: f64, wv: &WeakValueReport, m: &MeterMoments) -> Result<f64> {
    let d = deflection;
    if d == 0.0 {
        return Ok(0.0);
    }
    let signal = (m.rcf * wv.a_w).im;
    if signal.abs() <= EPS_DEN * m.rcf.norm() * wv.a_w.norm() {
        return Err(Error::AmbiguousRoot);
    }
    let a2 = wv.a_w_11 * (d * m.f2 - m.frcf);
    let a1 = 2.0 * (d * m.f_bar * wv.a_w.im - signal);
    let a0 = d;
    if a2 == 0.0 {
        return Ok(-a0 / a1);
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return Err(Error::NoRoot);
    }
    // Both roots without cancellation.
    let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
    let (small, large) = (a0 / q, q / a2);
    // d(γ) is not monotonic inside the weak regime: two weak couplings give the same deflection.
    if mu_w(large, wv.a_w, m) < MU_MAX {
        return Err(Error::AmbiguousRoot);
    }
    Ok(small)
}

/// Linear-regime signal Im(e^{iθ₀}A_w) recorded by a meter with phase θ₀.
pub fn tomography_signal(a_w: C64, theta0: f64) -> f64 {
    (C64::from_polar(1.0, theta0) * a_w).im
}

/// A_w = [ξe^{−iθ₀′} − ξ′e^{−iθ₀}]/sin(θ₀ − θ₀′) from two linear signals.
pub fn tomography_linear(xi: f64, xi_prime: f64, theta0: f64, theta0_prime: f64) -> Result<C64> {
    let diff = theta0 - theta0_prime;
    let reduced = diff.rem_euclid(PI);
    if reduced < EPS_ANGLE || PI - reduced < EPS_ANGLE {
        return Err(Error::DegenerateAngles(diff));
    }
    Ok((C64::from_polar(xi, -theta0_prime) - C64::from_polar(xi_prime, -theta0)) / diff.sin())
}

/// One nonlinear-regime measurement: a deflection recorded at coupling γ with a given meter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyInput {
    pub deflection: f64,
    pub gamma: f64,
    pub meter: MeterMoments,
}

impl TomographyInput {
    /// Coefficients (D₀, D₁, D₂, D₃) of D₀ + D₁Re A_w + D₂Im A_w + D₃|A_w|² = 0.
    pub fn coefficients(&self) -> [f64; 4] {
        let (d, g, m) = (self.deflection, self.gamma, &self.meter);
        [
            d,
            -2.0 * g * m.rcf.im,
            2.0 * g * (d * m.f_bar - m.rcf.re),
            g * g * (d * m.f2 - m.frcf),
        ]
    }

    /// Relative residual of the measurement equation at A_w = x + iy.
    pub fn residual(&self, x: f64, y: f64) -> f64 {
        let [d0, d1, d2, d3] = self.coefficients();
        let terms = [d0, d1 * x, d2 * y, d3 * (x * x + y * y)];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let sum: f64 = terms.iter().sum();
        if scale == 0.0 {
            0.0
        } else {
            sum.abs() / scale
        }
    }
}

/// Measurability class of a pair of meters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurabilityCase {
    /// ⟨[R,F]⟩ ≠ 0 and σ_FR ≠ 0: full A_w.
    Full,
    /// ⟨[R,F]⟩ ≠ 0, σ_FR = F̄ = 0: sign of Im A_w lost.
    ImSignLost,
    /// ⟨[R,F]⟩ ≠ 0, σ_FR = 0, F̄ ≠ 0: full A_w.
    FullViaMean,
    /// ⟨[R,F]⟩ = 0, σ_FR ≠ 0: sign of Re A_w lost.
    ReSignLost,
    /// ⟨[R,F]⟩ = σ_FR = 0, F̄ ≠ 0: sign of Re A_w lost.
    ReSignLostViaMean,
    /// Everything vanishes: only |A_w|.
    MagnitudeOnly,
}

impl MeasurabilityCase {
    pub fn classify(a: &MeterMoments, b: &MeterMoments) -> Self {
        let nz = |v: f64, s: f64| v.abs() > 1e-12 * s;
        let scale = |m: &MeterMoments| m.delta_f * m.delta_r.max(f64::MIN_POSITIVE);
        let comm = nz(a.rcf.im, scale(a)) || nz(b.rcf.im, scale(b));
        let sigma = nz(a.rcf.re, scale(a)) || nz(b.rcf.re, scale(b));
        let mean = nz(a.f_bar, a.delta_f) || nz(b.f_bar, b.delta_f);
        match (comm, sigma, mean) {
            (true, true, _) => MeasurabilityCase::Full,
            (true, false, false) => MeasurabilityCase::ImSignLost,
            (true, false, true) => MeasurabilityCase::FullViaMean,
            (false, true, _) => MeasurabilityCase::ReSignLost,
            (false, false, true) => MeasurabilityCase::ReSignLostViaMean,
            (false, false, false) => MeasurabilityCase::MagnitudeOnly,
        }
    }

    pub fn re_sign_known(&self) -> bool {
        matches!(
            self,
            MeasurabilityCase::Full
                | MeasurabilityCase::ImSignLost
                | MeasurabilityCase::FullViaMean
        )
    }

    pub fn im_sign_known(&self) -> bool {
        !matches!(
            self,
            MeasurabilityCase::ImSignLost | MeasurabilityCase::MagnitudeOnly
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyReport {
    pub a_w: C64,
    pub case: MeasurabilityCase,
}

/// Roots of c2 t² + c1 t + c0 = 0, degrading to the linear case.
fn real_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let lead_scale = c1.abs().max(c0.abs());
    if c2.abs() <= 1e-14 * lead_scale {
        return if c1 != 0.0 { vec![-c0 / c1] } else { vec![] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        // Tolerate round-off around a double root.
        if disc > -1e-12 * c1 * c1 {
            return vec![-c1 / (2.0 * c2)];
        }
        return vec![];
    }
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / c2, c0 / q]
}

/// Recovers A_w from two nonlinear-regime measurements, assuming a pure
/// preselection (A_w^(1,1) = |A_w|²).
///
/// Components whose sign is not measurable for the meter pair are returned
/// non-negative; see [`MeasurabilityCase`]. Of the (generally two) solutions
/// the smallest is returned; two distinct weak-coupling solutions give
/// [`Error::AmbiguousRoot`].
pub fn tomography_nonlinear(
    first: &TomographyInput,
    second: &TomographyInput,
) -> Result<TomographyReport> {
    let case = MeasurabilityCase::classify(&first.meter, &second.meter);
    if case == MeasurabilityCase::MagnitudeOnly {
        let mag = tomography_magnitude(first)?;
        return Err(Error::Unmeasurable(format!(
            "only |A_w| = {mag} is measurable with these meters"
        )));
    }
    if first.deflection == 0.0 && second.deflection == 0.0 {
        return Ok(TomographyReport {
            a_w: c64(0.0, 0.0),
            case,
        });
    }
    let p = first.coefficients();
    let q = second.coefficients();
    // Eliminate |A_w|²: c0 + c1 x + c2 y = 0.
    let c = [
        q[3] * p[0] - p[3] * q[0],
        q[3] * p[1] - p[3] * q[1],
        q[3] * p[2] - p[3] * q[2],
    ];
    let base = if p[3].abs() >= q[3].abs() { p } else { q };
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    if base[3] == 0.0 {
        // Both equations linear.
        let det = p[1] * q[2] - p[2] * q[1];
        if det == 0.0 {
            return Err(Error::NoRoot);
        }
        candidates.push((
            (-p[0] * q[2] + q[0] * p[2]) / det,
            (-p[1] * q[0] + q[1] * p[0]) / det,
        ));
    } else if c[1].abs() >= c[2].abs() && c[1] != 0.0 {
        // x = α + βy.
        let (al, be) = (-c[0] / c[1], -c[2] / c[1]);
        let [d0, d1, d2, d3] = base;
        for y in real_roots(
            d3 * (1.0 + be * be),
            d1 * be + d2 + 2.0 * d3 * al * be,
            d0 + d1 * al + d3 * al * al,
        ) {
            candidates.push((al + be * y, y));
        }
    } else if c[2] != 0.0 {
        // y = α + βx.
        let (al, be) = (-c[0] / c[2], -c[1] / c[2]);
        let [d0, d1, d2, d3] = base;
        for x in real_roots(
            d3 * (1.0 + be * be),
            d2 * be + d1 + 2.0 * d3 * al * be,
            d0 + d2 * al + d3 * al * al,
        ) {
            candidates.push((x, al + be * x));
        }
    } else {
        return Err(Error::NoRoot);
    }
    let mut roots: Vec<C64> = candidates
        .into_iter()
        .filter(|&(x, y)| first.residual(x, y) <= 1e-8 && second.residual(x, y) <= 1e-8)
        .map(|(x, y)| {
            let x = if case.re_sign_known() { x } else { x.abs() };
            let y = if case.im_sign_known() { y } else { y.abs() };
            c64(x, y)
        })
        .collect();
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    roots.dedup_by(|a, b| (*a - *b).norm() <= 1e-9 * b.norm().max(1e-300));
    let weak = |a: &C64| {
        mu_w(first.gamma, *a, &first.meter) < MU_MAX
            && mu_w(second.gamma, *a, &second.meter) < MU_MAX
    };
    // Two circles meet twice; keep the weak-coupling solution.
    if roots.iter().filter(|a| weak(a)).count() > 1 {
        return Err(Error::AmbiguousRoot);
    }
    let a_w = *roots.first().ok_or(Error::NoRoot)?;
    Ok(TomographyReport { a_w, case })
}

/// |A_w| from a single measurement with ⟨R_cF⟩ = 0 and F̄ = 0.
pub fn tomography_magnitude(input: &TomographyInput) -> Result<f64> {
    let [d0, _, _, d3] = input.coefficients();
    if d3 == 0.0 {
        return Err(Error::NoRoot);
    }
    let s = -d0 / d3;
    if s < 0.0 {
        return Err(Error::NoRoot);
    }
    Ok(s.sqrt())
}

/// Weak-measurement phase detection with a which-path qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerReport {
    pub gamma: f64,
    pub phi: f64,
    pub delta_q: f64,
    pub n: u64,
    /// −i cot(φ/2).
    pub a_w: C64,
    /// Nonlinear pointer average.
    pub q_s: f64,
    pub regime: Regime,
    /// 𝒜_φ = (2|γ|Δq)⁻¹.
    pub amp_phi: f64,
    /// Reference quoted for the statistical-analysis SNR, 3^{-1/4}|φ|√N.
    pub snr_weak: f64,
    /// SNR from the moments of the post-selected distribution, |q̄_s|√(⟨Π⟩N)/Δq_s.
    pub snr_weak_model: f64,
    /// Large-γΔq/|φ| limit of `snr_weak_model`, 3^{-1/2}|φ|√N.
    pub snr_weak_limit: f64,
    /// √(2/π)|φ|√N.
    pub snr_split: f64,
    /// |φ|√N.
    pub snr_homodyne: f64,
    /// sin²(φ/2) + γ²Δq²cos²(φ/2).
    pub post_prob: f64,
    /// Pointer spread after post-selection.
    pub delta_q_s: f64,
}

/// Path observable diag(1, −1), preselection (e^{iφ}|1⟩ + i|2⟩)/√2 and
/// post-selection (|1⟩ − i|2⟩)/√2.
pub fn interferometer_system(phi: f64) -> Result<(Observable, DensityMatrix, PovmElement)> {
    let a = Observable::diagonal(&[1.0, -1.0])?;
    let s = 0.5f64.sqrt();
    let psi = Ket::new(vec![C64::from_polar(s, phi), c64(0.0, s)])?;
    let post = Ket::new(vec![c64(s, 0.0), c64(0.0, -s)])?;
    Ok((
        a,
        DensityMatrix::from_ket(&psi),
        PovmElement::projector(&post),
    ))
}

pub fn interferometer_scenario(
    gamma: f64,
    phi: f64,
    delta_q: f64,
    n: u64,
) -> Result<InterferometerReport> {
    if !(delta_q > 0.0) {
        return Err(Error::NonPositiveSpread(delta_q));
    }
    let (a, rho, e) = interferometer_system(phi)?;
    let a_w = weak_value(&a, &rho, &e)?;
    let wv = WeakValueReport::pure(a_w);
    // Pointer q with F = q and a centred Gaussian profile.
    let m = moments_coinciding(0.0, delta_q, 0.0)?;
    let outcome = pps_deflection_nonlinear(gamma, &wv, &m)?;
    let half = phi / 2.0;
    let a_phipsi = c64(0.5 * (phi.cos() + 1.0), 0.5 * phi.sin());
    let report = classify_regime(gamma, a_phipsi, a_w, &m);
    let t = half.tan();
    let g2 = gamma * gamma * delta_q * delta_q;
    // Φ_s ∝ (γq − t)²Φ(q).
    let norm = g2 + t * t;
    let mean = -2.0 * gamma * t * delta_q * delta_q / norm;
    let second = (3.0 * g2 * delta_q * delta_q + t * t * delta_q * delta_q) / norm;
    let delta_q_s = (second - mean * mean).max(0.0).sqrt();
    let post_prob = half.sin().powi(2) + g2 * half.cos().powi(2);
    let root_n = (n as f64).sqrt();
    Ok(InterferometerReport {
        gamma,
        phi,
        delta_q,
        n,
        a_w,
        q_s: outcome.r_s,
        regime: report.regime,
        amp_phi: 1.0 / (2.0 * gamma.abs() * delta_q),
        snr_weak: 3f64.powf(-0.25) * phi.abs() * root_n,
        snr_weak_model: mean.abs() * (post_prob * n as f64).sqrt() / delta_q_s,
        snr_weak_limit: phi.abs() * root_n / 3f64.sqrt(),
        snr_split: (2.0 / PI).sqrt() * phi.abs() * root_n,
        snr_homodyne: phi.abs() * root_n,
        post_prob,
        delta_q_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meters::{moments_gaussian, GaussianMeter, Pointer};
    use crate::pps::{pointer_distribution_weak, pps_deflection_linear, MeterProfile};
    use approx::assert_abs_diff_eq;

    fn meter(f_bar: f64, delta_f: f64) -> MeterMoments {
        moments_coinciding(f_bar, delta_f, 0.0).unwrap()
    }

    #[test]
    fn regime_examples() {
        let r = classify_regime(1e-3, c64(1.0, 0.0), c64(0.0, 10.0), &meter(0.0, 1.0));
        assert_abs_diff_eq!(r.mu, 1e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(r.mu_w, 0.01, epsilon = 1e-15);
        assert_eq!(r.regime, Regime::Linear);
        assert!(r.weak_valid);
        let r = classify_regime(0.1, c64(0.1, 0.0), c64(0.0, 10.0), &meter(0.0, 1.0));
        assert_eq!(r.regime, Regime::StronglyNonlinear);
        let rep = interferometer_scenario(0.1, 1e-3, 1.0, 1).unwrap();
        assert_eq!(rep.regime, Regime::Inverted);
        let r = classify_regime(1e-3, c64(1.0, 0.0), c64(0.0, 10.0), &meter(2.0, 1.0));
        assert_abs_diff_eq!(r.mu, r.mu0 + r.mu1, epsilon = 1e-15);
    }

    #[test]
    fn resonance_detection() {
        let m = meter(50.0, 1.0);
        let a = c64(0.2, -20.0);
        assert_eq!(
            classify_regime(1e-3, c64(1.0, 0.0), a, &m).regime,
            Regime::Resonance
        );
        assert_ne!(
            classify_regime(5e-4, c64(1.0, 0.0), a, &m).regime,
            Regime::Resonance
        );
        assert_ne!(
            classify_regime(1e-3, c64(1.0, 0.0), a, &meter(5.0, 1.0)).regime,
            Regime::Resonance
        );
    }

    #[test]
    fn amplification_examples() {
        let m = meter(0.0, 1.0);
        let ov = c64(0.01, 0.0);
        let r = classify_regime(1e-4, c64(1.0, 0.0), c64(0.0, 1.0) / ov, &m);
        assert_eq!(r.regime, Regime::Linear);
        assert_abs_diff_eq!(
            amplification(1e-4, ov, &m, &r).unwrap().proper_a,
            100.0,
            epsilon = 1e-10
        );

        let g = GaussianMeter::new(0.0, 0.0, 1.0, 3.0, Pointer::Position).unwrap();
        let mg = moments_gaussian(&g).unwrap();
        let rep = amplification(1e-4, ov, &mg, &r).unwrap();
        assert_abs_diff_eq!(rep.enhancement, 10f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(rep.total, rep.proper_a * rep.enhancement, epsilon = 1e-9);

        let r = classify_regime(0.01, c64(1.0, 0.0), c64(0.0, 1e5), &m);
        assert_eq!(r.regime, Regime::Inverted);
        assert_abs_diff_eq!(
            amplification(0.01, c64(1e-5, 0.0), &m, &r)
                .unwrap()
                .proper_a,
            100.0,
            epsilon = 1e-9
        );
        let r = classify_regime(1e-3, c64(1.0, 0.0), c64(0.0, 1.0), &m);
        assert!(matches!(
            amplification(1e-3, c64(0.0, 0.0), &m, &r),
            Err(Error::ZeroOverlap)
        ));
    }

    #[test]
    fn ensemble_size_examples() {
        // Optimal linear meter: N₀ = (2γ|A_φψ|ΔF)⁻² with ΔR_s ≈ ΔR = 1/(2ΔF).
        let (gamma, dp, ov) = (1e-4, 1.0, 0.01);
        let g = GaussianMeter::new(0.0, 0.0, dp, 0.0, Pointer::Position).unwrap();
        let m = moments_gaussian(&g).unwrap();
        let a_w = c64(1.0 / ov, 0.0);
        let d = pps_deflection_linear(gamma, a_w, &m);
        let outcome = MeasurementOutcome {
            r_s: d,
            deflection: d,
            post_prob: Some(ov * ov),
            regime: None,
            low_signal: false,
        };
        let (n0, snr) = ensemble_size_and_snr(&outcome, m.delta_r, 400).unwrap();
        assert_abs_diff_eq!(n0, (2.0 * gamma * dp).powi(-2), epsilon = 1e-6 * n0);
        assert_abs_diff_eq!(snr, (400.0 / n0).sqrt(), epsilon = 1e-15);
        let zero = MeasurementOutcome {
            deflection: 0.0,
            ..outcome
        };
        assert!(matches!(
            ensemble_size_and_snr(&zero, 1.0, 1),
            Err(Error::InfiniteEnsemble)
        ));
    }

    #[test]
    fn invert_gamma_examples() {
        let g = GaussianMeter::new(0.4, 0.0, 1.0, 0.7, Pointer::Position).unwrap();
        let m = moments_gaussian(&g).unwrap();
        let wv = WeakValueReport::new(c64(3.0, -5.0), 40.0).unwrap();
        assert_eq!(invert_gamma(0.0, &wv, &m).unwrap(), 0.0);
        for gamma in [1e-4, -3e-3, 0.01] {
            let d = pps_deflection_nonlinear(gamma, &wv, &m).unwrap().deflection;
            let back = invert_gamma(d, &wv, &m).unwrap();
            assert!(
                (back - gamma).abs() <= 1e-9 * gamma.abs(),
                "{back} vs {gamma}"
            );
        }
        let d = pps_deflection_linear(1e-7, wv.a_w, &m);
        let lin = d / (2.0 * (m.rcf * wv.a_w).im);
        assert!((invert_gamma(d, &wv, &m).unwrap() - lin).abs() < 1e-5 * lin.abs());

        // Momentum pointer with a nearly real weak value: the numerator
        // 2γ(Im A_w + γp̄|A_w|²) turns over inside the weak regime.
        let m =
            moments_gaussian(&GaussianMeter::new(0.469, 0.0, 1.0, 0.0, Pointer::Momentum).unwrap())
                .unwrap();
        let wv = WeakValueReport::pure(c64(-8.108, -0.099));
        let d = pps_deflection_nonlinear(1.826e-3, &wv, &m)
            .unwrap()
            .deflection;
        assert!(matches!(
            invert_gamma(d, &wv, &m),
            Err(Error::AmbiguousRoot)
        ));
    }

    #[test]
    fn tomography_linear_examples() {
        let a = tomography_linear(0.3, -1.2, PI / 2.0, 0.0).unwrap();
        assert_abs_diff_eq!(a.re, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, -1.2, epsilon = 1e-15);
        assert_eq!(
            tomography_linear(0.0, 0.0, 0.4, 1.3).unwrap(),
            c64(0.0, 0.0)
        );
        let planted = c64(-2.5, 0.75);
        let (t0, t1) = (0.3, 2.1);
        let back = tomography_linear(
            tomography_signal(planted, t0),
            tomography_signal(planted, t1),
            t0,
            t1,
        )
        .unwrap();
        assert!((back - planted).norm() < 1e-14);
        assert!(matches!(
            tomography_linear(1.0, 1.0, 0.2, 0.2 + PI),
            Err(Error::DegenerateAngles(_))
        ));
    }

    fn input(gamma: f64, m: MeterMoments, a: C64) -> TomographyInput {
        let d = pps_deflection_nonlinear(gamma, &WeakValueReport::pure(a), &m)
            .unwrap()
            .deflection;
        TomographyInput {
            deflection: d,
            gamma,
            meter: m,
        }
    }

    #[test]
    fn tomography_nonlinear_cases() {
        let a = c64(-4.0, 7.0);
        // Case 1: one meter, two couplings.
        let g = GaussianMeter::new(0.2, 0.0, 1.0, 1.0, Pointer::Position).unwrap();
        let m = moments_gaussian(&g).unwrap();
        let r = tomography_nonlinear(&input(0.02, m, a), &input(0.05, m, a)).unwrap();
        assert_eq!(r.case, MeasurabilityCase::Full);
        assert!((r.a_w - a).norm() < 1e-9 * a.norm(), "{:?}", r.a_w);

        // Case 2: ⟨[R,F]⟩ ≠ 0, σ_FR = F̄ = 0.
        let g = GaussianMeter::new(0.0, 0.0, 1.0, 0.0, Pointer::Position).unwrap();
        let m = moments_gaussian(&g).unwrap();
        let r = tomography_nonlinear(&input(0.02, m, a), &input(0.05, m, a)).unwrap();
        assert_eq!(r.case, MeasurabilityCase::ImSignLost);
        assert!((r.a_w - c64(a.re, a.im.abs())).norm() < 1e-9 * a.norm());

        // Case 6: only the magnitude.
        let m = meter(0.0, 1.0);
        let non_std = MeterMoments {
            rcf: c64(0.0, 0.0),
            frcf: 0.5,
            fcrcfc: 0.5,
            ..m
        };
        let first = input(0.02, non_std, a);
        assert!(matches!(
            tomography_nonlinear(&first, &input(0.05, non_std, a)),
            Err(Error::Unmeasurable(_))
        ));
        assert!((tomography_magnitude(&first).unwrap() - a.norm()).abs() < 1e-9 * a.norm());

        let zero = TomographyInput {
            deflection: 0.0,
            ..input(0.02, moments_gaussian(&g).unwrap(), a)
        };
        assert_eq!(
            tomography_nonlinear(&zero, &zero).unwrap().a_w,
            c64(0.0, 0.0)
        );
    }

    #[test]
    fn interferometer_values() {
        let (gamma, dq) = (0.01, 1.3);
        let phi = 0.05;
        let rep = interferometer_scenario(gamma, phi, dq, 10_000).unwrap();
        let t = (phi / 2.0).tan();
        let closed = -2.0 * gamma * dq * dq * t / (t * t + gamma * gamma * dq * dq);
        assert_abs_diff_eq!(rep.q_s, closed, epsilon = 1e-13);
        assert_abs_diff_eq!(rep.a_w.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.a_w.im, -1.0 / t, epsilon = 1e-9);
        assert_abs_diff_eq!(rep.amp_phi, 1.0 / (2.0 * gamma * dq), epsilon = 1e-12);
        assert_abs_diff_eq!(rep.snr_homodyne, phi * 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            rep.snr_split,
            (2.0 / PI).sqrt() * phi * 100.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            rep.snr_weak,
            3f64.powf(-0.25) * phi * 100.0,
            epsilon = 1e-12
        );

        // Extremum in the small-angle form: φ = ∓2γΔq gives ±Δq.
        let small =
            |phi: f64| -4.0 * gamma * dq * dq * phi / (phi * phi + 4.0 * gamma * gamma * dq * dq);
        assert_abs_diff_eq!(small(-2.0 * gamma * dq), dq, epsilon = 1e-12);
        assert_abs_diff_eq!(small(2.0 * gamma * dq), -dq, epsilon = 1e-12);
    }

    #[test]
    fn interferometer_model_moments_match_distribution() {
        let (gamma, dq, phi) = (0.1, 1.0, 0.05);
        let rep = interferometer_scenario(gamma, phi, dq, 1_000_000).unwrap();
        let phi_fn = |q: f64| (-q * q / 2.0).exp();
        let grid: Vec<f64> = (0..8001)
            .map(|i| -12.0 + 24.0 * i as f64 / 8000.0)
            .collect();
        let d = pointer_distribution_weak(
            gamma,
            &WeakValueReport::pure(rep.a_w),
            &MeterProfile::Coinciding(&phi_fn),
            &grid,
        )
        .unwrap();
        assert_abs_diff_eq!(d.mean(), rep.q_s, epsilon = 1e-9);
        assert_abs_diff_eq!(d.variance().sqrt(), rep.delta_q_s, epsilon = 1e-9);
        // Deep in the inverted region the spread tends to √3 Δq.
        let deep = interferometer_scenario(0.1, 1e-4, 1.0, 1).unwrap();
        assert_abs_diff_eq!(deep.delta_q_s, 3f64.sqrt(), epsilon = 1e-5);
        assert!((deep.snr_weak_model / deep.snr_weak_limit - 1.0).abs() < 1e-4);
    }
}
