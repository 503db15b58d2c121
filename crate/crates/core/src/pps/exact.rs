//! Arbitrary-strength solutions for observables with Â² = C₀I.
//!
//! With Â² = I the coupling is U = cos(γF) − iÂ sin(γF), so every
//! conditional average depends on the system only through A_w and A_w^(1,1)
//! and on the meter through the trigonometric averages in [`TrigMoments`].

use super::MeasurementOutcome;
use crate::error::{Error, Result};
use crate::meters::{MatrixMeter, TrigMoments};
use crate::quantum_core::{
    c64, expectation, hermitian_function, identity, max_abs, trace_product, DensityMatrix,
    Observable, Operator, PovmElement,
};
use crate::tol::{EPS_DEN, EPS_HERM};
use crate::weak_values::WeakValueReport;

/// C₀ with Â² = C₀I, or [`Error::NonInvolutory`].
pub fn involution_constant(a: &Observable) -> Result<f64> {
    let d = a.dim();
    let sq = a.matrix() * a.matrix();
    let c0 = sq.trace().re / d as f64;
    if !(c0 > 0.0) {
        return Err(Error::NonInvolutory(c0));
    }
    let dev = max_abs(&(sq - identity(d) * c64(c0, 0.0)));
    if dev > EPS_HERM * (1.0 + c0) {
        return Err(Error::NonInvolutory(dev));
    }
    Ok(c0)
}

/// Maps (Â, γ) with Â² = C₀I to (Â/√C₀, γ√C₀), which leaves U unchanged.
pub fn rescale_involutory(a: &Observable, gamma: f64) -> Result<(Observable, f64)> {
    let c0 = involution_constant(a)?;
    let s = c0.sqrt();
    Ok((a.scaled(1.0 / s), gamma * s))
}

fn check_gamma(gamma: f64, tm: &TrigMoments) -> Result<()> {
    if (gamma - tm.gamma).abs() > 1e-15 * (1.0 + gamma.abs()) {
        return Err(Error::InvalidParameter(format!(
            "trigonometric moments were computed at γ = {}, not {gamma}",
            tm.gamma
        )));
    }
    Ok(())
}

/// Exact conditional pointer average for Â² = I:
/// R̄_s = [G_cc + 2Im(A_w G_cs) + A_w^(1,1) G_ss]/Q₁ with
/// Q₁ = [1 + M_c + 2M_s Im A_w + (1 − M_c)A_w^(1,1)]/2.
///
/// `wv` must be computed for the normalized observable; see [`exact_pps_system`].
pub fn exact_pps(gamma: f64, wv: &WeakValueReport, tm: &TrigMoments) -> Result<MeasurementOutcome> {
    check_gamma(gamma, tm)?;
    let a = wv.a_w;
    let q1 = (1.0 + tm.m_c + 2.0 * tm.m_s * a.im + (1.0 - tm.m_c) * wv.a_w_11) / 2.0;
    if q1 <= EPS_DEN {
        return Err(Error::DegenerateDenominator(q1));
    }
    let num = tm.g_cc + 2.0 * (a * tm.g_cs).im + wv.a_w_11 * tm.g_ss;
    let r_s = num / q1;
    Ok(MeasurementOutcome {
        r_s,
        deflection: r_s - tm.r_bar,
        post_prob: wv.post_norm.map(|p| p * q1),
        regime: None,
        low_signal: false,
    })
}

/// [`exact_pps`] from the system matrices; `trig` evaluates the meter's
/// trigonometric averages at the (rescaled) coupling.
pub fn exact_pps_system(
    gamma: f64,
    a: &Observable,
    rho: &DensityMatrix,
    e: &PovmElement,
    trig: &dyn Fn(f64) -> Result<TrigMoments>,
) -> Result<MeasurementOutcome> {
    let (a1, g1) = rescale_involutory(a, gamma)?;
    let wv = WeakValueReport::compute(&a1, rho, e)?;
    exact_pps(g1, &wv, &trig(g1)?)
}

/// Exact non-post-selected pointer average G_cc + G_ss + 2Ā Im G_cs for Â² = I.
pub fn exact_standard(gamma: f64, a_bar: f64, tm: &TrigMoments) -> Result<f64> {
    check_gamma(gamma, tm)?;
    Ok(tm.g_cc + tm.g_ss + 2.0 * a_bar * tm.g_cs.im)
}

/// [`exact_standard`] from the system matrices.
pub fn exact_standard_system(
    gamma: f64,
    a: &Observable,
    rho: &DensityMatrix,
    trig: &dyn Fn(f64) -> Result<TrigMoments>,
) -> Result<f64> {
    let (a1, g1) = rescale_involutory(a, gamma)?;
    let a_bar = expectation(&a1, rho)?.re;
    exact_standard(g1, a_bar, &trig(g1)?)
}

/// Trigonometric averages of a finite-dimensional meter by matrix functions.
pub fn trig_moments_matrix(meter: &MatrixMeter, gamma: f64) -> Result<TrigMoments> {
    let cos = hermitian_function(&meter.f, |x| c64((gamma * x).cos(), 0.0))?;
    let sin = hermitian_function(&meter.f, |x| c64((gamma * x).sin(), 0.0))?;
    let rho = meter.rho.matrix();
    let avg = |op: &crate::quantum_core::CMatrix| trace_product(op, rho);
    let r = &meter.r;
    let cos2 = hermitian_function(&meter.f, |x| c64((2.0 * gamma * x).cos(), 0.0))?;
    let sin2 = hermitian_function(&meter.f, |x| c64((2.0 * gamma * x).sin(), 0.0))?;
    Ok(TrigMoments {
        gamma,
        r_bar: avg(r).re,
        m_c: avg(&cos2).re,
        m_s: avg(&sin2).re,
        g_cc: avg(&(&cos * r * &cos)).re,
        g_ss: avg(&(&sin * r * &sin)).re,
        g_cs: avg(&(&cos * r * &sin)),
        m_c_prime: None,
        m_s_prime: None,
        g1: None,
        g2: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meters::{
        trig_moments_gaussian, trig_moments_qubit, GaussianMeter, Pointer, QubitMeter,
    };
    use crate::quantum_core::{bloch_ket, bloch_state, pauli_x, pauli_z};
    use approx::assert_abs_diff_eq;

    #[test]
    fn involution_checks() {
        let a = Observable::new(pauli_x() * c64(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(involution_constant(&a).unwrap(), 4.0, epsilon = 1e-14);
        let (a1, g1) = rescale_involutory(&a, 0.1).unwrap();
        assert_abs_diff_eq!(g1, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(involution_constant(&a1).unwrap(), 1.0, epsilon = 1e-14);
        let bad = Observable::diagonal(&[1.0, 0.5]).unwrap();
        assert!(matches!(
            involution_constant(&bad),
            Err(Error::NonInvolutory(_))
        ));
    }

    #[test]
    fn zero_coupling_gives_prior_average() {
        let g = GaussianMeter::new(0.4, 0.7, 1.0, 0.5, Pointer::Position).unwrap();
        let tm = trig_moments_gaussian(&g, 0.0);
        let wv = WeakValueReport::pure(c64(3.0, -2.0));
        let out = exact_pps(0.0, &wv, &tm).unwrap();
        assert_abs_diff_eq!(out.r_s, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(exact_standard(0.0, 0.3, &tm).unwrap(), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn coinciding_gaussian_closed_form() {
        let dp = 1.3;
        let g = GaussianMeter::new(0.0, 0.0, dp, 0.0, Pointer::Momentum).unwrap();
        let a = c64(0.6, -2.2);
        let wv = WeakValueReport::pure(a);
        for gamma in [0.05, 0.4, 1.7] {
            let out = exact_pps(gamma, &wv, &trig_moments_gaussian(&g, gamma)).unwrap();
            let a11 = a.norm_sqr();
            let expected = 4.0 * gamma * dp * dp * a.im
                / (1.0 - a11 + (1.0 + a11) * (2.0 * (gamma * dp).powi(2)).exp());
            assert_abs_diff_eq!(out.deflection, expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn conjugate_real_gaussian_closed_form() {
        let dp = 0.8;
        let g = GaussianMeter::new(0.0, 0.0, dp, 0.0, Pointer::Position).unwrap();
        let wv = WeakValueReport::new(c64(1.7, 0.9), 5.0).unwrap();
        let gamma = 0.6;
        let out = exact_pps(gamma, &wv, &trig_moments_gaussian(&g, gamma)).unwrap();
        let damp = (-2.0 * (gamma * dp).powi(2)).exp();
        let expected = 2.0 * gamma * 1.7 / (1.0 + 5.0 + (1.0 - 5.0) * damp);
        assert_abs_diff_eq!(out.deflection, expected, epsilon = 1e-14);
    }

    #[test]
    fn conjugate_standard_is_linear_at_all_orders() {
        let g = GaussianMeter::new(0.0, 0.0, 1.0, 0.0, Pointer::Position).unwrap();
        for gamma in [0.01, 0.7, 2.5] {
            let r = exact_standard(gamma, 0.35, &trig_moments_gaussian(&g, gamma)).unwrap();
            assert_abs_diff_eq!(r, gamma * 0.35, epsilon = 1e-14);
        }
    }

    #[test]
    fn qubit_trig_matches_matrix_functions() {
        let q = QubitMeter::new([0.0, 0.6, 0.8], [1.0, 0.0, 0.0], 0.3, [0.2, -0.4, 0.5]).unwrap();
        for gamma in [0.1, 0.9, 2.2] {
            let a = trig_moments_qubit(&q, gamma);
            let b = trig_moments_matrix(&q.matrix_meter(), gamma).unwrap();
            assert_abs_diff_eq!(a.m_c, b.m_c, epsilon = 1e-14);
            assert_abs_diff_eq!(a.m_s, b.m_s, epsilon = 1e-14);
            assert_abs_diff_eq!(a.g_cc, b.g_cc, epsilon = 1e-14);
            assert_abs_diff_eq!(a.g_ss, b.g_ss, epsilon = 1e-14);
            assert_abs_diff_eq!((a.g_cs - b.g_cs).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn qubit_config1_trig_example() {
        let q = QubitMeter::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, [0.0, 0.0, -1.0]).unwrap();
        let t = trig_moments_qubit(&q, std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!(t.m_c, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((t.g_cs - c64(0.0, 0.5)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn system_wrapper_rescales() {
        let a = Observable::new(pauli_z() * c64(3.0, 0.0)).unwrap();
        let a1 = Observable::new(pauli_z()).unwrap();
        let rho = bloch_state(1.1, 0.3, 0.9).unwrap();
        let e = PovmElement::projector(&bloch_ket(2.0, -0.5));
        let g = GaussianMeter::new(0.2, 0.0, 1.0, 0.4, Pointer::Position).unwrap();
        let trig = |x: f64| Ok(trig_moments_gaussian(&g, x));
        let direct = exact_pps_system(0.1, &a, &rho, &e, &trig).unwrap();
        let scaled = exact_pps_system(0.3, &a1, &rho, &e, &trig).unwrap();
        assert_abs_diff_eq!(direct.r_s, scaled.r_s, epsilon = 1e-14);
        let wrong = exact_pps(
            0.1,
            &WeakValueReport::pure(c64(1.0, 0.0)),
            &trig_moments_gaussian(&g, 0.2),
        );
        assert!(wrong.is_err());
    }

    #[test]
    fn uninformative_post_selection_is_standard() {
        let a = Observable::new(pauli_x()).unwrap();
        let rho = bloch_state(0.7, 1.2, 0.8).unwrap();
        let e = PovmElement::scaled_identity(2, 0.4).unwrap();
        let q = QubitMeter::new([0.0, 0.0, 1.0], [0.6, 0.0, 0.8], 0.2, [0.3, 0.3, 0.3]).unwrap();
        let trig = |x: f64| Ok(trig_moments_qubit(&q, x));
        for gamma in [0.2, 1.0, 2.0] {
            let pps = exact_pps_system(gamma, &a, &rho, &e, &trig).unwrap();
            let std = exact_standard_system(gamma, &a, &rho, &trig).unwrap();
            assert_abs_diff_eq!(pps.r_s, std, epsilon = 1e-13);
            assert_abs_diff_eq!(pps.post_prob.unwrap(), 0.4, epsilon = 1e-13);
        }
    }
}
