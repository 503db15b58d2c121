//! Two-level meter: F = σ·n_F + f₀, R = σ·n_R, ρ_M = (I + σ·s)/2.

use super::{MeterMoments, TrigMoments};
use crate::error::{Error, Result};
use crate::quantum_core::{c64, identity, qubit_state, sigma_dot, CMatrix, DensityMatrix};
use crate::tol::EPS_REL;

/// Below this |sin η| the pointer and coupled axes are treated as collinear.
const COLLINEAR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMeter {
    pub n_f: [f64; 3],
    pub n_r: [f64; 3],
    pub f0: f64,
    pub s_m: [f64; 3],
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Averages of the meter state that the moments are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitAverages {
    /// R̄ = s·n_R.
    pub r_bar: f64,
    /// F̄₁ = s·n_F.
    pub f1_bar: f64,
    /// Re⟨R F₁⟩ = cos η.
    pub m_r: f64,
    /// Im⟨R F₁⟩.
    pub m_i: f64,
    /// ⟨F₁ R F₁⟩.
    pub m: f64,
}

impl QubitMeter {
    pub fn new(n_f: [f64; 3], n_r: [f64; 3], f0: f64, s_m: [f64; 3]) -> Result<Self> {
        for (name, n) in [("n_F", n_f), ("n_R", n_r)] {
            if (dot(n, n).sqrt() - 1.0).abs() > EPS_REL {
                return Err(Error::InvalidParameter(format!(
                    "{name} is not a unit vector"
                )));
            }
        }
        if dot(s_m, s_m).sqrt() > 1.0 + EPS_REL {
            return Err(Error::PurityOutOfRange(dot(s_m, s_m).sqrt()));
        }
        if !f0.is_finite() {
            return Err(Error::InvalidParameter("non-finite f0".into()));
        }
        Ok(Self { n_f, n_r, f0, s_m })
    }

    pub fn state(&self) -> DensityMatrix {
        let len = dot(self.s_m, self.s_m).sqrt();
        let s = if len > 1.0 {
            scale(self.s_m, 1.0 / len)
        } else {
            self.s_m
        };
        qubit_state(s).expect("Bloch vector clipped to the unit ball")
    }

    pub fn f_operator(&self) -> CMatrix {
        sigma_dot(self.n_f) + identity(2) * c64(self.f0, 0.0)
    }

    pub fn r_operator(&self) -> CMatrix {
        sigma_dot(self.n_r)
    }

    /// cos η = n_F·n_R.
    pub fn cos_eta(&self) -> f64 {
        dot(self.n_f, self.n_r).clamp(-1.0, 1.0)
    }

    pub fn averages(&self) -> QubitAverages {
        let s = self.s_m;
        let r_bar = dot(s, self.n_r);
        let f1_bar = dot(s, self.n_f);
        let cos_eta = self.cos_eta();
        let perp = cross(self.n_r, self.n_f);
        let sin_eta = dot(perp, perp).sqrt();
        if sin_eta < COLLINEAR_EPS {
            // n_F = ±n_R: the products reduce to multiples of the identity.
            return QubitAverages {
                r_bar,
                f1_bar,
                m_r: cos_eta.signum(),
                m_i: 0.0,
                m: r_bar,
            };
        }
        let n2 = scale(perp, 1.0 / sin_eta);
        let n3 = cross(self.n_f, n2);
        let f2_bar = dot(s, n2);
        let f3_bar = dot(s, n3);
        QubitAverages {
            r_bar,
            f1_bar,
            m_r: cos_eta,
            m_i: f2_bar * sin_eta,
            m: f1_bar * cos_eta - f3_bar * sin_eta,
        }
    }
}

/// Moments of the two-level meter. A meter state with ΔF = 0 is rejected.
pub fn moments_qubit(m: &QubitMeter) -> Result<MeterMoments> {
    let av = m.averages();
    let var_f = 1.0 - av.f1_bar * av.f1_bar;
    if !(var_f > 0.0) {
        return Err(Error::NonPositiveSpread(var_f.max(0.0).sqrt()));
    }
    let f0 = m.f0;
    let rcf = c64(av.m_r - av.r_bar * av.f1_bar, av.m_i);
    let frcf = av.m - av.r_bar + 2.0 * f0 * (av.m_r - av.r_bar * av.f1_bar);
    let fcrcfc = av.m - 2.0 * av.f1_bar * av.m_r + av.r_bar * (2.0 * av.f1_bar * av.f1_bar - 1.0);
    Ok(MeterMoments {
        f_bar: av.f1_bar + f0,
        delta_f: var_f.sqrt(),
        r_bar: av.r_bar,
        delta_r: (1.0 - av.r_bar * av.r_bar).max(0.0).sqrt(),
        rcf,
        frcf,
        fcrcfc,
        f2: 1.0 + 2.0 * f0 * av.f1_bar + f0 * f0,
    })
}

/// Trigonometric averages of the two-level meter at coupling γ.
pub fn trig_moments_qubit(m: &QubitMeter, gamma: f64) -> TrigMoments {
    let av = m.averages();
    let f0 = m.f0;
    let (s10, c10) = gamma.sin_cos();
    let (s11, c11) = (gamma * f0).sin_cos();
    let (s20, c20) = (2.0 * gamma).sin_cos();
    let (s21, c21) = (2.0 * gamma * f0).sin_cos();
    let g_cc =
        c10 * c10 * c11 * c11 * av.r_bar - s20 * s21 * av.m_r / 2.0 + s10 * s10 * s11 * s11 * av.m;
    let g_cs = c64(
        c10 * c10 * s21 * av.r_bar + s20 * c21 * av.m_r - s10 * s10 * s21 * av.m,
        s20 * av.m_i,
    ) / 2.0;
    let g_ss =
        c10 * c10 * s11 * s11 * av.r_bar + s20 * s21 * av.m_r / 2.0 + s10 * s10 * c11 * c11 * av.m;
    TrigMoments {
        gamma,
        r_bar: av.r_bar,
        m_c: c20 * c21 - s20 * s21 * av.f1_bar,
        m_s: c20 * s21 + s20 * c21 * av.f1_bar,
        g_cc,
        g_ss,
        g_cs,
        m_c_prime: None,
        m_s_prime: None,
        g1: None,
        g2: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::{hermitian_function, trace_product, Operator};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    const X: [f64; 3] = [1.0, 0.0, 0.0];
    const Y: [f64; 3] = [0.0, 1.0, 0.0];
    const Z: [f64; 3] = [0.0, 0.0, 1.0];

    #[test]
    fn table_configurations() {
        // n_F = x, n_R = y: n_2 = y × x / 1 = −z.
        let m = moments_qubit(&QubitMeter::new(X, Y, 0.0, [0.0, 0.0, -1.0]).unwrap()).unwrap();
        assert_abs_diff_eq!((m.rcf - c64(0.0, 1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.frcf, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.fcrcfc, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.r_bar, 0.0, epsilon = 1e-15);

        // s = n_R ⊥ n_F: direct evaluation of σx(σy − 1)σx in the +y state gives −2.
        let m = moments_qubit(&QubitMeter::new(X, Y, 0.0, Y).unwrap()).unwrap();
        assert_abs_diff_eq!(m.rcf.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.frcf, -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.fcrcfc, -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.delta_r, 0.0, epsilon = 1e-15);

        let eta: f64 = 0.7;
        let n_r = [eta.sin(), 0.0, eta.cos()];
        let m = moments_qubit(&QubitMeter::new(Z, n_r, 0.4, [0.0; 3]).unwrap()).unwrap();
        assert_abs_diff_eq!((m.rcf - c64(eta.cos(), 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.frcf, 0.8 * eta.cos(), epsilon = 1e-15);
    }

    #[test]
    fn collinear_branch() {
        let s = [0.3, 0.1, 0.5];
        let m = moments_qubit(&QubitMeter::new(Z, Z, 0.2, s).unwrap()).unwrap();
        let f2 = 1.0 - 0.25;
        assert_abs_diff_eq!(m.rcf.re, f2, epsilon = 1e-15);
        assert_abs_diff_eq!(m.frcf, 0.4 * f2, epsilon = 1e-15);
        assert_abs_diff_eq!(m.fcrcfc, -2.0 * 0.5 * f2, epsilon = 1e-15);
        assert!(moments_qubit(&QubitMeter::new(Z, Z, 0.0, Z).unwrap()).is_err());
    }

    #[test]
    fn moments_match_matrices() {
        let cases = [
            QubitMeter::new(X, Y, 0.3, [0.0, 0.0, -1.0]).unwrap(),
            QubitMeter::new(X, [0.6, 0.8, 0.0], 0.7, [0.2, -0.3, 0.4]).unwrap(),
            QubitMeter::new(Z, Z, -0.5, [0.1, 0.2, 0.6]).unwrap(),
            QubitMeter::new([0.0, 0.6, 0.8], [0.48, 0.6, -0.64], 1.1, [0.6, 0.0, 0.0]).unwrap(),
        ];
        for m in &cases {
            let mm = moments_qubit(m).unwrap();
            let rho = m.state();
            let f = m.f_operator();
            let r = m.r_operator();
            let avg = |op: &CMatrix| trace_product(op, rho.matrix());
            let id = identity(2);
            let f_bar = avg(&f).re;
            let r_bar = avg(&r).re;
            let rc = &r - &id * c64(r_bar, 0.0);
            let fc = &f - &id * c64(f_bar, 0.0);
            assert_abs_diff_eq!(mm.f_bar, f_bar, epsilon = 1e-14);
            assert_abs_diff_eq!(mm.r_bar, r_bar, epsilon = 1e-14);
            assert_abs_diff_eq!((mm.rcf - avg(&(&rc * &f))).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(mm.frcf, avg(&(&f * &rc * &f)).re, epsilon = 1e-14);
            assert_abs_diff_eq!(mm.fcrcfc, avg(&(&fc * &rc * &fc)).re, epsilon = 1e-14);
            assert_abs_diff_eq!(mm.f2, avg(&(&f * &f)).re, epsilon = 1e-14);
            mm.validate().unwrap();
        }
    }

    fn direct_trig(m: &QubitMeter, gamma: f64) -> (f64, f64, f64, f64, Complex64) {
        let rho = m.state();
        let f = m.f_operator();
        let r = m.r_operator();
        let c = hermitian_function(&f, |x| c64((gamma * x).cos(), 0.0)).unwrap();
        let s = hermitian_function(&f, |x| c64((gamma * x).sin(), 0.0)).unwrap();
        let c2 = hermitian_function(&f, |x| c64((2.0 * gamma * x).cos(), 0.0)).unwrap();
        let s2 = hermitian_function(&f, |x| c64((2.0 * gamma * x).sin(), 0.0)).unwrap();
        let avg = |op: &CMatrix| trace_product(op, rho.matrix());
        (
            avg(&c2).re,
            avg(&s2).re,
            avg(&(&c * &r * &c)).re,
            avg(&(&s * &r * &s)).re,
            avg(&(&c * &r * &s)),
        )
    }

    #[test]
    fn trig_moments_match_matrices() {
        let cases = [
            QubitMeter::new(X, Y, 0.0, [0.0, 0.0, -1.0]).unwrap(),
            QubitMeter::new(X, [0.6, 0.8, 0.0], 0.7, [0.2, -0.3, 0.4]).unwrap(),
            QubitMeter::new(Z, Z, -0.5, [0.1, 0.2, 0.6]).unwrap(),
            QubitMeter::new(Z, [0.0, 0.0, -1.0], 1.5, [0.5, 0.0, -0.5]).unwrap(),
        ];
        for m in &cases {
            for &g in &[0.0, 0.1, PI / 4.0, 1.3, -2.2] {
                let t = trig_moments_qubit(m, g);
                let (mc, ms, gcc, gss, gcs) = direct_trig(m, g);
                assert_abs_diff_eq!(t.m_c, mc, epsilon = 1e-13);
                assert_abs_diff_eq!(t.m_s, ms, epsilon = 1e-13);
                assert_abs_diff_eq!(t.g_cc, gcc, epsilon = 1e-13);
                assert_abs_diff_eq!(t.g_ss, gss, epsilon = 1e-13);
                assert_abs_diff_eq!((t.g_cs - gcs).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn config_one_quarter_turn() {
        let m = QubitMeter::new(X, Y, 0.0, [0.0, 0.0, -1.0]).unwrap();
        let t = trig_moments_qubit(&m, PI / 4.0);
        assert_abs_diff_eq!(t.m_c, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((t.g_cs - c64(0.0, 0.5)).norm(), 0.0, epsilon = 1e-15);
        let t0 = trig_moments_qubit(&m, 0.0);
        assert_eq!(t0.m_c, 1.0);
        assert_eq!(t0.g_cc, t0.r_bar);
    }
}
