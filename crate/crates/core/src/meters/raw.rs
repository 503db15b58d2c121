//! Raw operator moments ⟨F^l R_c F^r⟩ used by the coupling-series expansion.

use super::gaussian::{GaussianMeter, Pointer};
use super::qubit::QubitMeter;
use crate::error::{Error, Result};
use crate::quantum_core::{c64, identity, trace_product, CMatrix, DensityMatrix, Operator, C64};
use crate::tol::EPS_HERM;

/// Provider of ⟨F^n⟩ and ⟨F^l R_c F^r⟩ for a meter state.
pub trait RawMoments {
    /// ⟨F^n⟩.
    fn f_power(&self, n: usize) -> f64;
    /// ⟨F^l R_c F^r⟩ with R_c = R − R̄.
    fn sandwich(&self, l: usize, r: usize) -> C64;
}

impl RawMoments for GaussianMeter {
    fn f_power(&self, n: usize) -> f64 {
        self.p_moments(n)[n]
    }

    fn sandwich(&self, l: usize, r: usize) -> C64 {
        let n = l + r;
        let m = self.p_moments(n + 1);
        let centered = m[n + 1] - self.p_bar * m[n];
        match self.pointer {
            Pointer::Momentum => c64(centered, 0.0),
            Pointer::Position => {
                // q = i d/dp on ψ(p) = |ψ(p)| e^{−iζ(p)}; the phase contributes ⟨p^n ζ′(p)⟩.
                let slope = self.b / (2.0 * self.delta_p * self.delta_p);
                let lower = if n == 0 { 0.0 } else { m[n - 1] };
                c64(slope * centered, (r as f64 - l as f64) / 2.0 * lower)
            }
        }
    }
}

/// Finite-dimensional meter given by its state and the F, R matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeter {
    pub rho: DensityMatrix,
    pub f: CMatrix,
    pub r: CMatrix,
}

impl MatrixMeter {
    pub fn new(rho: DensityMatrix, f: CMatrix, r: CMatrix) -> Result<Self> {
        let d = rho.dim();
        for m in [&f, &r] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.nrows(),
                });
            }
            let herm = crate::quantum_core::hermiticity_error(m);
            if herm > EPS_HERM {
                return Err(Error::NotHermitian(herm));
            }
        }
        Ok(Self { rho, f, r })
    }

    fn f_pow(&self, n: usize) -> CMatrix {
        let mut out = identity(self.f.nrows());
        for _ in 0..n {
            out = &out * &self.f;
        }
        out
    }

    fn r_centered(&self) -> CMatrix {
        let r_bar = trace_product(&self.r, self.rho.matrix()).re;
        &self.r - identity(self.r.nrows()) * c64(r_bar, 0.0)
    }
}

impl RawMoments for MatrixMeter {
    fn f_power(&self, n: usize) -> f64 {
        trace_product(&self.f_pow(n), self.rho.matrix()).re
    }

    fn sandwich(&self, l: usize, r: usize) -> C64 {
        let op = self.f_pow(l) * self.r_centered() * self.f_pow(r);
        trace_product(&op, self.rho.matrix())
    }
}

impl QubitMeter {
    pub fn matrix_meter(&self) -> MatrixMeter {
        MatrixMeter {
            rho: self.state(),
            f: self.f_operator(),
            r: self.r_operator(),
        }
    }
}

impl RawMoments for QubitMeter {
    fn f_power(&self, n: usize) -> f64 {
        self.matrix_meter().f_power(n)
    }

    fn sandwich(&self, l: usize, r: usize) -> C64 {
        self.matrix_meter().sandwich(l, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meters::{moments_gaussian, moments_qubit};
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_low_orders_match_moments() {
        for pointer in [Pointer::Position, Pointer::Momentum] {
            let g = GaussianMeter::new(0.8, -0.3, 1.4, 2.1, pointer).unwrap();
            let m = moments_gaussian(&g).unwrap();
            assert_abs_diff_eq!((g.sandwich(0, 1) - m.rcf).norm(), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!((g.sandwich(1, 1) - m.frcf).norm(), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(g.f_power(2), m.f2, epsilon = 1e-13);
            assert_abs_diff_eq!(g.sandwich(0, 0).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn gaussian_position_sandwich_matches_quadrature() {
        // ⟨p^l q_c p^r⟩ = ∫ ψ*(q) (−i d/dq)^l (q − q̄) (−i d/dq)^r ψ(q) dq would need
        // high derivatives; instead use the p-representation with a finite-difference
        // derivative of p^r ψ(p).
        let g = GaussianMeter::new(0.5, 0.2, 0.9, 1.3, Pointer::Position).unwrap();
        let n = 40_000;
        let (lo, hi) = (g.p_bar - 12.0 * g.delta_p, g.p_bar + 12.0 * g.delta_p);
        let h = (hi - lo) / n as f64;
        for (l, r) in [(0, 1), (1, 0), (1, 1), (2, 1), (0, 3), (2, 2)] {
            let phi = |p: f64| g.psi_p(p) * p.powi(r as i32);
            let mut acc = c64(0.0, 0.0);
            for i in 0..n {
                let p = lo + (i as f64 + 0.5) * h;
                let d = (phi(p + 1e-5) - phi(p - 1e-5)) / 2e-5;
                let q_phi = d * c64(0.0, 1.0) - phi(p) * g.q_bar;
                acc += g.psi_p(p).conj() * p.powi(l as i32) * q_phi * h;
            }
            assert_abs_diff_eq!((g.sandwich(l, r) - acc).norm(), 0.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn qubit_low_orders_match_moments() {
        let q = QubitMeter::new([1.0, 0.0, 0.0], [0.6, 0.8, 0.0], 0.4, [0.1, 0.5, -0.3]).unwrap();
        let m = moments_qubit(&q).unwrap();
        assert_abs_diff_eq!((q.sandwich(0, 1) - m.rcf).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q.sandwich(1, 1).re, m.frcf, epsilon = 1e-14);
        assert_abs_diff_eq!(q.f_power(2), m.f2, epsilon = 1e-14);
    }
}
