//! Pointer distributions after post-selection.
//!
//! Continuous distributions live on caller-supplied grids and are normalized
//! by trapezoidal quadrature. The weak-coupling forms describe the main part
//! of the peak; their far tails are not reliable.

use crate::error::{Error, Result};
use crate::meters::{GaussianMeter, MatrixMeter, Pointer};
use crate::quantum_core::{
    c64, hermitian_eigen, hermitian_function, trace_product, CMatrix, DensityMatrix, Observable,
    Operator, PovmElement, C64,
};
use crate::weak_values::{post_selection_probability, WeakValueReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    /// Probabilities at the eigenvalues of a finite pointer.
    Discrete,
    /// Density samples on a grid.
    Continuous,
}

/// Pointer distribution as (value, probability or density) pairs in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerDistribution {
    pub grid: Vec<(f64, f64)>,
    pub kind: DistributionKind,
}

fn trapezoid(points: &[(f64, f64)], f: impl Fn(f64, f64) -> f64) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (f(w[0].0, w[0].1) + f(w[1].0, w[1].1)))
        .sum()
}

impl PointerDistribution {
    /// Normalizes raw weights; fails if the total is not positive and finite.
    pub fn from_weights(grid: Vec<(f64, f64)>, kind: DistributionKind) -> Result<Self> {
        let raw = PointerDistribution { grid, kind };
        let total = raw.integrate(|_, w| w);
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::UnnormalizableProfile);
        }
        Ok(PointerDistribution {
            grid: raw.grid.into_iter().map(|(r, w)| (r, w / total)).collect(),
            kind,
        })
    }

    fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        match self.kind {
            DistributionKind::Discrete => self.grid.iter().map(|&(r, w)| f(r, w)).sum(),
            DistributionKind::Continuous => trapezoid(&self.grid, f),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate(|_, w| w)
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|r, w| r * w) / self.total_mass()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.integrate(|r, w| (r - m) * (r - m) * w) / self.total_mass()
    }

    /// Cumulative distribution at the grid points, ending at 1.
    pub fn cdf(&self) -> Vec<f64> {
        let total = self.total_mass();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.grid.len());
        match self.kind {
            DistributionKind::Discrete => {
                for &(_, w) in &self.grid {
                    acc += w / total;
                    out.push(acc);
                }
            }
            DistributionKind::Continuous => {
                out.push(0.0);
                for w in self.grid.windows(2) {
                    acc += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / total;
                    out.push(acc);
                }
            }
        }
        out
    }
}

/// Pure meter wavefunction ψ(q) in the pointer representation, with F = p = −i d/dq.
pub trait WaveFunction {
    fn psi(&self, q: f64) -> C64;
    fn dpsi(&self, q: f64) -> C64;
}

impl WaveFunction for GaussianMeter {
    fn psi(&self, q: f64) -> C64 {
        self.psi_q(q)
    }

    fn dpsi(&self, q: f64) -> C64 {
        self.dpsi_q(q)
    }
}

/// Initial meter state seen from the pointer.
pub enum MeterProfile<'a> {
    /// R = F with initial density Φ(F).
    Coinciding(&'a dyn Fn(f64) -> f64),
    /// F = p, R = q, pure state ψ(q).
    Conjugate(&'a dyn WaveFunction),
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "grid must be strictly increasing with at least 2 points".into(),
        ));
    }
    Ok(())
}

/// Weak-coupling distribution
/// Φ_s ∝ Φ + 2γ Im[A_w Φ₁] + γ² A_w^(1,1) Φ₂ on `grid`.
pub fn pointer_distribution_weak(
    gamma: f64,
    wv: &WeakValueReport,
    profile: &MeterProfile,
    grid: &[f64],
) -> Result<PointerDistribution> {
    check_grid(grid)?;
    let a = wv.a_w;
    let a11 = wv.a_w_11;
    let weights = grid
        .iter()
        .map(|&r| {
            let w = match profile {
                MeterProfile::Coinciding(phi) => {
                    phi(r) * (1.0 + 2.0 * gamma * a.im * r + gamma * gamma * a11 * r * r)
                }
                MeterProfile::Conjugate(psi) => {
                    let (v, d) = (psi.psi(r), psi.dpsi(r));
                    v.norm_sqr() - 2.0 * gamma * (a * v.conj() * d).re
                        + gamma * gamma * a11 * d.norm_sqr()
                }
            };
            (r, w)
        })
        .collect();
    PointerDistribution::from_weights(weights, DistributionKind::Continuous)
}

/// Exact distribution for Â² = I:
/// Φ_s ∝ Φ_cc + 2Im[A_w Φ_sc] + A_w^(1,1) Φ_ss on `grid`.
pub fn pointer_distribution_exact(
    gamma: f64,
    wv: &WeakValueReport,
    profile: &MeterProfile,
    grid: &[f64],
) -> Result<PointerDistribution> {
    check_grid(grid)?;
    let a = wv.a_w;
    let a11 = wv.a_w_11;
    let weights = grid
        .iter()
        .map(|&r| {
            let w = match profile {
                MeterProfile::Coinciding(phi) => {
                    let (s, c) = (gamma * r).sin_cos();
                    phi(r) * (c * c + a.im * (2.0 * gamma * r).sin() + a11 * s * s)
                }
                MeterProfile::Conjugate(psi) => {
                    let (plus, minus) = (psi.psi(r + gamma), psi.psi(r - gamma));
                    let pc = (plus + minus) / 2.0;
                    let ps = (plus - minus) / c64(0.0, 2.0);
                    pc.norm_sqr() + 2.0 * (a * ps * pc.conj()).im + a11 * ps.norm_sqr()
                }
            };
            (r, w)
        })
        .collect();
    PointerDistribution::from_weights(weights, DistributionKind::Continuous)
}

/// Groups the eigenvectors of R by eigenvalue and evaluates
/// Σ_{|R⟩ in group} ⟨R|X|R⟩ for each operator builder.
fn discrete_from_pointer(
    meter: &MatrixMeter,
    weight: impl Fn(&CMatrix, usize) -> f64,
) -> Result<PointerDistribution> {
    let (values, vectors) = hermitian_eigen(&meter.r)?;
    let mut grid: Vec<(f64, f64)> = Vec::new();
    // Eigenvalues come sorted descending; emit ascending.
    for i in (0..values.len()).rev() {
        let w = weight(&vectors, i);
        match grid.last_mut() {
            Some(last) if (last.0 - values[i]).abs() <= 1e-12 * (1.0 + values[i].abs()) => {
                last.1 += w
            }
            _ => grid.push((values[i], w)),
        }
    }
    PointerDistribution::from_weights(grid, DistributionKind::Discrete)
}

fn diag_element(op: &CMatrix, vectors: &CMatrix, i: usize) -> C64 {
    let v = vectors.column(i);
    (v.adjoint() * op * v)[(0, 0)]
}

/// Weak-coupling distribution of a finite pointer.
pub fn pointer_distribution_weak_matrix(
    gamma: f64,
    wv: &WeakValueReport,
    meter: &MatrixMeter,
) -> Result<PointerDistribution> {
    let rho = meter.rho.matrix();
    let f_rho = &meter.f * rho;
    let f_rho_f = &f_rho * &meter.f;
    discrete_from_pointer(meter, |v, i| {
        diag_element(rho, v, i).re
            + 2.0 * gamma * (wv.a_w * diag_element(&f_rho, v, i)).im
            + gamma * gamma * wv.a_w_11 * diag_element(&f_rho_f, v, i).re
    })
}

/// Exact distribution of a finite pointer for Â² = I.
pub fn pointer_distribution_exact_matrix(
    gamma: f64,
    wv: &WeakValueReport,
    meter: &MatrixMeter,
) -> Result<PointerDistribution> {
    let cos = hermitian_function(&meter.f, |x| c64((gamma * x).cos(), 0.0))?;
    let sin = hermitian_function(&meter.f, |x| c64((gamma * x).sin(), 0.0))?;
    let rho = meter.rho.matrix();
    let cc = &cos * rho * &cos;
    let sc = &sin * rho * &cos;
    let ss = &sin * rho * &sin;
    discrete_from_pointer(meter, |v, i| {
        diag_element(&cc, v, i).re
            + 2.0 * (wv.a_w * diag_element(&sc, v, i)).im
            + wv.a_w_11 * diag_element(&ss, v, i).re
    })
}

/// Location of the maximum, refined by a parabola through the top three samples.
pub fn distribution_peak(dist: &PointerDistribution) -> Result<f64> {
    let g = &dist.grid;
    let (i, _) = g
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .ok_or(Error::UnnormalizableProfile)?;
    if i == 0 || i + 1 == g.len() || dist.kind == DistributionKind::Discrete {
        return Ok(g[i].0);
    }
    let (x0, y0) = g[i - 1];
    let (x1, y1) = g[i];
    let (x2, y2) = g[i + 1];
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let curv = (d2 - d1) / (x2 - x0);
    if curv >= 0.0 {
        return Ok(x1);
    }
    // Vertex of the interpolating parabola.
    Ok((x0 + x1) / 2.0 - d1 / (2.0 * curv))
}

/// β = Φ(R_max)/(|Φ″(R_max)| ΔR²) for a bell-shaped profile.
pub fn beta_factor(phi: &dyn Fn(f64) -> f64, r_max: f64, delta_r: f64) -> Result<f64> {
    if !(delta_r > 0.0) {
        return Err(Error::NonPositiveSpread(delta_r));
    }
    let h = 1e-3 * delta_r;
    let second = (phi(r_max + h) - 2.0 * phi(r_max) + phi(r_max - h)) / (h * h);
    if !(second < 0.0) {
        return Err(Error::NonBellProfile);
    }
    Ok(phi(r_max) / (second.abs() * delta_r * delta_r))
}

/// Shape information needed for the shift of the distribution maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeakContext {
    /// R = F.
    Coinciding { delta_f: f64, beta: f64 },
    /// F = p, R = q; `xi_second` is the second derivative of the phase of ψ(q) at the peak.
    Conjugate {
        delta_q: f64,
        beta: f64,
        xi_second: f64,
    },
}

impl PeakContext {
    /// Gaussian meter: β = 1 and ξ″ = b/(2Δq²).
    pub fn gaussian(m: &GaussianMeter) -> Self {
        match m.pointer {
            Pointer::Momentum => PeakContext::Coinciding {
                delta_f: m.delta_p,
                beta: 1.0,
            },
            Pointer::Position => {
                let dq = m.delta_q();
                PeakContext::Conjugate {
                    delta_q: dq,
                    beta: 1.0,
                    xi_second: m.b / (2.0 * dq * dq),
                }
            }
        }
    }
}

/// Linear-regime shift of the distribution maximum:
/// 2βγ(ΔF)² Im A_w for R = F, γ[Re A_w + 2βξ″(Δq)² Im A_w] for conjugate variables.
pub fn distribution_peak_shift(gamma: f64, a_w: C64, ctx: &PeakContext) -> f64 {
    match *ctx {
        PeakContext::Coinciding { delta_f, beta } => {
            2.0 * beta * gamma * delta_f * delta_f * a_w.im
        }
        PeakContext::Conjugate {
            delta_q,
            beta,
            xi_second,
        } => gamma * (a_w.re + 2.0 * beta * xi_second * delta_q * delta_q * a_w.im),
    }
}

/// ρ′ = (Eρ + ρE)/(2Tr(Eρ)). Hermitian with unit trace but not necessarily positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientState {
    matrix: CMatrix,
}

impl TransientState {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(&self.matrix)?.0)
    }

    /// Tr(Âρ′).
    pub fn expectation(&self, a: &Observable) -> f64 {
        trace_product(a.matrix(), &self.matrix).re
    }

    /// The density matrix, if ρ′ happens to be positive.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix.clone())
    }
}

pub fn transient_equivalence(rho: &DensityMatrix, e: &PovmElement) -> Result<TransientState> {
    let norm = post_selection_probability(rho, e)?;
    let er = e.matrix() * rho.matrix();
    let matrix = (&er + er.adjoint()) * c64(0.5 / norm, 0.0);
    Ok(TransientState { matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meters::{moments_gaussian, trig_moments_gaussian, QubitMeter};
    use crate::pps::{exact_pps, pps_deflection_nonlinear};
    use crate::quantum_core::{bloch_ket, bloch_state, pauli_x, Ket};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn gauss(mean: f64, sd: f64) -> impl Fn(f64) -> f64 {
        move |x| (-(x - mean).powi(2) / (2.0 * sd * sd)).exp() / ((2.0 * PI).sqrt() * sd)
    }

    #[test]
    fn zero_coupling_keeps_profile() {
        let phi = gauss(0.3, 1.0);
        let g = grid(-10.0, 10.0, 2001);
        let wv = WeakValueReport::pure(c64(1.0, 2.0));
        let d = pointer_distribution_exact(0.0, &wv, &MeterProfile::Coinciding(&phi), &g).unwrap();
        for &(r, w) in d.grid.iter().step_by(97) {
            assert_abs_diff_eq!(w, phi(r), epsilon = 1e-9);
        }
    }

    #[test]
    fn imaginary_weak_value_has_zero() {
        let phi = gauss(0.0, 1.0);
        let (gamma, im) = (0.1, 4.0);
        let f_min = -1.0 / (gamma * im);
        let g = vec![f_min - 1.0, f_min, f_min + 1.0];
        let d = pointer_distribution_weak(
            gamma,
            &WeakValueReport::pure(c64(0.0, im)),
            &MeterProfile::Coinciding(&phi),
            &g,
        )
        .unwrap();
        assert_abs_diff_eq!(d.grid[1].1, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn orthogonal_limit_coinciding() {
        let phi = gauss(0.0, 1.0);
        let g = grid(-12.0, 12.0, 4001);
        let wv = WeakValueReport::pure(c64(0.0, 1e9));
        let d = pointer_distribution_weak(0.1, &wv, &MeterProfile::Coinciding(&phi), &g).unwrap();
        for &(r, w) in d.grid.iter().step_by(211) {
            assert_abs_diff_eq!(w, r * r * phi(r), epsilon = 1e-6);
        }
    }

    #[test]
    fn orthogonal_limit_conjugate_is_symmetric_with_zero() {
        let m = GaussianMeter::new(0.0, 0.0, 1.0, 0.0, Pointer::Position).unwrap();
        let g = grid(-4.0, 4.0, 801);
        let wv = WeakValueReport::pure(c64(1e9, 0.0));
        let d = pointer_distribution_weak(0.1, &wv, &MeterProfile::Conjugate(&m), &g).unwrap();
        let limit: Vec<(f64, f64)> = g.iter().map(|&q| (q, m.dpsi_q(q).norm_sqr())).collect();
        let limit = PointerDistribution::from_weights(limit, DistributionKind::Continuous).unwrap();
        assert_abs_diff_eq!(limit.grid[400].1, 0.0, epsilon = 1e-15);
        for (x, y) in d.grid.iter().zip(&limit.grid) {
            assert_abs_diff_eq!(x.1, y.1, epsilon = 1e-6);
        }
        for i in 0..400 {
            assert_abs_diff_eq!(limit.grid[i].1, limit.grid[800 - i].1, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_coinciding_imaginary_shape() {
        let phi = gauss(0.0, 1.0);
        let g = grid(-10.0, 10.0, 4001);
        let (gamma, im) = (0.7, -1.5);
        let d = pointer_distribution_exact(
            gamma,
            &WeakValueReport::pure(c64(0.0, im)),
            &MeterProfile::Coinciding(&phi),
            &g,
        )
        .unwrap();
        let shape: Vec<(f64, f64)> = g
            .iter()
            .map(|&f| {
                (
                    f,
                    phi(f) * ((gamma * f).cos() + im * (gamma * f).sin()).powi(2),
                )
            })
            .collect();
        let expected =
            PointerDistribution::from_weights(shape, DistributionKind::Continuous).unwrap();
        for (a, b) in d.grid.iter().zip(&expected.grid) {
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_conjugate_real_weak_value_shape() {
        let m = GaussianMeter::new(0.0, 0.0, 1.0, 0.0, Pointer::Position).unwrap();
        let g = grid(-6.0, 6.0, 2401);
        let (gamma, a) = (0.8, 2.5);
        let d = pointer_distribution_exact(
            gamma,
            &WeakValueReport::pure(c64(a, 0.0)),
            &MeterProfile::Conjugate(&m),
            &g,
        )
        .unwrap();
        let shape: Vec<(f64, f64)> = g
            .iter()
            .map(|&q| {
                (
                    q,
                    ((1.0 - a) * m.psi_q(q + gamma).re + (1.0 + a) * m.psi_q(q - gamma).re).powi(2),
                )
            })
            .collect();
        let expected =
            PointerDistribution::from_weights(shape, DistributionKind::Continuous).unwrap();
        for (x, y) in d.grid.iter().zip(&expected.grid) {
            assert_abs_diff_eq!(x.1, y.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn first_moment_matches_averages() {
        let m = GaussianMeter::new(0.3, -0.2, 0.9, 0.8, Pointer::Position).unwrap();
        let g = grid(-12.0, 12.0, 6001);
        let wv = WeakValueReport::new(c64(1.2, -0.7), 2.5).unwrap();
        let gamma = 0.2;
        let weak = pointer_distribution_weak(gamma, &wv, &MeterProfile::Conjugate(&m), &g).unwrap();
        let nl = pps_deflection_nonlinear(gamma, &wv, &moments_gaussian(&m).unwrap()).unwrap();
        assert_abs_diff_eq!(weak.mean(), nl.r_s, epsilon = 1e-6);
        let exact =
            pointer_distribution_exact(gamma, &wv, &MeterProfile::Conjugate(&m), &g).unwrap();
        let ex = exact_pps(gamma, &wv, &trig_moments_gaussian(&m, gamma)).unwrap();
        assert_abs_diff_eq!(exact.mean(), ex.r_s, epsilon = 1e-6);
        assert_abs_diff_eq!(exact.total_mass(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn matrix_distributions_match_averages() {
        let q = QubitMeter::new([1.0, 0.0, 0.0], [0.6, 0.8, 0.0], 0.2, [0.1, -0.4, 0.3]).unwrap();
        let mm = q.matrix_meter();
        let wv = WeakValueReport::new(c64(0.8, 1.9), 5.0).unwrap();
        let gamma = 0.3;
        let d = pointer_distribution_exact_matrix(gamma, &wv, &mm).unwrap();
        let ex = exact_pps(gamma, &wv, &crate::meters::trig_moments_qubit(&q, gamma)).unwrap();
        assert_abs_diff_eq!(d.mean(), ex.r_s, epsilon = 1e-13);
        let d = pointer_distribution_weak_matrix(gamma, &wv, &mm).unwrap();
        let nl = pps_deflection_nonlinear(gamma, &wv, &crate::meters::moments_qubit(&q).unwrap())
            .unwrap();
        assert_abs_diff_eq!(d.mean(), nl.r_s, epsilon = 1e-13);
        assert_eq!(d.grid.len(), 2);
    }

    #[test]
    fn peak_shift_formulas() {
        let a = c64(0.4, -0.9);
        let m = GaussianMeter::new(0.0, 0.0, 1.2, 2.0, Pointer::Position).unwrap();
        assert_abs_diff_eq!(
            distribution_peak_shift(0.01, a, &PeakContext::gaussian(&m)),
            0.01 * (0.4 + 2.0 * -0.9),
            epsilon = 1e-15
        );
        let m = GaussianMeter::new(0.0, 0.0, 1.2, 0.0, Pointer::Momentum).unwrap();
        assert_abs_diff_eq!(
            distribution_peak_shift(0.01, a, &PeakContext::gaussian(&m)),
            2.0 * 0.01 * 1.44 * -0.9,
            epsilon = 1e-15
        );
        let real = c64(0.7, 0.0);
        let ctx = PeakContext::Conjugate {
            delta_q: 1.0,
            beta: 1.0,
            xi_second: 5.0,
        };
        assert_abs_diff_eq!(
            distribution_peak_shift(0.01, real, &ctx),
            0.007,
            epsilon = 1e-15
        );
    }

    #[test]
    fn peak_shift_matches_numerical_peak() {
        let m = GaussianMeter::new(0.0, 0.0, 1.0, 1.5, Pointer::Position).unwrap();
        let g = grid(-5.0, 5.0, 20001);
        let a = c64(0.5, 0.8);
        let gamma = 1e-3;
        let d = pointer_distribution_weak(
            gamma,
            &WeakValueReport::pure(a),
            &MeterProfile::Conjugate(&m),
            &g,
        )
        .unwrap();
        let shift = distribution_peak(&d).unwrap();
        let predicted = distribution_peak_shift(gamma, a, &PeakContext::gaussian(&m));
        assert!(
            (shift - predicted).abs() < 0.02 * predicted.abs(),
            "{shift} vs {predicted}"
        );
    }

    #[test]
    fn beta_of_gaussian_is_one() {
        let phi = gauss(0.0, 1.3);
        assert_abs_diff_eq!(beta_factor(&phi, 0.0, 1.3).unwrap(), 1.0, epsilon = 1e-5);
        let flat = |x: f64| x * x;
        assert!(matches!(
            beta_factor(&flat, 0.0, 1.0),
            Err(Error::NonBellProfile)
        ));
    }

    #[test]
    fn transient_state_examples() {
        let rho = bloch_state(0.4, 0.2, 0.7).unwrap();
        let e = PovmElement::scaled_identity(2, 0.5).unwrap();
        let t = transient_equivalence(&rho, &e).unwrap();
        assert!((t.matrix() - rho.matrix()).iter().all(|z| z.norm() < 1e-14));

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let phi = bloch_ket(1.0, 0.5);
        let t = transient_equivalence(&mixed, &PovmElement::projector(&phi)).unwrap();
        assert!((t.matrix() - phi.projector())
            .iter()
            .all(|z| z.norm() < 1e-14));

        let psi = DensityMatrix::from_ket(&bloch_ket(0.3, 0.0));
        let t = transient_equivalence(&psi, &PovmElement::projector(&bloch_ket(2.0, 1.0))).unwrap();
        let ev = t.eigenvalues().unwrap();
        assert!(ev[1] < -1e-3);
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(t.to_density().is_err());
        let orth = PovmElement::projector(&Ket::basis(2, 1).unwrap());
        let up = DensityMatrix::from_ket(&Ket::basis(2, 0).unwrap());
        assert!(transient_equivalence(&up, &orth).is_err());
        let _ = pauli_x();
    }
}
