//! Exact evolution on a finite system ⊗ meter space.

use super::PpsSystem;
use crate::error::{Error, Result};
use crate::meters::MatrixMeter;
use crate::pps::{DistributionKind, MeasurementOutcome, PointerDistribution};
use crate::quantum_core::{
    hermitian_eigen, hermitian_expm, identity, kron, trace_product, CMatrix, Operator,
};
use crate::tol::{EPS_DEN, EPS_INV};

pub const MAX_PRODUCT_DIM: usize = 4096;

/// ρ_f = U(ρ ⊗ ρ_M)U† with U = exp(−iγÂ⊗F̂).
fn final_state(sys: &PpsSystem, meter: &MatrixMeter, gamma: f64) -> Result<CMatrix> {
    let dim = sys.dim() * meter.f.nrows();
    if dim > MAX_PRODUCT_DIM {
        return Err(Error::DimensionOverflow(dim));
    }
    let u = hermitian_expm(&kron(sys.a.matrix(), &meter.f), gamma)?;
    let rho0 = kron(sys.rho.matrix(), meter.rho.matrix());
    Ok(&u * rho0 * u.adjoint())
}

pub fn tensor_pps_average(
    sys: &PpsSystem,
    meter: &MatrixMeter,
    gamma: f64,
) -> Result<MeasurementOutcome> {
    let rho_f = final_state(sys, meter, gamma)?;
    let dm = meter.f.nrows();
    let prob = trace_product(&kron(sys.e.matrix(), &identity(dm)), &rho_f).re;
    if prob <= EPS_DEN {
        return Err(Error::VanishingPostSelection(prob));
    }
    let num = trace_product(&kron(sys.e.matrix(), &meter.r), &rho_f).re;
    let r_bar = trace_product(&meter.r, meter.rho.matrix()).re;
    let r_s = num / prob;
    Ok(MeasurementOutcome {
        r_s,
        deflection: r_s - r_bar,
        post_prob: Some(prob),
        regime: None,
        low_signal: false,
    })
}

/// Post-selection probability and the conditional distribution of R's eigenvalues.
pub fn tensor_pointer_distribution(
    sys: &PpsSystem,
    meter: &MatrixMeter,
    gamma: f64,
) -> Result<(f64, PointerDistribution)> {
    let rho_f = final_state(sys, meter, gamma)?;
    let (values, vectors) = hermitian_eigen(&meter.r)?;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for i in (0..values.len()).rev() {
        let v = vectors.column(i);
        let proj = v * v.adjoint();
        let w = trace_product(&kron(sys.e.matrix(), &proj), &rho_f)
            .re
            .max(0.0);
        match points.last_mut() {
            Some(last) if (last.0 - values[i]).abs() <= EPS_INV * (1.0 + values[i].abs()) => {
                last.1 += w
            }
            _ => points.push((values[i], w)),
        }
    }
    let prob: f64 = points.iter().map(|p| p.1).sum();
    if prob <= EPS_DEN {
        return Err(Error::VanishingPostSelection(prob));
    }
    Ok((
        prob,
        PointerDistribution::from_weights(points, DistributionKind::Discrete)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meters::{moments_qubit, trig_moments_qubit, QubitMeter};
    use crate::pps::{exact_pps, exact_standard, pps_deflection_nonlinear};
    use crate::quantum_core::{bloch_ket, c64, DensityMatrix, Observable, PovmElement};
    use crate::weak_values::WeakValueReport;
    use approx::assert_abs_diff_eq;

    fn system(e: PovmElement) -> PpsSystem {
        PpsSystem::new(
            DensityMatrix::from_ket(&bloch_ket(1.1, 0.4)),
            Observable::sigma([0.6, 0.0, 0.8]),
            e,
        )
        .unwrap()
    }

    #[test]
    fn qubit_meter_matches_exact_solution() {
        let sys = system(PovmElement::projector(&bloch_ket(2.0, -1.0)));
        let wv = WeakValueReport::compute(&sys.a, &sys.rho, &sys.e).unwrap();
        let q = QubitMeter::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 0.3, [0.5, 0.2, 0.6]).unwrap();
        for gamma in [0.05, 0.5, 1.3, 3.0] {
            let oracle = tensor_pps_average(&sys, &q.matrix_meter(), gamma).unwrap();
            let exact = exact_pps(gamma, &wv, &trig_moments_qubit(&q, gamma)).unwrap();
            assert_abs_diff_eq!(oracle.r_s, exact.r_s, epsilon = 1e-12);
        }
    }

    #[test]
    fn trivial_post_selection_is_standard() {
        let sys = system(PovmElement::scaled_identity(2, 0.3).unwrap());
        let q = QubitMeter::new([0.0, 0.0, 1.0], [0.0, 1.0, 0.0], -0.2, [0.1, 0.7, 0.3]).unwrap();
        let a_bar = crate::quantum_core::expectation(&sys.a, &sys.rho)
            .unwrap()
            .re;
        let gamma = 0.9;
        let oracle = tensor_pps_average(&sys, &q.matrix_meter(), gamma).unwrap();
        let std = exact_standard(gamma, a_bar, &trig_moments_qubit(&q, gamma)).unwrap();
        assert_abs_diff_eq!(oracle.r_s, std, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle.post_prob.unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn sharp_coupled_variable_gives_no_deflection() {
        // Meter prepared in an eigenstate of F: ΔF = 0.
        let sys = system(PovmElement::projector(&bloch_ket(2.0, -1.0)));
        let q = QubitMeter::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 0.0, [0.0, 0.0, 1.0]).unwrap();
        for gamma in [0.1, 1.0, 2.5] {
            assert_abs_diff_eq!(
                tensor_pps_average(&sys, &q.matrix_meter(), gamma)
                    .unwrap()
                    .deflection,
                0.0,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn nonlinear_formula_is_weak_limit() {
        let sys = system(PovmElement::projector(&bloch_ket(2.0, -1.0)));
        let wv = WeakValueReport::compute(&sys.a, &sys.rho, &sys.e).unwrap();
        let q = QubitMeter::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 0.3, [0.5, 0.2, 0.6]).unwrap();
        let m = moments_qubit(&q).unwrap();
        let gamma = 1e-3;
        let oracle = tensor_pps_average(&sys, &q.matrix_meter(), gamma).unwrap();
        let nl = pps_deflection_nonlinear(gamma, &wv, &m).unwrap();
        assert!((oracle.deflection - nl.deflection).abs() < 1e-6);
    }

    #[test]
    fn distribution_is_consistent_and_unitary() {
        let sys = system(PovmElement::projector(&bloch_ket(2.0, -1.0)));
        let comp = system(PovmElement::projector(&bloch_ket(
            std::f64::consts::PI - 2.0,
            -1.0 + std::f64::consts::PI,
        )));
        let mm = QubitMeter::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 0.3, [0.5, 0.2, 0.6])
            .unwrap()
            .matrix_meter();
        let (p, d) = tensor_pointer_distribution(&sys, &mm, 0.8).unwrap();
        let avg = tensor_pps_average(&sys, &mm, 0.8).unwrap();
        assert_abs_diff_eq!(d.mean(), avg.r_s, epsilon = 1e-12);
        let (p2, _) = tensor_pointer_distribution(&comp, &mm, 0.8).unwrap();
        assert_abs_diff_eq!(p + p2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn oversized_product_is_rejected() {
        let sys = system(PovmElement::projector(&bloch_ket(2.0, -1.0)));
        let d = 2049;
        let f = CMatrix::from_diagonal(&crate::quantum_core::CVector::from_element(
            d,
            c64(1.0, 0.0),
        ));
        let mm =
            MatrixMeter::new(DensityMatrix::maximally_mixed(d).unwrap(), f.clone(), f).unwrap();
        assert!(matches!(
            tensor_pps_average(&sys, &mm, 0.1),
            Err(Error::DimensionOverflow(4098))
        ));
    }
}
