//! Weak values, weak probabilities and strong (ABL) conditional probabilities.
//!
//! Every conditional quantity divides by the post-selection probability
//! Tr(Eρ). When that probability is numerically zero the functions return
//! [`Error::VanishingPostSelection`] instead of a huge number.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::quantum_core::{
    c64, hermitian_eigen, trace_product, CMatrix, DensityMatrix, Ket, Observable, Operator,
    PovmElement, ProjectionValuedMeasure, C64,
};
use crate::tol::{EPS_HERM, EPS_OVERLAP_SCALE, EPS_REL};

/// Highest order accepted by [`generalized_weak_values`].
pub const MAX_ORDER: usize = 8;

/// Weak value A_w, associated weak value A_w^(1,1), optional higher orders.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValueReport {
    pub a_w: C64,
    pub a_w_11: f64,
    pub a_w_kl: Option<BTreeMap<(usize, usize), C64>>,
    /// Tr(Eρ), when known. Used to turn response denominators into probabilities.
    pub post_norm: Option<f64>,
}

impl WeakValueReport {
    /// Report for explicitly given A_w and A_w^(1,1).
    pub fn new(a_w: C64, a_w_11: f64) -> Result<Self> {
        if !a_w_11.is_finite() || a_w_11 < a_w.norm_sqr() * (1.0 - EPS_REL) - EPS_REL {
            return Err(Error::InvalidParameter(format!(
                "A_w^(1,1) = {a_w_11} is below |A_w|^2 = {}",
                a_w.norm_sqr()
            )));
        }
        Ok(Self {
            a_w,
            a_w_11,
            a_w_kl: None,
            post_norm: None,
        })
    }

    /// Pure pre-selection: A_w^(1,1) = |A_w|².
    pub fn pure(a_w: C64) -> Self {
        Self {
            a_w,
            a_w_11: a_w.norm_sqr(),
            a_w_kl: None,
            post_norm: None,
        }
    }

    /// Evaluates A_w, A_w^(1,1) and Tr(Eρ) from matrices.
    pub fn compute(a: &Observable, rho: &DensityMatrix, e: &PovmElement) -> Result<Self> {
        let norm = post_selection_probability(rho, e)?;
        let ea = e.matrix() * a.matrix();
        let a_w = trace_product(&ea, rho.matrix()) / norm;
        let aea = a.matrix() * &ea;
        let a_w_11 = trace_product(&aea, rho.matrix()).re / norm;
        Ok(Self {
            a_w,
            a_w_11,
            a_w_kl: None,
            post_norm: Some(norm),
        })
    }

    pub fn with_post_norm(mut self, p: f64) -> Self {
        self.post_norm = Some(p);
        self
    }

    /// A_w^(1,1) − |A_w|², zero for pure pre-selection.
    pub fn mixedness(&self) -> f64 {
        self.a_w_11 - self.a_w.norm_sqr()
    }
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Threshold below which Tr(Eρ) counts as zero: 1e-14·‖E‖_F·‖ρ‖_F.
pub fn overlap_threshold(rho: &DensityMatrix, e: &PovmElement) -> f64 {
    EPS_OVERLAP_SCALE * frobenius(e.matrix()) * frobenius(rho.matrix())
}

/// Tr(Eρ), rejecting values at or below the overlap threshold.
pub fn post_selection_probability(rho: &DensityMatrix, e: &PovmElement) -> Result<f64> {
    check_dims(rho.dim(), e.dim())?;
    let p = trace_product(e.matrix(), rho.matrix()).re;
    if p <= overlap_threshold(rho, e) {
        return Err(Error::VanishingPostSelection(p));
    }
    Ok(p)
}

/// Tr(EÂρ)/Tr(Eρ).
pub fn weak_value(a: &Observable, rho: &DensityMatrix, e: &PovmElement) -> Result<C64> {
    check_dims(rho.dim(), a.dim())?;
    let norm = post_selection_probability(rho, e)?;
    Ok(trace_product(&(e.matrix() * a.matrix()), rho.matrix()) / norm)
}

/// Tr(ÂEÂρ)/Tr(Eρ).
pub fn associated_weak_value(a: &Observable, rho: &DensityMatrix, e: &PovmElement) -> Result<f64> {
    check_dims(rho.dim(), a.dim())?;
    let norm = post_selection_probability(rho, e)?;
    let aea = a.matrix() * e.matrix() * a.matrix();
    Ok(trace_product(&aea, rho.matrix()).re / norm)
}

/// All A_w^(k,l) = Tr(Â^l E Â^k ρ)/Tr(Eρ) for 0 ≤ k, l ≤ max_order.
pub fn generalized_weak_values(
    a: &Observable,
    rho: &DensityMatrix,
    e: &PovmElement,
    max_order: usize,
) -> Result<BTreeMap<(usize, usize), C64>> {
    if max_order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "max_order {max_order} exceeds {MAX_ORDER}"
        )));
    }
    check_dims(rho.dim(), a.dim())?;
    let norm = post_selection_probability(rho, e)?;
    let d = a.dim();
    let mut powers = vec![CMatrix::identity(d, d)];
    for k in 1..=max_order {
        let next = &powers[k - 1] * a.matrix();
        powers.push(next);
    }
    let mut out = BTreeMap::new();
    for l in 0..=max_order {
        let left = &powers[l] * e.matrix();
        for (k, pk) in powers.iter().enumerate() {
            let m = &left * pk;
            out.insert((k, l), trace_product(&m, rho.matrix()) / norm);
        }
    }
    Ok(out)
}

/// Weak probabilities (Π_i)_w for each outcome of a projection-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakProbabilityTable {
    pub entries: Vec<(f64, C64)>,
}

impl WeakProbabilityTable {
    pub fn total(&self) -> C64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Σ a_i (Π_i)_w, which equals the weak value of Σ a_i Π_i.
    pub fn weighted_sum(&self) -> C64 {
        self.entries.iter().map(|&(a, w)| w * a).sum()
    }
}

/// (Π_i)_w = Tr(EΠ_iρ)/Tr(Eρ).
pub fn weak_probabilities(
    pvm: &ProjectionValuedMeasure,
    rho: &DensityMatrix,
    e: &PovmElement,
) -> Result<WeakProbabilityTable> {
    check_dims(rho.dim(), pvm.dim())?;
    let norm = post_selection_probability(rho, e)?;
    let entries = pvm
        .projectors()
        .iter()
        .zip(pvm.values())
        .map(|(p, &a)| (a, trace_product(&(e.matrix() * p), rho.matrix()) / norm))
        .collect();
    Ok(WeakProbabilityTable { entries })
}

/// P_{i|E} = Tr(EΠ_iρΠ_i)/Σ_j Tr(EΠ_jρΠ_j), returned as (a_i, probability).
pub fn abl_probabilities(
    pvm: &ProjectionValuedMeasure,
    rho: &DensityMatrix,
    e: &PovmElement,
) -> Result<Vec<(f64, f64)>> {
    check_dims(rho.dim(), pvm.dim())?;
    check_dims(rho.dim(), e.dim())?;
    let weights: Vec<f64> = pvm
        .projectors()
        .iter()
        .map(|p| trace_product(e.matrix(), &(p * rho.matrix() * p)).re)
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= overlap_threshold(rho, e) {
        return Err(Error::VanishingPostSelection(total));
    }
    Ok(pvm
        .values()
        .iter()
        .zip(weights)
        .map(|(&a, w)| (a, w / total))
        .collect())
}

/// |Σ_i P_i A_{w,i} − Tr(Âρ)| where the sum runs over post-selections onto an
/// orthonormal basis, P_i = ⟨b_i|ρ|b_i⟩ and A_{w,i} is the matching weak value.
/// Basis states with zero probability contribute nothing.
pub fn sum_rule_check(a: &Observable, rho: &DensityMatrix, basis: &[Ket]) -> Result<f64> {
    let d = rho.dim();
    check_dims(d, a.dim())?;
    if basis.len() != d {
        return Err(Error::NonOrthonormalBasis(1.0));
    }
    let mut worst = 0.0_f64;
    for (i, bi) in basis.iter().enumerate() {
        check_dims(d, bi.dim())?;
        for (j, bj) in basis.iter().enumerate() {
            let target = if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
            worst = worst.max((bi.inner(bj)? - target).norm());
        }
    }
    if worst > 1e-10 {
        return Err(Error::NonOrthonormalBasis(worst));
    }
    let mut sum = c64(0.0, 0.0);
    for b in basis {
        // P_i A_{w,i} = ⟨b|Âρ|b⟩; the probability cancels against the weak-value denominator.
        let e = PovmElement::projector(b);
        let p = trace_product(e.matrix(), rho.matrix()).re;
        if p <= overlap_threshold(rho, &e) {
            continue;
        }
        let a_w = trace_product(&(e.matrix() * a.matrix()), rho.matrix()) / p;
        sum += a_w * p;
    }
    let mean = trace_product(a.matrix(), rho.matrix());
    Ok((sum - mean).norm())
}

/// Swaps the roles of pre- and post-selection: ρ → E/Tr E and E → e₁ρ.
///
/// `e1` must satisfy 0 < e₁ ≤ 1/λ_max(ρ) so that e₁ρ is a valid POVM element.
/// Weak values of the returned pair are the complex conjugates of the originals.
pub fn time_reversed(
    rho: &DensityMatrix,
    e: &PovmElement,
    e1: f64,
) -> Result<(DensityMatrix, PovmElement)> {
    check_dims(rho.dim(), e.dim())?;
    let (values, _) = hermitian_eigen(rho.matrix())?;
    let lmax = values[0];
    if !(e1 > 0.0) || e1 * lmax > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "e1 = {e1} must lie in (0, 1/{lmax}]"
        )));
    }
    let tr = e.matrix().trace().re;
    if tr <= 0.0 {
        return Err(Error::VanishingPostSelection(tr));
    }
    let new_rho = DensityMatrix::new(e.matrix() * c64(1.0 / tr, 0.0))?;
    let new_e = PovmElement::new(rho.matrix() * c64(e1, 0.0))?;
    Ok((new_rho, new_e))
}

/// Matrix element ⟨φ|Â|ψ⟩.
pub fn transition_element(a: &Observable, psi: &Ket, phi: &Ket) -> Result<C64> {
    phi.matrix_element(a.matrix(), psi)
}

/// Whether two operators commute to within ε_herm (relative to their size).
pub fn commutes(a: &CMatrix, b: &CMatrix) -> bool {
    let c = a * b - b * a;
    let scale = 1.0 + crate::quantum_core::max_abs(a) * crate::quantum_core::max_abs(b);
    crate::quantum_core::max_abs(&c) <= EPS_HERM * scale * 10.0
}

/// Closed forms for a qubit with Â = σ·n_A.
pub mod qubit {
    use super::*;

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

    /// A_w and A_w^(1,1) for ρ = (I + P n_in·σ)/2 and Π = (I + n_f·σ)/2.
    ///
    /// ÂΠÂ is the projector onto the reflection of n_f about n_A, which gives
    /// A_w^(1,1) = [1 + P(2(n_A·n_f)(n_A·n_in) − n_f·n_in)]/(1 + P n_in·n_f).
    pub fn weak_values(
        n_a: [f64; 3],
        n_in: [f64; 3],
        p_in: f64,
        n_f: [f64; 3],
    ) -> Result<(C64, f64)> {
        if !(0.0..=1.0).contains(&p_in) {
            return Err(Error::PurityOutOfRange(p_in));
        }
        let den = 1.0 + p_in * dot(n_in, n_f);
        if den <= 2.0 * EPS_OVERLAP_SCALE {
            return Err(Error::VanishingPostSelection(den / 2.0));
        }
        let a_w = c64(
            dot(n_a, n_f) + p_in * dot(n_a, n_in),
            p_in * dot(n_a, cross(n_in, n_f)),
        ) / den;
        let reflected = 2.0 * dot(n_a, n_f) * dot(n_a, n_in) - dot(n_f, n_in);
        let a_w_11 = (1.0 + p_in * reflected) / den;
        Ok((a_w, a_w_11))
    }

    /// Â = σ_x, pre-selection along n(κ, ν) with purity P, post-selection |−z⟩:
    /// A_w = P sin κ e^{−iν}/(1 − P cos κ), A_w^(1,1) = (1 + P cos κ)/(1 − P cos κ).
    pub fn typical(kappa: f64, nu: f64, p_in: f64) -> Result<(C64, f64)> {
        if !(0.0..=1.0).contains(&p_in) {
            return Err(Error::PurityOutOfRange(p_in));
        }
        let den = 1.0 - p_in * kappa.cos();
        if den <= 2.0 * EPS_OVERLAP_SCALE {
            return Err(Error::VanishingPostSelection(den / 2.0));
        }
        let a_w = C64::from_polar(p_in * kappa.sin() / den, -nu);
        let a_w_11 = (1.0 + p_in * kappa.cos()) / den;
        Ok((a_w, a_w_11))
    }

    /// Pure-state special case cot(κ/2) e^{−iν}.
    pub fn typical_pure(kappa: f64, nu: f64) -> C64 {
        C64::from_polar(1.0 / (kappa / 2.0).tan(), -nu)
    }

    /// Leading small-angle, near-pure form of [`typical`]:
    /// A_w = 2κe^{−iν}/(κ² + 2(1−P)), A_w^(1,1) = 4/(κ² + 2(1−P)).
    pub fn small_angle(kappa: f64, nu: f64, p_in: f64) -> Result<(C64, f64)> {
        if !(0.0..=1.0).contains(&p_in) {
            return Err(Error::PurityOutOfRange(p_in));
        }
        let den = kappa * kappa + 2.0 * (1.0 - p_in);
        if den <= 0.0 {
            return Err(Error::VanishingPostSelection(den));
        }
        Ok((C64::from_polar(2.0 * kappa / den, -nu), 4.0 / den))
    }

    /// Peak of |A_w| in the small-angle form: (κ, |A_w|) = (√(2(1−P)), 1/√(2(1−P))).
    pub fn small_angle_peak(p_in: f64) -> Result<(f64, f64)> {
        if !(0.0..1.0).contains(&p_in) {
            return Err(Error::PurityOutOfRange(p_in));
        }
        let w = (2.0 * (1.0 - p_in)).sqrt();
        Ok((w, 1.0 / w))
    }

    /// Peak of |A_w| in [`typical`]: at cos κ = P, |A_w| = P/√(1−P²).
    pub fn typical_peak(p_in: f64) -> Result<(f64, f64)> {
        if !(0.0..1.0).contains(&p_in) {
            return Err(Error::PurityOutOfRange(p_in));
        }
        Ok((p_in.acos(), p_in / (1.0 - p_in * p_in).sqrt()))
    }

    /// Largest impurity 1 − P compatible with a target |A_w| ≫ 1: 1/(2|A_w|²).
    pub fn max_impurity(target_magnitude: f64) -> f64 {
        1.0 / (2.0 * target_magnitude * target_magnitude)
    }
}
