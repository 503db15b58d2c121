//! Finite-dimensional states, operators and the linear algebra behind them.
//!
//! All types validate on construction and are immutable afterwards.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::{EPS_HERM, EPS_NORM, EPS_PSD};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Shorthand for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Anything that exposes a square complex matrix.
pub trait Operator {
    fn matrix(&self) -> &CMatrix;

    fn dim(&self) -> usize {
        self.matrix().nrows()
    }
}

impl Operator for CMatrix {
    fn matrix(&self) -> &CMatrix {
        self
    }
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() < 2 {
        return Err(Error::DimensionTooSmall(m.nrows()));
    }
    Ok(())
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Largest entry of |M − M†|.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// (M + M†)/2, used to strip rounding noise after products of Hermitian matrices.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)],
    )
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
    )
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)],
    )
}

/// σ·n for a real 3-vector n.
pub fn sigma_dot(n: [f64; 3]) -> CMatrix {
    pauli_x() * c64(n[0], 0.0) + pauli_y() * c64(n[1], 0.0) + pauli_z() * c64(n[2], 0.0)
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
///
/// Ties keep the order in which the solver returned them, so the result is
/// deterministic for a fixed input. Columns of the returned matrix are the
/// matching orthonormal eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_square(m)?;
    let dev = hermiticity_error(m);
    if dev > EPS_HERM * (1.0 + max_abs(m)) {
        return Err(Error::NotHermitian(dev));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

/// f(M) for Hermitian M, computed through the eigendecomposition.
pub fn hermitian_function<F: Fn(f64) -> C64>(m: &CMatrix, f: F) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m)?;
    let n = values.len();
    let diag = CVector::from_iterator(n, values.iter().map(|&v| f(v)));
    let scaled = CMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * diag[j]);
    Ok(scaled * vectors.adjoint())
}

/// exp(−i·scale·G) for Hermitian G.
pub fn hermitian_expm(generator: &CMatrix, scale: f64) -> Result<CMatrix> {
    hermitian_function(generator, |a| C64::from_polar(1.0, -scale * a))
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: CVector,
}

impl Ket {
    /// Builds a ket from amplitudes that must already be normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::DimensionTooSmall(amps.len()));
        }
        let v = CVector::from_vec(amps);
        let dev = (v.norm_squared() - 1.0).abs();
        if dev > EPS_NORM {
            return Err(Error::NotNormalized(dev));
        }
        Ok(Self { amps: v })
    }

    /// Builds a ket by normalizing the given amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::DimensionTooSmall(amps.len()));
        }
        let v = CVector::from_vec(amps);
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(1.0));
        }
        Ok(Self {
            amps: v / c64(n, 0.0),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&a| c64(a, 0.0)).collect())
    }

    /// Computational basis vector |i⟩ in dimension d.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::InvalidParameter(format!(
                "basis index {i} out of range for d = {d}"
            )));
        }
        let mut amps = vec![c64(0.0, 0.0); d];
        amps[i] = c64(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// ⟨self|op|other⟩.
    pub fn matrix_element(&self, op: &CMatrix, other: &Ket) -> Result<C64> {
        check_same_dim(self.dim(), op.nrows())?;
        check_same_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&(op * &other.amps)))
    }

    /// |self⟩⟨self|.
    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }
}

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let dev = hermiticity_error(&m);
        if dev > EPS_HERM {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        let dev = (tr - c64(1.0, 0.0)).norm();
        if dev > EPS_NORM {
            return Err(Error::NotNormalized(dev));
        }
        let (values, _) = hermitian_eigen(&m)?;
        let min = values.last().copied().unwrap_or(0.0);
        if min < -EPS_PSD {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            m: hermitian_part(&m),
        })
    }

    pub fn from_ket(psi: &Ket) -> Self {
        Self { m: psi.projector() }
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        Ok(Self {
            m: identity(d) * c64(1.0 / d as f64, 0.0),
        })
    }

    /// Σ w_i |ψ_i⟩⟨ψ_i| with weights normalized to unit sum.
    pub fn mixture(weights: &[f64], kets: &[Ket]) -> Result<Self> {
        if weights.len() != kets.len() || kets.is_empty() {
            return Err(Error::InvalidParameter(
                "weights and kets must have equal nonzero length".into(),
            ));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter("negative mixture weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter(
                "mixture weights sum to zero".into(),
            ));
        }
        let d = kets[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, k) in weights.iter().zip(kets) {
            check_same_dim(d, k.dim())?;
            m += k.projector() * c64(w / total, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).map(|(v, _)| v).unwrap_or_default()
    }

    /// U ρ U†; the result is re-validated.
    pub fn transformed(&self, u: &CMatrix) -> Result<Self> {
        check_same_dim(self.dim(), u.nrows())?;
        Self::new(hermitian_part(&(u * &self.m * u.adjoint())))
    }
}

impl Operator for DensityMatrix {
    fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

/// Hermitian observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    m: CMatrix,
}

impl Observable {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let dev = hermiticity_error(&m);
        if dev > EPS_HERM * (1.0 + max_abs(&m)) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            m: hermitian_part(&m),
        })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        Self::new(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c64(values[i], 0.0)
            } else {
                c64(0.0, 0.0)
            }
        }))
    }

    /// σ·n.
    pub fn sigma(n: [f64; 3]) -> Self {
        Self { m: sigma_dot(n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Eigenvalues (descending) and eigenvectors.
    pub fn eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        hermitian_eigen(&self.m)
    }

    /// The observable scaled by a real factor.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            m: &self.m * c64(s, 0.0),
        }
    }
}

impl Operator for Observable {
    fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

/// POVM element: Hermitian with spectrum in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    m: CMatrix,
}

impl PovmElement {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let dev = hermiticity_error(&m);
        if dev > EPS_HERM {
            return Err(Error::NotHermitian(dev));
        }
        let (values, _) = hermitian_eigen(&m)?;
        for &v in &values {
            if !(-EPS_PSD..=1.0 + EPS_PSD).contains(&v) {
                return Err(Error::InvalidPovmElement(v));
            }
        }
        Ok(Self {
            m: hermitian_part(&m),
        })
    }

    /// Rank-one projector |φ⟩⟨φ|.
    pub fn projector(phi: &Ket) -> Self {
        Self { m: phi.projector() }
    }

    /// c·I with 0 ≤ c ≤ 1 (an uninformative post-selection).
    pub fn scaled_identity(d: usize, c: f64) -> Result<Self> {
        Self::new(identity(d) * c64(c, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }
}

impl Operator for PovmElement {
    fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

/// Projection-valued measure {Π_i} with distinct outcome values a_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionValuedMeasure {
    projectors: Vec<CMatrix>,
    values: Vec<f64>,
}

impl ProjectionValuedMeasure {
    pub fn new(projectors: Vec<CMatrix>, values: Vec<f64>) -> Result<Self> {
        if projectors.is_empty() || projectors.len() != values.len() {
            return Err(Error::InvalidPvm("need one value per projector".into()));
        }
        let d = projectors[0].nrows();
        let mut sum = CMatrix::zeros(d, d);
        for (i, p) in projectors.iter().enumerate() {
            check_square(p)?;
            check_same_dim(d, p.nrows())?;
            for (j, q) in projectors.iter().enumerate() {
                let prod = p * q;
                let target = if i == j {
                    p.clone()
                } else {
                    CMatrix::zeros(d, d)
                };
                let dev = max_abs(&(prod - target));
                if dev > EPS_HERM.max(1e-12) * 10.0 {
                    return Err(Error::InvalidPvm(format!(
                        "projectors {i},{j} violate orthogonality by {dev:e}"
                    )));
                }
            }
            sum += p;
        }
        let dev = max_abs(&(sum - identity(d)));
        if dev > EPS_NORM * 10.0 {
            return Err(Error::InvalidPvm(format!(
                "projectors do not resolve identity ({dev:e})"
            )));
        }
        for i in 0..values.len() {
            for j in 0..i {
                if values[i] == values[j] {
                    return Err(Error::InvalidPvm(format!(
                        "repeated outcome value {}",
                        values[i]
                    )));
                }
            }
        }
        Ok(Self { projectors, values })
    }

    /// Spectral measure of an observable; eigenvalues closer than `tol` are merged.
    pub fn from_observable(a: &Observable, tol: f64) -> Result<Self> {
        let (values, vectors) = a.eigen()?;
        let d = values.len();
        let mut projectors: Vec<CMatrix> = Vec::new();
        let mut outcomes: Vec<f64> = Vec::new();
        let mut k = 0;
        while k < d {
            let mut p = CMatrix::zeros(d, d);
            let mut acc = 0.0;
            let start = k;
            while k < d && (values[k] - values[start]).abs() <= tol {
                let col = vectors.column(k);
                p += col * col.adjoint();
                acc += values[k];
                k += 1;
            }
            projectors.push(p);
            outcomes.push(acc / (k - start) as f64);
        }
        Self::new(projectors, outcomes)
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    /// Σ a_i Π_i.
    pub fn observable(&self) -> Observable {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (p, &a) in self.projectors.iter().zip(&self.values) {
            m += p * c64(a, 0.0);
        }
        Observable {
            m: hermitian_part(&m),
        }
    }
}

/// Tr(op·ρ).
pub fn expectation<O: Operator + ?Sized>(op: &O, state: &DensityMatrix) -> Result<C64> {
    check_same_dim(state.dim(), op.dim())?;
    Ok(trace_product(op.matrix(), state.matrix()))
}

/// Tr(A·B) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = c64(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Unit Bloch vector (sin κ cos ν, sin κ sin ν, cos κ).
pub fn bloch_vector(kappa: f64, nu: f64) -> [f64; 3] {
    [kappa.sin() * nu.cos(), kappa.sin() * nu.sin(), kappa.cos()]
}

/// cos(κ/2)|z⟩ + e^{iν} sin(κ/2)|−z⟩.
pub fn bloch_ket(kappa: f64, nu: f64) -> Ket {
    let a = c64((kappa / 2.0).cos(), 0.0);
    let b = C64::from_polar((kappa / 2.0).sin(), nu);
    Ket {
        amps: CVector::from_vec(vec![a, b]),
    }
}

/// (I + s·σ)/2 for a Bloch vector with |s| ≤ 1.
pub fn qubit_state(s: [f64; 3]) -> Result<DensityMatrix> {
    let len = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    if len > 1.0 + EPS_NORM {
        return Err(Error::PurityOutOfRange(len));
    }
    Ok(DensityMatrix {
        m: (identity(2) + sigma_dot(s)) * c64(0.5, 0.0),
    })
}

/// (I + P_in σ·n(κ, ν))/2.
pub fn bloch_state(kappa: f64, nu: f64, p_in: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p_in) {
        return Err(Error::PurityOutOfRange(p_in));
    }
    let n = bloch_vector(kappa, nu);
    qubit_state([p_in * n[0], p_in * n[1], p_in * n[2]])
}
