//! Exact evolution of a continuous meter sampled on a momentum grid.
//!
//! The coupled variable is F = p, so each eigencomponent |a_j⟩ of Â picks up
//! the phase e^{−iγa_j p}. Position readouts go through an FFT.

use super::PpsSystem;
use crate::error::{Error, Result};
use crate::meters::GaussianMeter;
use crate::pps::{DistributionKind, MeasurementOutcome, PointerDistribution};
use crate::quantum_core::{c64, CMatrix, Operator, C64};
use crate::tol::{EPS_DEN, EPS_DIST, EPS_TAIL};
use rustfft::{FftDirection, FftPlanner};
use std::f64::consts::PI;

pub const DEFAULT_GRID_SIZE: usize = 4096;
pub const DEFAULT_SPAN: f64 = 10.0;

/// Fraction of the grid at each end treated as the tail.
const TAIL_FRACTION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// The coupled variable itself.
    P,
    /// Its conjugate.
    Q,
}

/// Pure meter state ψ(p) on the points p_min + j·dp, j < grid_size, dp = (p_max − p_min)/grid_size.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeterState {
    pub grid_size: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub amplitudes: Vec<C64>,
}

impl GridMeterState {
    pub fn from_fn(
        grid_size: usize,
        p_min: f64,
        p_max: f64,
        psi: impl Fn(f64) -> C64,
    ) -> Result<Self> {
        if grid_size < 16 || !grid_size.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size {grid_size} must be a power of two ≥ 16"
            )));
        }
        if !(p_max > p_min) {
            return Err(Error::InvalidParameter("empty momentum range".into()));
        }
        let dp = (p_max - p_min) / grid_size as f64;
        let mut amplitudes: Vec<C64> = (0..grid_size).map(|j| psi(p_min + j as f64 * dp)).collect();
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dp;
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::UnnormalizableProfile);
        }
        let s = norm.sqrt();
        amplitudes.iter_mut().for_each(|a| *a /= s);
        Ok(Self {
            grid_size,
            p_min,
            p_max,
            amplitudes,
        })
    }

    /// Default grid: 4096 points over p̄ ± 10Δp.
    pub fn from_gaussian(m: &GaussianMeter) -> Result<Self> {
        Self::from_gaussian_with(m, DEFAULT_GRID_SIZE, DEFAULT_SPAN)
    }

    pub fn from_gaussian_with(m: &GaussianMeter, grid_size: usize, span: f64) -> Result<Self> {
        let half = span * m.delta_p;
        Self::from_fn(grid_size, m.p_bar - half, m.p_bar + half, |p| m.psi_p(p))
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.grid_size as f64
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    /// Spacing of the conjugate grid, 2π/(grid span).
    pub fn dq(&self) -> f64 {
        2.0 * PI / (self.p_max - self.p_min)
    }

    /// q_k = (k − N/2)·dq.
    pub fn q(&self, k: usize) -> f64 {
        (k as f64 - (self.grid_size / 2) as f64) * self.dq()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dp()
    }

    /// ⟨p⟩ and ⟨q⟩ of the initial state.
    pub fn mean(&self, readout: Readout) -> Result<f64> {
        let comps = [self.amplitudes.clone()];
        let comps = match readout {
            Readout::P => comps.to_vec(),
            Readout::Q => to_position(self, &comps)?,
        };
        let (w, x) = grid_weights(self, readout);
        let mean: f64 = comps[0]
            .iter()
            .enumerate()
            .map(|(i, a)| x(i) * a.norm_sqr())
            .sum::<f64>()
            * w;
        Ok(mean)
    }

    fn tail_mass(values: &[C64], dx: f64) -> f64 {
        let n = values.len();
        let edge = n / TAIL_FRACTION;
        values[..edge]
            .iter()
            .chain(&values[n - edge..])
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            * dx
    }
}

fn grid_weights(meter: &GridMeterState, readout: Readout) -> (f64, Box<dyn Fn(usize) -> f64 + '_>) {
    match readout {
        Readout::P => (meter.dp(), Box::new(move |j| meter.p(j))),
        Readout::Q => (meter.dq(), Box::new(move |k| meter.q(k))),
    }
}

/// ψ(q_k) = dp/√(2π) Σ_j e^{i p_j q_k} ψ(p_j), up to a k-dependent phase shared by all components.
fn to_position(meter: &GridMeterState, comps: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    let n = meter.grid_size;
    let fft = FftPlanner::<f64>::new().plan_fft(n, FftDirection::Inverse);
    let scale = meter.dp() / (2.0 * PI).sqrt();
    let mut out = Vec::with_capacity(comps.len());
    for c in comps {
        let mut buf: Vec<C64> = c
            .iter()
            .enumerate()
            .map(|(j, a)| if j % 2 == 0 { *a * scale } else { -*a * scale })
            .collect();
        fft.process(&mut buf);
        let tail = GridMeterState::tail_mass(&buf, meter.dq());
        if tail > EPS_TAIL {
            return Err(Error::GridTooCoarse(tail));
        }
        out.push(buf);
    }
    Ok(out)
}

/// Eigencomponents e^{−iγa_j p}ψ(p) and the system matrices in the eigenbasis of Â.
struct Evolved {
    comps: Vec<Vec<C64>>,
    rho: CMatrix,
    e: CMatrix,
}

fn evolve(
    sys: &PpsSystem,
    meter: &GridMeterState,
    gamma: f64,
    readout: Readout,
) -> Result<Evolved> {
    let tail = GridMeterState::tail_mass(&meter.amplitudes, meter.dp());
    if tail > EPS_TAIL {
        return Err(Error::GridTooCoarse(tail));
    }
    if (meter.norm() - 1.0).abs() > EPS_DIST {
        return Err(Error::UnnormalizableProfile);
    }
    let (values, v) = sys.a.eigen()?;
    let rho = v.adjoint() * sys.rho.matrix() * &v;
    let e = v.adjoint() * sys.e.matrix() * &v;
    let comps: Vec<Vec<C64>> = values
        .iter()
        .map(|&a| {
            meter
                .amplitudes
                .iter()
                .enumerate()
                .map(|(j, psi)| psi * C64::from_polar(1.0, -gamma * a * meter.p(j)))
                .collect()
        })
        .collect();
    let comps = match readout {
        Readout::P => comps,
        Readout::Q => to_position(meter, &comps)?,
    };
    Ok(Evolved { comps, rho, e })
}

impl Evolved {
    /// Σ_jk ρ′_jk E′_kj χ_k*(x)χ_j(x) at grid index i.
    fn density(&self, i: usize) -> f64 {
        let d = self.comps.len();
        let mut acc = c64(0.0, 0.0);
        for j in 0..d {
            for k in 0..d {
                let w = self.rho[(j, k)] * self.e[(k, j)];
                if w != c64(0.0, 0.0) {
                    acc += w * self.comps[k][i].conj() * self.comps[j][i];
                }
            }
        }
        acc.re
    }
}

/// Conditional average of the readout for a gridded meter, exact up to grid resolution.
pub fn grid_pps_average(
    sys: &PpsSystem,
    meter: &GridMeterState,
    gamma: f64,
    readout: Readout,
) -> Result<MeasurementOutcome> {
    let ev = evolve(sys, meter, gamma, readout)?;
    let (w, x) = grid_weights(meter, readout);
    let mut prob = 0.0;
    let mut num = 0.0;
    for i in 0..meter.grid_size {
        let dens = ev.density(i);
        prob += dens;
        num += x(i) * dens;
    }
    prob *= w;
    num *= w;
    if prob <= EPS_DEN {
        return Err(Error::VanishingPostSelection(prob));
    }
    let r_s = num / prob;
    Ok(MeasurementOutcome {
        r_s,
        deflection: r_s - meter.mean(readout)?,
        post_prob: Some(prob),
        regime: None,
        low_signal: false,
    })
}

/// Post-selection probability and the conditional readout density on the grid.
pub fn grid_pointer_distribution(
    sys: &PpsSystem,
    meter: &GridMeterState,
    gamma: f64,
    readout: Readout,
) -> Result<(f64, PointerDistribution)> {
    let ev = evolve(sys, meter, gamma, readout)?;
    let (w, x) = grid_weights(meter, readout);
    let points: Vec<(f64, f64)> = (0..meter.grid_size)
        .map(|i| (x(i), ev.density(i).max(0.0)))
        .collect();
    let prob = points.iter().map(|p| p.1).sum::<f64>() * w;
    if prob <= EPS_DEN {
        return Err(Error::VanishingPostSelection(prob));
    }
    Ok((
        prob,
        PointerDistribution::from_weights(points, DistributionKind::Continuous)?,
    ))
}
