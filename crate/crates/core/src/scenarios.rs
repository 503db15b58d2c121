//! Parameter sweeps over qubit systems measured by pluggable meters, and the
//! built-in presets.
//!
//! Systems are either explicit matrices or a qubit with observable σ·n_A,
//! preselection |n(κ, ν)⟩ (optionally depolarized to purity P_in) and
//! post-selection |n(κ_f, ν_f)⟩.

use crate::error::{Error, Result};
use crate::meters::{
    moments_coinciding, moments_gaussian, moments_qubit, trig_moments_gaussian, trig_moments_qubit,
    GaussianMeter, MeterMoments, Pointer, QubitMeter, TrigMoments,
};
use crate::metrology::{
    classify_regime, interferometer_scenario, is_resonant, InterferometerReport,
};
use crate::oracle::{
    grid_pps_average, mc_sample_partitioned, tensor_pps_average, GridMeterState, McMeter,
    PpsSystem, Readout,
};
use crate::pps::{
    exact_pps, mu_w, pps_deflection_inverted, pps_deflection_linear, pps_deflection_nonlinear,
    pps_deflection_resonance, resonance_parameters, Regime,
};
use crate::quantum_core::{
    bloch_ket, bloch_state, c64, DensityMatrix, Ket, Observable, PovmElement,
    ProjectionValuedMeasure,
};
use crate::weak_values::{
    abl_probabilities, transition_element, weak_probabilities, WeakValueReport,
};
use std::f64::consts::PI;

/// Qubit system of the sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSystemSpec {
    pub kappa: f64,
    pub nu: f64,
    pub p_in: f64,
    pub a_axis: [f64; 3],
    pub post_kappa: f64,
    pub post_nu: f64,
}

impl QubitSystemSpec {
    /// σ_x measured between |n(κ, ν)⟩ and |−z⟩, so that A_w = cot(κ/2)e^{−iν} for P_in = 1.
    pub fn standard(kappa: f64, nu: f64, p_in: f64) -> Self {
        Self {
            kappa,
            nu,
            p_in,
            a_axis: [1.0, 0.0, 0.0],
            post_kappa: PI,
            post_nu: 0.0,
        }
    }

    /// Standard system with the pure-state weak value |A_w|e^{iθ}.
    pub fn from_weak_value(magnitude: f64, theta: f64, p_in: f64) -> Self {
        Self::standard(2.0 * (1.0 / magnitude).atan(), -theta, p_in)
    }

    pub fn build(&self) -> Result<PpsSystem> {
        let rho = bloch_state(self.kappa, self.nu, self.p_in)?;
        let norm = self.a_axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter(
                "observable axis must be nonzero".into(),
            ));
        }
        let a = Observable::sigma(self.a_axis.map(|x| x / norm));
        let e = PovmElement::projector(&bloch_ket(self.post_kappa, self.post_nu));
        PpsSystem::new(rho, a, e)
    }

    /// ⟨φ|ψ⟩ and ⟨φ|Â|ψ⟩ for the pure preselection |n(κ, ν)⟩.
    pub fn transition(&self) -> Result<(f64, f64)> {
        let psi = bloch_ket(self.kappa, self.nu);
        let phi = bloch_ket(self.post_kappa, self.post_nu);
        let sys = self.build()?;
        Ok((
            phi.inner(&psi)?.norm(),
            transition_element(&sys.a, &psi, &phi)?.norm(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Qubit(QubitSystemSpec),
    Matrix(PpsSystem),
}

impl SystemSpec {
    pub fn build(&self) -> Result<PpsSystem> {
        match self {
            SystemSpec::Qubit(q) => q.build(),
            SystemSpec::Matrix(sys) => Ok(sys.clone()),
        }
    }

    /// |⟨φ|ψ⟩| and |⟨φ|Â|ψ⟩|, defined for a pure qubit preselection.
    pub fn transition(&self) -> Option<(f64, f64)> {
        match self {
            SystemSpec::Qubit(q) if q.p_in == 1.0 => q.transition().ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeterSpec {
    Gaussian(GaussianMeter),
    Qubit(QubitMeter),
    /// R = F with the given mean, spread and third central moment; formulas only.
    Coinciding {
        f_bar: f64,
        delta_f: f64,
        fc3: f64,
    },
}

impl MeterSpec {
    pub fn moments(&self) -> Result<MeterMoments> {
        match self {
            MeterSpec::Gaussian(g) => moments_gaussian(g),
            MeterSpec::Qubit(q) => moments_qubit(q),
            MeterSpec::Coinciding {
                f_bar,
                delta_f,
                fc3,
            } => moments_coinciding(*f_bar, *delta_f, *fc3),
        }
    }

    pub fn trig_moments(&self, gamma: f64) -> Result<TrigMoments> {
        match self {
            MeterSpec::Gaussian(g) => Ok(trig_moments_gaussian(g, gamma)),
            MeterSpec::Qubit(q) => Ok(trig_moments_qubit(q, gamma)),
            MeterSpec::Coinciding { .. } => Err(Error::UnsupportedMeter(
                "no exact solution for a moments-only meter".into(),
            )),
        }
    }

    /// Replaces the mean of the coupled variable, where the meter has one.
    pub fn with_f_bar(&self, f_bar: f64) -> Result<Self> {
        match *self {
            MeterSpec::Gaussian(g) => Ok(MeterSpec::Gaussian(GaussianMeter::new(
                f_bar, g.q_bar, g.delta_p, g.b, g.pointer,
            )?)),
            MeterSpec::Coinciding { delta_f, fc3, .. } => Ok(MeterSpec::Coinciding {
                f_bar,
                delta_f,
                fc3,
            }),
            MeterSpec::Qubit(_) => Err(Error::UnsupportedMeter(
                "two-level meter mean is set by its state".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Linear,
    Nonlinear,
    Inverted,
    Resonance,
    Exact,
    Oracle,
    Mc,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Linear,
        Method::Nonlinear,
        Method::Inverted,
        Method::Resonance,
        Method::Exact,
        Method::Oracle,
        Method::Mc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Nonlinear => "nonlinear",
            Method::Inverted => "inverted",
            Method::Resonance => "resonance",
            Method::Exact => "exact",
            Method::Oracle => "oracle",
            Method::Mc => "mc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Gamma,
    /// Phase θ of the weak value; sets ν = −θ.
    Theta,
    Kappa,
    /// Mean of the coupled meter variable.
    FBar,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Gamma => "gamma",
            SweepParameter::Theta => "theta",
            SweepParameter::Kappa => "kappa",
            SweepParameter::FBar => "f_bar",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            SweepParameter::Gamma,
            SweepParameter::Theta,
            SweepParameter::Kappa,
            SweepParameter::FBar,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown sweep parameter {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn value(&self, i: usize) -> f64 {
        self.start + (self.end - self.start) * i as f64 / (self.steps - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub system: SystemSpec,
    pub gamma: f64,
    pub meters: Vec<(String, MeterSpec)>,
    pub sweep: Sweep,
    pub methods: Vec<Method>,
    /// Trials per point for the Monte Carlo column.
    pub mc_trials: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.sweep.start.is_finite() && self.sweep.end.is_finite()) {
            return Err(Error::InvalidParameter("sweep range must be finite".into()));
        }
        if self.sweep.steps < 2 {
            return Err(Error::InvalidParameter(
                "a sweep needs at least 2 steps".into(),
            ));
        }
        if self.meters.is_empty() {
            return Err(Error::InvalidParameter("no meters".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods".into()));
        }
        if self.methods.contains(&Method::Mc) && self.mc_trials == 0 {
            return Err(Error::InvalidParameter(
                "Monte Carlo needs a positive trial count".into(),
            ));
        }
        let qubit_only = matches!(
            self.sweep.parameter,
            SweepParameter::Theta | SweepParameter::Kappa
        );
        if qubit_only && !matches!(self.system, SystemSpec::Qubit(_)) {
            return Err(Error::InvalidParameter(format!(
                "sweeping {} needs a qubit system",
                self.sweep.parameter.name()
            )));
        }
        if self.sweep.parameter == SweepParameter::FBar {
            for (_, m) in &self.meters {
                m.with_f_bar(0.0)?;
            }
        }
        self.system.build()?;
        Ok(())
    }

    /// Sweep value, system and coupling at sweep index `i`.
    pub fn point(&self, i: usize) -> (f64, SystemSpec, f64) {
        let x = self.sweep.value(i);
        let mut system = self.system.clone();
        let mut gamma = self.gamma;
        match (self.sweep.parameter, &mut system) {
            (SweepParameter::Gamma, _) => gamma = x,
            (SweepParameter::Theta, SystemSpec::Qubit(q)) => q.nu = -x,
            (SweepParameter::Kappa, SystemSpec::Qubit(q)) => q.kappa = x,
            _ => {}
        }
        (x, system, gamma)
    }

    /// `spec` with the sweep value applied, for F̄ sweeps.
    pub fn meter_at(&self, spec: &MeterSpec, x: f64) -> Result<MeterSpec> {
        if self.sweep.parameter == SweepParameter::FBar {
            spec.with_f_bar(x)
        } else {
            Ok(*spec)
        }
    }

    /// Number of table rows.
    pub fn rows(&self) -> usize {
        self.sweep.steps * self.meters.len()
    }
}

/// One (sweep point, meter) row: one deflection per method, None where it failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub index: usize,
    pub sweep_value: f64,
    pub meter: String,
    pub regime: Option<&'static str>,
    pub values: Vec<Option<f64>>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub parameter: SweepParameter,
    pub methods: Vec<Method>,
    pub rows: Vec<Row>,
}

fn mc_seed(seed: u64, index: usize) -> u64 {
    // SplitMix64 step to decorrelate neighbouring rows.
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn method_value(
    method: Method,
    gamma: f64,
    sys: &PpsSystem,
    wv: &WeakValueReport,
    meter: &MeterSpec,
    m: &MeterMoments,
    seed: u64,
    trials: u64,
) -> Result<f64> {
    match method {
        Method::Linear => Ok(pps_deflection_linear(gamma, wv.a_w, m)),
        Method::Nonlinear => Ok(pps_deflection_nonlinear(gamma, wv, m)?.deflection),
        Method::Inverted => {
            let (r_inf, adjusted) = pps_deflection_inverted(gamma, wv, m)?;
            Ok(r_inf - m.r_bar + adjusted)
        }
        Method::Resonance => {
            let p = resonance_parameters(gamma, wv, m)?;
            pps_deflection_resonance(p.x, p.epsilon, p.v, m)
        }
        Method::Exact => Ok(exact_pps(gamma, wv, &meter.trig_moments(gamma)?)?.deflection),
        Method::Oracle => match meter {
            MeterSpec::Gaussian(g) => {
                let grid = GridMeterState::from_gaussian(g)?;
                Ok(grid_pps_average(sys, &grid, gamma, readout(g))?.deflection)
            }
            MeterSpec::Qubit(q) => {
                Ok(tensor_pps_average(sys, &q.matrix_meter(), gamma)?.deflection)
            }
            MeterSpec::Coinciding { .. } => Err(Error::UnsupportedMeter(
                "no state for a moments-only meter".into(),
            )),
        },
        Method::Mc => {
            let stats = match meter {
                MeterSpec::Gaussian(g) => {
                    let grid = GridMeterState::from_gaussian(g)?;
                    mc_sample_partitioned(
                        sys,
                        McMeter::Grid(&grid, readout(g)),
                        gamma,
                        trials,
                        seed,
                        1,
                    )?
                }
                MeterSpec::Qubit(q) => mc_sample_partitioned(
                    sys,
                    McMeter::Matrix(&q.matrix_meter()),
                    gamma,
                    trials,
                    seed,
                    1,
                )?,
                MeterSpec::Coinciding { .. } => {
                    return Err(Error::UnsupportedMeter(
                        "no state for a moments-only meter".into(),
                    ))
                }
            };
            Ok(stats.mean - m.r_bar)
        }
    }
}

fn readout(g: &GaussianMeter) -> Readout {
    match g.pointer {
        Pointer::Momentum => Readout::P,
        Pointer::Position => Readout::Q,
    }
}

/// Evaluates all meters at sweep index `i`. Failures land in the row's error list.
pub fn evaluate_point(sc: &Scenario, i: usize, seed: u64) -> Vec<Row> {
    let (x, system, gamma) = sc.point(i);
    sc.meters
        .iter()
        .enumerate()
        .map(|(k, (label, spec))| {
            let index = i * sc.meters.len() + k;
            let mut row = Row {
                index,
                sweep_value: x,
                meter: label.clone(),
                regime: None,
                values: vec![None; sc.methods.len()],
                errors: Vec::new(),
            };
            let setup = (|| -> Result<(PpsSystem, WeakValueReport, MeterSpec, MeterMoments)> {
                let spec = sc.meter_at(spec, x)?;
                let sys = system.build()?;
                let wv = WeakValueReport::compute(&sys.a, &sys.rho, &sys.e)?;
                let m = spec.moments()?;
                Ok((sys, wv, spec, m))
            })();
            let (sys, wv, spec, m) = match setup {
                Ok(s) => s,
                Err(e) => {
                    row.errors.push(e.to_string());
                    return row;
                }
            };
            row.regime = Some(match system.transition() {
                Some((_, a_phipsi)) => classify_regime(gamma, c64(a_phipsi, 0.0), wv.a_w, &m)
                    .regime
                    .name(),
                None if is_resonant(gamma, wv.a_w, &m) => Regime::Resonance.name(),
                None => Regime::from_mu_w(mu_w(gamma, wv.a_w, &m)).name(),
            });
            for (j, method) in sc.methods.iter().enumerate() {
                match method_value(
                    *method,
                    gamma,
                    &sys,
                    &wv,
                    &spec,
                    &m,
                    mc_seed(seed, index),
                    sc.mc_trials,
                ) {
                    Ok(v) => row.values[j] = Some(v),
                    Err(e) => row.errors.push(format!("{}: {e}", method.name())),
                }
            }
            row
        })
        .collect()
}

/// Runs the whole sweep sequentially; rows are ordered by sweep index, then meter.
pub fn run_scenario(sc: &Scenario, seed: u64) -> Result<Table> {
    sc.validate()?;
    let rows = (0..sc.sweep.steps)
        .flat_map(|i| evaluate_point(sc, i, seed))
        .collect();
    Ok(Table {
        parameter: sc.sweep.parameter,
        methods: sc.methods.clone(),
        rows,
    })
}

fn gaussian(p_bar: f64, b: f64, pointer: Pointer) -> MeterSpec {
    MeterSpec::Gaussian(
        GaussianMeter::new(p_bar, 0.0, 1.0, b, pointer).expect("valid preset meter"),
    )
}

/// The four continuous-meter families: R = p with p̄ ∈ {0, 1}, R = q with p̄ = b ∈ {0, 1}.
pub fn standard_families() -> Vec<(String, MeterSpec)> {
    vec![
        ("R=p,pbar=0".into(), gaussian(0.0, 0.0, Pointer::Momentum)),
        ("R=p,pbar=1".into(), gaussian(1.0, 0.0, Pointer::Momentum)),
        (
            "R=q,pbar=0,b=0".into(),
            gaussian(0.0, 0.0, Pointer::Position),
        ),
        (
            "R=q,pbar=1,b=1".into(),
            gaussian(1.0, 1.0, Pointer::Position),
        ),
    ]
}

/// Meters with a large mean of the coupled variable.
pub fn resonance_families(p_bar: f64) -> Vec<(String, MeterSpec)> {
    vec![
        (
            format!("R=p,pbar={p_bar}"),
            gaussian(p_bar, 0.0, Pointer::Momentum),
        ),
        (
            format!("R=q,pbar={p_bar},b=0"),
            gaussian(p_bar, 0.0, Pointer::Position),
        ),
        (
            format!("R=q,pbar={p_bar},b=1"),
            gaussian(p_bar, 1.0, Pointer::Position),
        ),
    ]
}

pub const PRESETS: [(&str, &str); 6] = [
    ("fig1", "deflection vs coupling, |A_w| = 20, theta = -pi/4"),
    (
        "fig2",
        "deflection vs weak-value phase, gamma = 0.05, |gamma A_w| = 1",
    ),
    (
        "fig3",
        "deflection vs preselection angle kappa, gamma = 0.05, theta = -pi/4",
    ),
    (
        "fig4",
        "narrow resonance vs coupling, pbar = 10, A_w = -20i",
    ),
    (
        "fig5",
        "narrow resonance vs weak-value phase near -pi/2, pbar = 10, gamma = 0.005",
    ),
    (
        "fig7",
        "deflection vs kappa for a mixed preselection, P_in = 0.99, gamma = 0.05",
    ),
];

/// Built-in scenario by name.
pub fn preset(name: &str) -> Result<Scenario> {
    let nonlinear_exact = vec![Method::Linear, Method::Nonlinear, Method::Exact];
    let with_resonance = vec![
        Method::Linear,
        Method::Nonlinear,
        Method::Resonance,
        Method::Exact,
    ];
    let sc = match name {
        "fig1" => Scenario {
            name: name.into(),
            system: SystemSpec::Qubit(QubitSystemSpec::from_weak_value(20.0, -PI / 4.0, 1.0)),
            gamma: 0.0,
            meters: standard_families(),
            sweep: Sweep {
                parameter: SweepParameter::Gamma,
                start: -0.3,
                end: 0.3,
                steps: 241,
            },
            methods: nonlinear_exact,
            mc_trials: 0,
        },
        "fig2" => Scenario {
            name: name.into(),
            system: SystemSpec::Qubit(QubitSystemSpec::from_weak_value(20.0, 0.0, 1.0)),
            gamma: 0.05,
            meters: standard_families(),
            sweep: Sweep {
                parameter: SweepParameter::Theta,
                start: -PI,
                end: PI,
                steps: 181,
            },
            methods: nonlinear_exact,
            mc_trials: 0,
        },
        "fig3" => Scenario {
            name: name.into(),
            system: SystemSpec::Qubit(QubitSystemSpec::standard(0.1, PI / 4.0, 1.0)),
            gamma: 0.05,
            meters: standard_families(),
            sweep: Sweep {
                parameter: SweepParameter::Kappa,
                start: 0.005,
                end: 1.0,
                steps: 200,
            },
            methods: nonlinear_exact,
            mc_trials: 0,
        },
        "fig4" => Scenario {
            name: name.into(),
            system: SystemSpec::Qubit(QubitSystemSpec::from_weak_value(20.0, -PI / 2.0, 1.0)),
            gamma: 0.0,
            meters: resonance_families(10.0),
            sweep: Sweep {
                parameter: SweepParameter::Gamma,
                start: 0.0,
                end: 0.01,
                steps: 201,
            },
            methods: with_resonance,
            mc_trials: 0,
        },
        "fig5" => Scenario {
            name: name.into(),
            system: SystemSpec::Qubit(QubitSystemSpec::from_weak_value(20.0, -PI / 2.0, 1.0)),
            gamma: 0.005,
            meters: resonance_families(10.0),
            sweep: Sweep {
                parameter: SweepParameter::Theta,
                start: -PI / 2.0 - 0.3,
                end: -PI / 2.0 + 0.3,
                steps: 241,
            },
            methods: with_resonance,
            mc_trials: 0,
        },
        "fig7" => Scenario {
            name: name.into(),
            system: SystemSpec::Qubit(QubitSystemSpec::standard(0.1, PI / 4.0, 0.99)),
            gamma: 0.05,
            meters: standard_families(),
            sweep: Sweep {
                parameter: SweepParameter::Kappa,
                start: 0.005,
                end: 1.0,
                steps: 200,
            },
            methods: nonlinear_exact,
            mc_trials: 0,
        },
        _ => return Err(Error::InvalidParameter(format!("unknown preset {name:?}"))),
    };
    Ok(sc)
}

/// Rows of the three-box example: ABL probabilities for each two-outcome
/// "is it in box k" measurement, the three-outcome measurement, and the weak
/// probabilities of the boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeBoxReport {
    /// P(box k) from the measurement {Π_k, I − Π_k}.
    pub single_box: [f64; 3],
    /// ABL probabilities of the measurement {Π_1, Π_2, Π_3}.
    pub all_boxes: [f64; 3],
    /// Weak probabilities Re[(Π_k)_w].
    pub weak: [f64; 3],
}

/// Preselection (|1⟩ + |2⟩ + |3⟩)/√3, post-selection (|1⟩ + |2⟩ − |3⟩)/√3.
pub fn three_box() -> Result<ThreeBoxReport> {
    let s = 1.0 / 3f64.sqrt();
    let psi = Ket::from_real(&[s, s, s])?;
    let phi = Ket::from_real(&[s, s, -s])?;
    let rho = DensityMatrix::from_ket(&psi);
    let e = PovmElement::projector(&phi);
    let boxes: Vec<_> = (0..3)
        .map(|i| Ket::basis(3, i).map(|k| k.projector()))
        .collect::<Result<_>>()?;
    let mut single = [0.0; 3];
    for (k, p) in boxes.iter().enumerate() {
        let rest = crate::quantum_core::identity(3) - p;
        let pvm = ProjectionValuedMeasure::new(vec![p.clone(), rest], vec![1.0, 0.0])?;
        let probs = abl_probabilities(&pvm, &rho, &e)?;
        single[k] = probs
            .iter()
            .find(|(v, _)| *v == 1.0)
            .map(|(_, p)| *p)
            .unwrap_or(0.0);
    }
    let pvm = ProjectionValuedMeasure::new(boxes, vec![1.0, 2.0, 3.0])?;
    let probs = abl_probabilities(&pvm, &rho, &e)?;
    let weak = weak_probabilities(&pvm, &rho, &e)?;
    let mut all = [0.0; 3];
    let mut w = [0.0; 3];
    for k in 0..3 {
        all[k] = probs[k].1;
        w[k] = weak.entries[k].1.re;
    }
    Ok(ThreeBoxReport {
        single_box: single,
        all_boxes: all,
        weak: w,
    })
}

/// Interferometer report for a phase sweep at fixed γ and Δq.
pub fn interferometer_sweep(
    gamma: f64,
    delta_q: f64,
    phis: &[f64],
    n: u64,
) -> Result<Vec<InterferometerReport>> {
    phis.iter()
        .map(|&phi| interferometer_scenario(gamma, phi, delta_q, n))
        .collect()
}
