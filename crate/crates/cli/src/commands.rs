use crate::scenario_file::ScenarioFile;
use crate::table::{Cell, Table};
use crate::Source;
use rayon::prelude::*;
use std::path::Path;
use weakpps::meters::{moments_gaussian, GaussianMeter, Pointer};
use weakpps::metrology::{
    amplification, classify_regime, interferometer_scenario, interferometer_system,
};
use weakpps::oracle::{
    grid_pointer_distribution, mc_sample_partitioned, tensor_pointer_distribution, GridMeterState,
    McMeter, PpsSystem, Readout,
};
use weakpps::pps::{
    mu_w, pointer_distribution_exact, pointer_distribution_exact_matrix, pointer_distribution_weak,
    pointer_distribution_weak_matrix, MeterProfile, PointerDistribution, Regime,
};
use weakpps::quantum_core::c64;
use weakpps::scenarios::{
    evaluate_point, preset, three_box, MeterSpec, Method, QubitSystemSpec, Scenario,
    SweepParameter, SystemSpec, PRESETS,
};
use weakpps::selfcheck;
use weakpps::weak_values::WeakValueReport;

fn e2s(e: weakpps::Error) -> String {
    e.to_string()
}

pub fn list_presets() -> Table {
    let mut t = Table::new(["preset", "description"]);
    for (name, desc) in PRESETS {
        t.push(vec![name.into(), desc.into()]);
    }
    t.push(vec![
        "threebox".into(),
        "three-box example; run the threebox subcommand".into(),
    ]);
    t.push(vec![
        "interferometer".into(),
        "which-path phase detection; run the interferometer subcommand".into(),
    ]);
    t
}

fn load(src: &Source, default: &str) -> Result<Scenario, String> {
    let mut sc = match (&src.scenario, &src.preset) {
        (Some(path), _) => ScenarioFile::load(path)?,
        (None, Some(name)) => preset(name).map_err(e2s)?,
        (None, None) => preset(default).map_err(e2s)?,
    };
    if let Some(steps) = src.steps {
        sc.sweep.steps = steps;
    }
    if let Some(methods) = &src.methods {
        sc.methods = methods
            .iter()
            .map(|m| Method::parse(m.trim()))
            .collect::<Result<_, _>>()
            .map_err(e2s)?;
    }
    if let Some(n) = src.mc_trials {
        sc.mc_trials = n;
    }
    sc.validate().map_err(e2s)?;
    Ok(sc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    Deflection,
    Theta,
    Resonance,
}

pub fn scan(src: &Source, kind: ScanKind, seed: u64) -> Result<Table, String> {
    let default = match kind {
        ScanKind::Deflection => "fig1",
        ScanKind::Theta => "fig2",
        ScanKind::Resonance => "fig4",
    };
    let mut sc = load(src, default)?;
    let is_theta = sc.sweep.parameter == SweepParameter::Theta;
    match kind {
        ScanKind::Deflection if is_theta => {
            return Err("deflection-scan does not sweep theta; use theta-scan".into())
        }
        ScanKind::Theta if !is_theta => return Err("theta-scan needs a theta sweep".into()),
        ScanKind::Resonance if !sc.methods.contains(&Method::Resonance) => {
            sc.methods.push(Method::Resonance)
        }
        _ => {}
    }
    let rows: Vec<_> = (0..sc.sweep.steps)
        .into_par_iter()
        .map(|i| evaluate_point(&sc, i, seed))
        .collect();
    let mut columns = vec![
        "index".to_string(),
        sc.sweep.parameter.name().to_string(),
        "meter".into(),
        "regime".into(),
    ];
    columns.extend(sc.methods.iter().map(|m| m.name().to_string()));
    columns.push("error".into());
    let mut t = Table::new(columns);
    for row in rows.into_iter().flatten() {
        let mut cells = vec![
            Cell::Int(row.index as u64),
            row.sweep_value.into(),
            row.meter.into(),
            row.regime.map_or(Cell::Empty, Cell::from),
        ];
        cells.extend(row.values.into_iter().map(Cell::from));
        cells.push(if row.errors.is_empty() {
            Cell::Empty
        } else {
            row.errors.join("; ").into()
        });
        t.push(cells);
    }
    Ok(t)
}

pub fn weakvalue(
    scenario: Option<&Path>,
    preset_name: Option<&str>,
    kappa: Option<f64>,
    nu: f64,
    p_in: f64,
) -> Result<Table, String> {
    let system = match (scenario, preset_name, kappa) {
        (Some(path), _, _) => ScenarioFile::load(path)?.system,
        (None, Some(name), _) => preset(name).map_err(e2s)?.system,
        (None, None, Some(kappa)) => SystemSpec::Qubit(QubitSystemSpec::standard(kappa, nu, p_in)),
        (None, None, None) => return Err("give --scenario, --preset or --kappa".into()),
    };
    let sys = system.build().map_err(e2s)?;
    let wv = WeakValueReport::compute(&sys.a, &sys.rho, &sys.e).map_err(e2s)?;
    let mut t = Table::new(["a_w", "a_w_11", "a_w_abs", "a_w_arg", "post_prob"]);
    t.push(vec![
        Cell::Complex(wv.a_w.re, wv.a_w.im),
        wv.a_w_11.into(),
        wv.a_w.norm().into(),
        wv.a_w.arg().into(),
        wv.post_norm.into(),
    ]);
    Ok(t)
}

fn gaussian_readout(g: &GaussianMeter) -> Readout {
    match g.pointer {
        Pointer::Momentum => Readout::P,
        Pointer::Position => Readout::Q,
    }
}

/// Linear interpolation of a distribution at `r`, zero outside its grid.
fn interpolate(d: &PointerDistribution, r: f64) -> f64 {
    let g = &d.grid;
    let i = g.partition_point(|p| p.0 < r);
    if i == 0 || i == g.len() {
        return 0.0;
    }
    let (a, b) = (g[i - 1], g[i]);
    a.1 + (b.1 - a.1) * (r - a.0) / (b.0 - a.0)
}

pub fn distribution(
    src: &Source,
    index: usize,
    meter: usize,
    points: usize,
    width: f64,
) -> Result<Table, String> {
    let sc = load(src, "fig1")?;
    if index >= sc.sweep.steps {
        return Err(format!(
            "index {index} out of range (sweep has {} points)",
            sc.sweep.steps
        ));
    }
    let (label, spec) = sc
        .meters
        .get(meter)
        .ok_or_else(|| format!("no meter {meter}"))?;
    let (x, system, gamma) = sc.point(index);
    let spec = sc.meter_at(spec, x).map_err(e2s)?;
    let sys: PpsSystem = system.build().map_err(e2s)?;
    let wv = WeakValueReport::compute(&sys.a, &sys.rho, &sys.e).map_err(e2s)?;
    let mut t = Table::new(["meter", "gamma", "r", "weak", "exact", "oracle"]);
    match spec {
        MeterSpec::Gaussian(g) => {
            if points < 2 || width.is_nan() || width <= 0.0 {
                return Err("need at least 2 points and a positive width".into());
            }
            let m = moments_gaussian(&g).map_err(e2s)?;
            let grid: Vec<f64> = (0..points)
                .map(|j| {
                    m.r_bar - width * m.delta_r
                        + 2.0 * width * m.delta_r * j as f64 / (points - 1) as f64
                })
                .collect();
            let density = |p: f64| g.psi_p(p).norm_sqr();
            let profile = match g.pointer {
                Pointer::Momentum => MeterProfile::Coinciding(&density),
                Pointer::Position => MeterProfile::Conjugate(&g),
            };
            let weak = pointer_distribution_weak(gamma, &wv, &profile, &grid).map_err(e2s)?;
            let exact = pointer_distribution_exact(gamma, &wv, &profile, &grid);
            let state = GridMeterState::from_gaussian(&g).map_err(e2s)?;
            let oracle =
                grid_pointer_distribution(&sys, &state, gamma, gaussian_readout(&g)).map(|p| p.1);
            for (j, &r) in grid.iter().enumerate() {
                t.push(vec![
                    label.as_str().into(),
                    gamma.into(),
                    r.into(),
                    weak.grid[j].1.into(),
                    exact.as_ref().ok().map(|d| d.grid[j].1).into(),
                    oracle.as_ref().ok().map(|d| interpolate(d, r)).into(),
                ]);
            }
        }
        MeterSpec::Qubit(q) => {
            let mm = q.matrix_meter();
            let weak = pointer_distribution_weak_matrix(gamma, &wv, &mm).map_err(e2s)?;
            let exact = pointer_distribution_exact_matrix(gamma, &wv, &mm).ok();
            let oracle = tensor_pointer_distribution(&sys, &mm, gamma)
                .map_err(e2s)?
                .1;
            for (j, &(r, w)) in weak.grid.iter().enumerate() {
                t.push(vec![
                    label.as_str().into(),
                    gamma.into(),
                    r.into(),
                    w.into(),
                    exact.as_ref().map(|d| d.grid[j].1).into(),
                    oracle.grid.get(j).map(|p| p.1).into(),
                ]);
            }
        }
        MeterSpec::Coinciding { .. } => {
            return Err("a moments-only meter has no distribution".into())
        }
    }
    Ok(t)
}

pub struct InterferometerArgs {
    pub gamma: f64,
    pub delta_q: f64,
    pub n: u64,
    pub phi_start: f64,
    pub phi_end: f64,
    pub steps: usize,
    pub mc_trials: u64,
}

/// Empirical SNR |q̄_s|√(N·P_accept)/Δq_s from Monte Carlo trials.
fn interferometer_mc(a: &InterferometerArgs, phi: f64, seed: u64) -> weakpps::Result<f64> {
    let (obs, rho, e) = interferometer_system(phi)?;
    let sys = PpsSystem::new(rho, obs, e)?;
    // F = R = q; the grid oracle's coupled variable plays the role of q.
    let g = GaussianMeter::new(0.0, 0.0, a.delta_q, 0.0, Pointer::Momentum)?;
    let state = GridMeterState::from_gaussian(&g)?;
    let stats = mc_sample_partitioned(
        &sys,
        McMeter::Grid(&state, Readout::P),
        a.gamma,
        a.mc_trials,
        seed,
        1,
    )?;
    Ok(stats.mean.abs() * (a.n as f64 * stats.acceptance_rate).sqrt() / stats.std)
}

pub fn interferometer(a: &InterferometerArgs, seed: u64) -> Result<Table, String> {
    if a.steps < 2 {
        return Err("need at least 2 steps".into());
    }
    let mut columns = vec![
        "phi",
        "a_w_im",
        "q_s",
        "regime",
        "amp_phi",
        "post_prob",
        "delta_q_s",
        "snr_weak",
        "snr_weak_model",
        "snr_weak_limit",
        "snr_split",
        "snr_homodyne",
    ];
    if a.mc_trials > 0 {
        columns.push("snr_mc");
    }
    columns.push("error");
    let phis: Vec<f64> = (0..a.steps)
        .map(|i| a.phi_start + (a.phi_end - a.phi_start) * i as f64 / (a.steps - 1) as f64)
        .collect();
    let rows: Vec<Vec<Cell>> = phis
        .par_iter()
        .enumerate()
        .map(|(i, &phi)| {
            let r = match interferometer_scenario(a.gamma, phi, a.delta_q, a.n) {
                Ok(r) => r,
                Err(e) => {
                    let mut cells = vec![phi.into()];
                    cells.resize(columns.len() - 1, Cell::Empty);
                    cells.push(e.to_string().into());
                    return cells;
                }
            };
            let mut cells = vec![
                phi.into(),
                r.a_w.im.into(),
                r.q_s.into(),
                r.regime.name().into(),
                r.amp_phi.into(),
                r.post_prob.into(),
                r.delta_q_s.into(),
                r.snr_weak.into(),
                r.snr_weak_model.into(),
                r.snr_weak_limit.into(),
                r.snr_split.into(),
                r.snr_homodyne.into(),
            ];
            let mut error = Cell::Empty;
            if a.mc_trials > 0 {
                match interferometer_mc(a, phi, seed.wrapping_add(i as u64)) {
                    Ok(v) => cells.push(v.into()),
                    Err(e) => {
                        cells.push(Cell::Empty);
                        error = format!("mc: {e}").into();
                    }
                }
            }
            cells.push(error);
            cells
        })
        .collect();
    let mut t = Table::new(columns);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn threebox() -> Result<Table, String> {
    let r = three_box().map_err(e2s)?;
    let mut t = Table::new(["box", "single_box", "all_boxes", "weak"]);
    for k in 0..3 {
        t.push(vec![
            Cell::Int(k as u64 + 1),
            r.single_box[k].into(),
            r.all_boxes[k].into(),
            r.weak[k].into(),
        ]);
    }
    Ok(t)
}

pub fn regimes(src: &Source) -> Result<Table, String> {
    let sc = load(src, "fig1")?;
    let columns = [
        "index",
        sc.sweep.parameter.name(),
        "meter",
        "mu0",
        "mu1",
        "mu",
        "mu_w",
        "regime",
        "weak_valid",
        "proper_amplification",
        "enhancement",
        "n0",
        "error",
    ];
    let rows: Vec<Vec<Vec<Cell>>> = (0..sc.sweep.steps)
        .into_par_iter()
        .map(|i| {
            let (x, system, gamma) = sc.point(i);
            sc.meters
                .iter()
                .enumerate()
                .map(|(k, (label, spec))| {
                    let mut cells = vec![
                        Cell::Int((i * sc.meters.len() + k) as u64),
                        x.into(),
                        label.as_str().into(),
                    ];
                    let res = (|| -> weakpps::Result<Vec<Cell>> {
                        let m = sc.meter_at(spec, x)?.moments()?;
                        let sys = system.build()?;
                        let wv = WeakValueReport::compute(&sys.a, &sys.rho, &sys.e)?;
                        let mw = mu_w(gamma, wv.a_w, &m);
                        Ok(match system.transition() {
                            Some((ov, a_phipsi)) => {
                                let rep = classify_regime(gamma, c64(a_phipsi, 0.0), wv.a_w, &m);
                                let amp = amplification(gamma, c64(ov, 0.0), &m, &rep).ok();
                                vec![
                                    rep.mu0.into(),
                                    rep.mu1.into(),
                                    rep.mu.into(),
                                    mw.into(),
                                    rep.regime.name().into(),
                                    rep.weak_valid.into(),
                                    amp.map(|a| a.proper_a).into(),
                                    m.enhancement().into(),
                                    amp.map(|a| a.n0).into(),
                                    Cell::Empty,
                                ]
                            }
                            None => vec![
                                Cell::Empty,
                                Cell::Empty,
                                Cell::Empty,
                                mw.into(),
                                Regime::from_mu_w(mw).name().into(),
                                Cell::Empty,
                                Cell::Empty,
                                m.enhancement().into(),
                                Cell::Empty,
                                "strengths need a pure qubit preselection".into(),
                            ],
                        })
                    })();
                    match res {
                        Ok(rest) => cells.extend(rest),
                        Err(e) => {
                            cells.extend(std::iter::repeat_n(Cell::Empty, 9));
                            cells.push(e.to_string().into());
                        }
                    }
                    cells
                })
                .collect()
        })
        .collect();
    let mut t = Table::new(columns);
    rows.into_iter().flatten().for_each(|r| t.push(r));
    Ok(t)
}

/// Runs the self-check suite; the flag is false if any check failed.
pub fn verify(seed: u64) -> (Table, bool) {
    let checks = selfcheck::run_all(seed);
    let ok = checks.iter().all(|c| c.passed);
    let mut t = Table::new(["check", "passed", "detail"]);
    for c in checks {
        t.push(vec![c.name.into(), c.passed.into(), c.detail.into()]);
    }
    (t, ok)
}
