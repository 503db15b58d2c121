//! JSON scenario files.
//!
//! Matrices are row-major arrays of `[re, im]` pairs.

use serde::Deserialize;
use std::f64::consts::PI;
use std::path::Path;
use weakpps::meters::{GaussianMeter, Pointer, QubitMeter};
use weakpps::oracle::PpsSystem;
use weakpps::quantum_core::{c64, CMatrix, DensityMatrix, Ket, Observable, PovmElement};
use weakpps::scenarios::{
    MeterSpec, Method, QubitSystemSpec, Scenario, Sweep, SweepParameter, SystemSpec,
};

type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_name")]
    name: String,
    system: SystemJson,
    #[serde(default)]
    gamma: f64,
    meters: Vec<MeterJson>,
    sweep: SweepJson,
    methods: Vec<String>,
    #[serde(default)]
    mc_trials: u64,
}

fn default_name() -> String {
    "scenario".into()
}

fn one() -> f64 {
    1.0
}

fn x_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn pi() -> f64 {
    PI
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum SystemJson {
    Qubit {
        kappa: f64,
        #[serde(default)]
        nu: f64,
        #[serde(default = "one")]
        p_in: f64,
        #[serde(default = "x_axis")]
        axis: [f64; 3],
        #[serde(default = "pi")]
        post_kappa: f64,
        #[serde(default)]
        post_nu: f64,
    },
    Matrix {
        a: MatrixJson,
        rho: MatrixJson,
        e: Option<MatrixJson>,
        phi: Option<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PointerJson {
    P,
    Q,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MeterKind {
    Gaussian {
        #[serde(default)]
        p_bar: f64,
        #[serde(default)]
        q_bar: f64,
        #[serde(default = "one")]
        delta_p: f64,
        #[serde(default)]
        b: f64,
        pointer: PointerJson,
    },
    Qubit {
        n_f: [f64; 3],
        n_r: [f64; 3],
        #[serde(default)]
        f0: f64,
        s: [f64; 3],
    },
    Coinciding {
        f_bar: f64,
        delta_f: f64,
        #[serde(default)]
        fc3: f64,
    },
}

#[derive(Debug, Deserialize)]
struct MeterJson {
    label: Option<String>,
    #[serde(flatten)]
    kind: MeterKind,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepJson {
    parameter: String,
    start: f64,
    end: f64,
    steps: usize,
}

fn matrix(m: &MatrixJson, what: &str) -> Result<CMatrix, String> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(format!("{what} must be a non-empty square matrix"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| c64(m[i][j][0], m[i][j][1])))
}

fn err(what: &str) -> impl Fn(weakpps::Error) -> String + '_ {
    move |e| format!("{what}: {e}")
}

impl SystemJson {
    fn build(&self) -> Result<SystemSpec, String> {
        match self {
            SystemJson::Qubit {
                kappa,
                nu,
                p_in,
                axis,
                post_kappa,
                post_nu,
            } => Ok(SystemSpec::Qubit(QubitSystemSpec {
                kappa: *kappa,
                nu: *nu,
                p_in: *p_in,
                a_axis: *axis,
                post_kappa: *post_kappa,
                post_nu: *post_nu,
            })),
            SystemJson::Matrix { a, rho, e, phi } => {
                let a = Observable::new(matrix(a, "a")?).map_err(err("a"))?;
                let rho = DensityMatrix::new(matrix(rho, "rho")?).map_err(err("rho"))?;
                let e = match (e, phi) {
                    (Some(e), None) => PovmElement::new(matrix(e, "e")?).map_err(err("e"))?,
                    (None, Some(phi)) => {
                        let ket = Ket::new(phi.iter().map(|z| c64(z[0], z[1])).collect())
                            .map_err(err("phi"))?;
                        PovmElement::projector(&ket)
                    }
                    _ => return Err("matrix system needs exactly one of \"e\" or \"phi\"".into()),
                };
                Ok(SystemSpec::Matrix(
                    PpsSystem::new(rho, a, e).map_err(err("system"))?,
                ))
            }
        }
    }
}

impl MeterKind {
    fn build(&self) -> Result<(String, MeterSpec), String> {
        match *self {
            MeterKind::Gaussian {
                p_bar,
                q_bar,
                delta_p,
                b,
                pointer,
            } => {
                let (ptr, name) = match pointer {
                    PointerJson::P => (Pointer::Momentum, "p"),
                    PointerJson::Q => (Pointer::Position, "q"),
                };
                let g = GaussianMeter::new(p_bar, q_bar, delta_p, b, ptr)
                    .map_err(err("gaussian meter"))?;
                Ok((
                    format!("R={name},pbar={p_bar},b={b}"),
                    MeterSpec::Gaussian(g),
                ))
            }
            MeterKind::Qubit { n_f, n_r, f0, s } => {
                let q = QubitMeter::new(n_f, n_r, f0, s).map_err(err("qubit meter"))?;
                Ok(("qubit".into(), MeterSpec::Qubit(q)))
            }
            MeterKind::Coinciding {
                f_bar,
                delta_f,
                fc3,
            } => Ok((
                format!("R=F,fbar={f_bar}"),
                MeterSpec::Coinciding {
                    f_bar,
                    delta_f,
                    fc3,
                },
            )),
        }
    }
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Scenario, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let file: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        file.into_scenario()
    }

    pub fn into_scenario(self) -> Result<Scenario, String> {
        let meters = self
            .meters
            .iter()
            .map(|m| {
                m.kind
                    .build()
                    .map(|(label, spec)| (m.label.clone().unwrap_or(label), spec))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let methods = self
            .methods
            .iter()
            .map(|m| Method::parse(m).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let parameter = SweepParameter::parse(&self.sweep.parameter).map_err(|e| e.to_string())?;
        let sc = Scenario {
            name: self.name,
            system: self.system.build()?,
            gamma: self.gamma,
            meters,
            sweep: Sweep {
                parameter,
                start: self.sweep.start,
                end: self.sweep.end,
                steps: self.sweep.steps,
            },
            methods,
            mc_trials: self.mc_trials,
        };
        sc.validate().map_err(|e| e.to_string())?;
        Ok(sc)
    }
}
