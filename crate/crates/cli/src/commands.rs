use std::f64::consts::PI;
use std::fmt;

use nanoguide::doublewell::{self, DoubleWellTrap, Fig3Row, WkbResult};
use nanoguide::magnetics::{self, format_sci, DimensionlessPoint, GridSpec};
use nanoguide::onedgas::{self, GasProfile, RegimeThresholds};
use nanoguide::singlewell::{self, SingleWellTrap};
use nanoguide::stability::{self, NoiseSpectrum, StabilityInputs, StabilityReport};
use nanoguide::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    parse_table1_rows, parse_table2_rows, ConfigError, GridMode, Params, Resolved, Violation,
};

/// Default longitudinal trap frequency, 2π×100 Hz.
const DEFAULT_OMEGA_Z: f64 = 2.0 * PI * 100.0;

#[derive(Debug)]
pub enum CommandError {
    Missing {
        module: &'static str,
        parameter: &'static str,
        bound: &'static str,
    },
    Config(ConfigError),
    Core(Error),
}

impl CommandError {
    /// The precondition this error reports, if it is one.
    pub fn violation(&self) -> Option<Violation> {
        match self {
            Self::Missing {
                module,
                parameter,
                bound,
            } => Some(Violation::new(module, parameter, bound, None)),
            Self::Core(e) => Violation::from_error(e),
            Self::Config(_) => None,
        }
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Missing { .. } => {
                write!(f, "{}", self.violation().expect("missing is a violation"))
            }
            Self::Config(e) => write!(f, "{e}"),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum GridKind {
    Single { d: f64, chi: f64 },
    Double { dx: f64, dy: f64, chi: f64 },
}

/// A validated command, with every cheap object already built.
pub enum Plan {
    Single(SingleWellTrap),
    Table1(Vec<SingleWellTrap>),
    Gas(GasProfile),
    Table2(Vec<GasProfile>),
    Stability(Box<StabilityReport>),
    Double(DoubleWellTrap),
    Fig3 {
        /// (current, x0) per curve
        curves: Vec<(f64, f64)>,
        chi: f64,
        ratios: Vec<f64>,
    },
    Grid {
        spec: GridSpec,
        kind: GridKind,
    },
}

/// Rendered result: CSV text and the JSON payload for `data`.
pub struct Output {
    pub csv: String,
    pub data: Value,
}

fn missing(module: &'static str, parameter: &'static str, bound: &'static str) -> CommandError {
    CommandError::Missing {
        module,
        parameter,
        bound,
    }
}

fn gas(
    omega: f64,
    omega_z: f64,
    n: u64,
    a1d: Option<f64>,
    r: &Resolved,
) -> Result<GasProfile, Error> {
    let th = RegimeThresholds::default();
    match a1d {
        Some(a) => GasProfile::with_a1d(omega, omega_z, n, a, &r.species, &th),
        None => GasProfile::characterize(omega, omega_z, n, &r.species, &th),
    }
}

fn positive(module: &'static str, parameter: &'static str, v: f64) -> Result<(), Error> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            module,
            parameter,
            value: v,
            bound: "> 0 and finite",
        })
    }
}

fn ratio_in_unit_interval(parameter: &'static str, v: f64) -> Result<(), Error> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            module: "doublewell",
            parameter,
            value: v,
            bound: "0 < y0/x0 < 1",
        })
    }
}

/// Check preconditions and build everything that does not need heavy
/// numerics.
pub fn prepare(r: &Resolved) -> Result<Plan, CommandError> {
    let sp = &r.species;
    Ok(match &r.params {
        Params::Single(p) => match (p.d, p.chi, p.bx, p.bz) {
            (Some(d), Some(chi), None, None) => {
                Plan::Single(SingleWellTrap::from_current_and_d(p.current, d, chi, sp)?)
            }
            (None, None, Some(bx), Some(bz)) => {
                Plan::Single(SingleWellTrap::from_fields(p.current, bx, bz, sp)?)
            }
            _ => {
                return Err(missing(
                    "singlewell",
                    "d, chi | Bx, Bz",
                    "exactly one of (d and chi) or (Bx and Bz)",
                ))
            }
        },
        Params::Table1(p) => {
            let rows = parse_table1_rows(&p.rows)?;
            if rows.is_empty() {
                return Err(missing("singlewell", "rows", "at least one I_uA:d row"));
            }
            Plan::Table1(singlewell::design_sweep(&rows, p.chi, sp)?)
        }
        Params::Gas(p) => Plan::Gas(gas(
            p.omega,
            p.omega_z.unwrap_or(DEFAULT_OMEGA_Z),
            p.n,
            p.a1d,
            r,
        )?),
        Params::Table2(p) => {
            let wz = p.omega_z.unwrap_or(DEFAULT_OMEGA_Z);
            let rows = parse_table2_rows(&p.rows)?;
            if rows.is_empty() {
                return Err(missing(
                    "onedgas",
                    "rows",
                    "at least one nu_kHz:N[:a1d_nm] row",
                ));
            }
            let profiles = rows
                .into_iter()
                .map(|(omega, n, a)| gas(omega, wz, n, a, r))
                .collect::<Result<Vec<_>, _>>()?;
            Plan::Table2(profiles)
        }
        Params::Stability(p) => {
            let trap = SingleWellTrap::from_current_and_d(p.current, p.d, p.chi, sp)?;
            let mut inputs = StabilityInputs::new(trap, r.wire, p.temperature);
            inputs.pair_half_distance = p.pair_x0;
            if let Some(rc) = p.casimir_r {
                inputs.casimir_distance = rc;
            }
            if let Some(c4) = p.c4 {
                inputs.c4 = c4;
            }
            if let Some(s) = p.noise {
                inputs.spectrum = NoiseSpectrum::UserConstant { s_i: s };
            }
            Plan::Stability(Box::new(stability::stability_report(inputs, sp)?))
        }
        Params::Double(p) => Plan::Double(DoubleWellTrap::design_with(
            p.current,
            p.x0,
            p.y0,
            p.chi,
            sp,
            &r.tolerances,
        )?),
        Params::Fig3(p) => {
            ratio_in_unit_interval("ratio_min", p.ratio_min)?;
            ratio_in_unit_interval("ratio_max", p.ratio_max)?;
            if !(p.ratio_min < p.ratio_max) || p.points < 2 {
                return Err(missing(
                    "doublewell",
                    "ratio_min, ratio_max, points",
                    "ratio_min < ratio_max and points >= 2",
                ));
            }
            let omega0 = doublewell::reference_omega0(p.current, p.x0, p.chi, sp)?;
            let mut curves = vec![(p.current, p.x0)];
            if let Some(i2) = p.match_current {
                positive("doublewell", "match_I", i2)?;
                curves.push((
                    i2,
                    doublewell::matched_x0(i2, omega0, p.chi, sp, &r.tolerances)?,
                ));
            }
            let step = (p.ratio_max - p.ratio_min) / (p.points - 1) as f64;
            let ratios = (0..p.points)
                .map(|k| p.ratio_min + k as f64 * step)
                .collect();
            Plan::Fig3 {
                curves,
                chi: p.chi,
                ratios,
            }
        }
        Params::Grid(p) => {
            let (kind, (x_half, y_top, y_floor)) = match p.mode {
                GridMode::Single => {
                    let d =
                        p.d.ok_or_else(|| missing("magnetics", "d", "required for --mode single"))?;
                    let t = SingleWellTrap::from_current_and_d(p.current, d, p.chi, sp)?;
                    (
                        GridKind::Single { d: t.d, chi: t.chi },
                        (2.0 * t.d, 3.0 * t.d, 0.05 * t.d),
                    )
                }
                GridMode::Double => {
                    let (x0, y0) = match (p.x0, p.y0) {
                        (Some(x0), Some(y0)) => (x0, y0),
                        _ => {
                            return Err(missing(
                                "magnetics",
                                "x0, y0",
                                "required for --mode double",
                            ))
                        }
                    };
                    let t =
                        DoubleWellTrap::design_with(p.current, x0, y0, p.chi, sp, &r.tolerances)?;
                    (
                        GridKind::Double {
                            dx: t.dx,
                            dy: t.dy,
                            chi: t.chi,
                        },
                        (2.0 * t.dx, 3.0 * t.dy, 0.05 * t.dy),
                    )
                }
            };
            let spec = GridSpec {
                x_min: p.x_min.unwrap_or(-x_half),
                x_max: p.x_max.unwrap_or(x_half),
                nx: p.nx,
                y_min: p.y_min.unwrap_or(y_floor),
                y_max: p.y_max.unwrap_or(y_top),
                ny: p.ny,
            };
            spec.validate()?;
            Plan::Grid { spec, kind }
        }
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize")
}

fn csv_from<F>(write: F) -> String
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}

const STABILITY_CSV_HEADER: &str = "metric,value,unit,threshold,pass";

const DOUBLE_CSV_HEADER: &str = "I_uA,x0_nm,y0_nm,chi,nu_kHz,nu0_kHz,omega_over_omega0,dx,dy,barrier_over_hbar_omega,gamma_over_omega,T_hbar_omega_uK,T_barrier_uK";

fn na(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), format_sci)
}

#[derive(Serialize)]
struct Curve {
    current: f64,
    x0: f64,
    onset_omega_over_omega0: Option<f64>,
    rows: Vec<Fig3Row>,
}

/// Run the heavy part of a plan and render it.
pub fn execute(plan: Plan, r: &Resolved) -> Result<Output, CommandError> {
    let tol = &r.tolerances;
    Ok(match plan {
        Plan::Single(t) => {
            let warnings: Vec<String> = t.warnings().iter().map(|w| w.to_string()).collect();
            Output {
                csv: csv_from(|b| singlewell::write_table1_csv(&[t], b)),
                data: json!({
                    "trap": to_value(&t),
                    "confinement": format!("{:?}", t.confinement()).to_lowercase(),
                    "escape_barrier_over_hbar_omega": t.escape_barrier(),
                    "warnings": warnings,
                }),
            }
        }
        Plan::Table1(traps) => Output {
            csv: csv_from(|b| singlewell::write_table1_csv(&traps, b)),
            data: to_value(&traps),
        },
        Plan::Gas(g) => Output {
            csv: csv_from(|b| onedgas::write_table2_csv(&[g], b)),
            data: to_value(&g),
        },
        Plan::Table2(gs) => Output {
            csv: csv_from(|b| onedgas::write_table2_csv(&gs, b)),
            data: to_value(&gs),
        },
        Plan::Stability(report) => {
            let mut csv = format!("{STABILITY_CSV_HEADER}\n");
            for (name, m) in report.metrics() {
                csv.push_str(&format!(
                    "{name},{},{},{},{}\n",
                    format_sci(m.value),
                    m.unit,
                    na(m.threshold),
                    m.pass
                ));
            }
            Output {
                csv,
                data: json!({ "all_pass": report.all_pass(), "report": to_value(&report) }),
            }
        }
        Plan::Double(t) => {
            let wkb: Option<WkbResult> = match doublewell::wkb_tunneling(&t, tol) {
                Ok(w) => Some(w),
                Err(Error::NoBarrier { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let (t_hw, t_d) = t.temperature_scales();
            let csv = format!(
                "{DOUBLE_CSV_HEADER}\n{}\n",
                [
                    format_sci(t.current * 1e6),
                    format_sci(t.x0 * 1e9),
                    format_sci(t.y0 * 1e9),
                    format_sci(t.chi),
                    format_sci(t.omega / (2.0 * PI) * 1e-3),
                    format_sci(t.omega0 / (2.0 * PI) * 1e-3),
                    format_sci(t.frequency_ratio()),
                    format_sci(t.dx),
                    format_sci(t.dy),
                    format_sci(t.barrier_over_hbar_omega()),
                    na(wkb.map(|w| w.ratio)),
                    format_sci(t_hw * 1e6),
                    format_sci(t_d * 1e6),
                ]
                .join(",")
            );
            Output {
                csv,
                data: json!({
                    "trap": to_value(&t),
                    "wkb": to_value(&wkb),
                    "temperature_hbar_omega_K": t_hw,
                    "temperature_barrier_K": t_d,
                }),
            }
        }
        Plan::Fig3 {
            curves,
            chi,
            ratios,
        } => {
            let mut all = Vec::new();
            let mut out = Vec::new();
            for (current, x0) in curves {
                let rows = doublewell::fig3_sweep(current, x0, chi, &r.species, &ratios, tol)?;
                all.extend_from_slice(&rows);
                out.push(Curve {
                    current,
                    x0,
                    onset_omega_over_omega0: doublewell::tunneling_onset(
                        &rows,
                        doublewell::DEFAULT_TUNNELING_THRESHOLD,
                    ),
                    rows,
                });
            }
            Output {
                csv: csv_from(|b| doublewell::write_fig3_csv(&all, b)),
                data: json!({ "curves": to_value(&out) }),
            }
        }
        Plan::Grid { spec, kind } => {
            let samples = match kind {
                GridKind::Single { d, chi } => {
                    magnetics::evaluate_grid(&spec, |p: DimensionlessPoint| {
                        magnetics::dimensionless_single_potential(p, d, chi, 0.0)
                    })
                }
                GridKind::Double { dx, dy, chi } => magnetics::evaluate_grid(&spec, |p| {
                    magnetics::dimensionless_double_potential(p, dx, dy, chi)
                }),
            };
            Output {
                csv: csv_from(|b| magnetics::write_grid_csv(&samples, b)),
                data: json!({ "grid": to_value(&spec), "samples": to_value(&samples) }),
            }
        }
    })
}
