//! Run configuration shared by the flag parser and `--config` files.
//!
//! Parameter values are stored exactly as given, in the unit system named by
//! `units`; conversion to SI happens once, in [`RunConfig::resolve`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nanoguide::constants::{default_mwnt, default_rb87, AtomSpecies, NanowireSpec};
use nanoguide::numerics::ToleranceConfig;
use nanoguide::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// SI throughout: A, m, rad/s, T.
    #[default]
    Si,
    /// μA, nm, kHz (2π factored out), G.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum CommandName {
    Single,
    SweepTable1,
    Gas,
    SweepTable2,
    Stability,
    Double,
    Fig3,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_output")]
    pub output: String,
    /// Partial overrides of the built-in species, keyed like the dataset.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub species: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub wire: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

fn default_output() -> String {
    "-".to_string()
}

/// One failed precondition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub module: String,
    pub parameter: String,
    pub bound: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Violation {
    pub fn new(module: &str, parameter: &str, bound: &str, value: Option<f64>) -> Self {
        Self {
            module: module.to_string(),
            parameter: parameter.to_string(),
            bound: bound.to_string(),
            value,
        }
    }

    /// Precondition errors from the library; `None` for numerical failures.
    pub fn from_error(e: &Error) -> Option<Self> {
        Some(match *e {
            Error::InvalidParameter {
                module,
                parameter,
                value,
                bound,
            } => Self::new(module, parameter, bound, Some(value)),
            Error::Adiabaticity { chi } => {
                Self::new("singlewell", "chi", "0 < chi < 1 (adiabaticity)", Some(chi))
            }
            Error::NotBistable { x0, .. } => {
                Self::new("doublewell", "x0", "x0 > y0 (bistability)", Some(x0))
            }
            Error::ConfinementResonance { a3d, .. } => Self::new(
                "onedgas",
                "a3d",
                "outside the confinement-induced resonance window",
                Some(a3d),
            ),
            Error::Dataset(ref msg) => Self::new("constants", "dataset", msg, None),
            _ => return None,
        })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: `{}` must satisfy {}",
            self.module, self.parameter, self.bound
        )?;
        if let Some(v) = self.value {
            write!(f, " (got {v})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    Single,
    Double,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleParams {
    #[serde(rename = "I")]
    pub current: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(rename = "Bx", default, skip_serializing_if = "Option::is_none")]
    pub bx: Option<f64>,
    #[serde(rename = "Bz", default, skip_serializing_if = "Option::is_none")]
    pub bz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Params {
    pub chi: f64,
    /// `I_uA:d` pairs separated by commas.
    pub rows: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasParams {
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_z: Option<f64>,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table2Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_z: Option<f64>,
    /// `nu_kHz:N[:a1d_nm]` entries separated by commas.
    pub rows: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityParams {
    #[serde(rename = "I")]
    pub current: f64,
    pub d: f64,
    pub chi: f64,
    #[serde(rename = "T", default = "room_temperature")]
    pub temperature: f64,
    /// Half-distance of a partner wire; enables the deflection entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casimir_r: Option<f64>,
    #[serde(rename = "C4", default, skip_serializing_if = "Option::is_none")]
    pub c4: Option<f64>,
    /// Constant current-noise density [A²·s]; shot noise when absent.
    #[serde(rename = "S_I", default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

fn room_temperature() -> f64 {
    300.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleParams {
    #[serde(rename = "I")]
    pub current: f64,
    pub x0: f64,
    pub y0: f64,
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig3Params {
    #[serde(rename = "I")]
    pub current: f64,
    pub x0: f64,
    pub chi: f64,
    #[serde(default = "ratio_min")]
    pub ratio_min: f64,
    #[serde(default = "ratio_max")]
    pub ratio_max: f64,
    #[serde(default = "ratio_points")]
    pub points: usize,
    /// Second current, with x0 chosen to keep ω0 fixed.
    #[serde(rename = "match_I", default, skip_serializing_if = "Option::is_none")]
    pub match_current: Option<f64>,
}

fn ratio_min() -> f64 {
    0.05
}

fn ratio_max() -> f64 {
    0.995
}

fn ratio_points() -> usize {
    190
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub mode: GridMode,
    #[serde(rename = "I")]
    pub current: f64,
    pub chi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
    #[serde(default = "grid_points")]
    pub nx: usize,
    #[serde(default = "grid_points")]
    pub ny: usize,
}

fn grid_points() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Single(SingleParams),
    Table1(Table1Params),
    Gas(GasParams),
    Table2(Table2Params),
    Stability(StabilityParams),
    Double(DoubleParams),
    Fig3(Fig3Params),
    Grid(GridParams),
}

/// Everything a command needs, in SI.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub command: CommandName,
    pub params: Params,
    pub species: AtomSpecies,
    pub wire: NanowireSpec,
    pub tolerances: ToleranceConfig,
}

/// Reasons a configuration cannot run.
#[derive(Debug)]
pub enum ConfigError {
    /// Malformed config: unknown key, missing field, unparsable rows.
    Schema(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Schema(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

struct Scale {
    current: f64,
    length: f64,
    frequency: f64,
    field: f64,
}

impl Units {
    fn scale(self) -> Scale {
        match self {
            Units::Si => Scale {
                current: 1.0,
                length: 1.0,
                frequency: 1.0,
                field: 1.0,
            },
            Units::Paper => Scale {
                current: 1e-6,
                length: 1e-9,
                frequency: 2.0 * PI * 1e3,
                field: 1e-4,
            },
        }
    }
}

fn parse_params<T: serde::de::DeserializeOwned>(value: &Value) -> Result<T, ConfigError> {
    serde_json::from_value(value.clone()).map_err(|e| ConfigError::Schema(format!("params: {e}")))
}

fn merge<T>(base: T, overrides: &BTreeMap<String, f64>, what: &str) -> Result<T, ConfigError>
where
    T: Serialize + serde::de::DeserializeOwned,
{
    let mut value = serde_json::to_value(base).map_err(|e| ConfigError::Schema(e.to_string()))?;
    let map = value
        .as_object_mut()
        .expect("struct serializes to an object");
    for (k, v) in overrides {
        if !map.contains_key(k) {
            return Err(ConfigError::Schema(format!("{what}: unknown key `{k}`")));
        }
        map.insert(k.clone(), serde_json::json!(v));
    }
    serde_json::from_value(value).map_err(|e| ConfigError::Schema(format!("{what}: {e}")))
}

/// Parse `I_uA:d` rows.
pub fn parse_table1_rows(rows: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    rows.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|entry| {
            let parts: Vec<&str> = entry.trim().split(':').collect();
            match parts.as_slice() {
                [i, d] => Ok((number(i, entry)? * 1e-6, number(d, entry)?)),
                _ => Err(ConfigError::Schema(format!(
                    "row `{entry}`: expected I_uA:d"
                ))),
            }
        })
        .collect()
}

/// Parse `nu_kHz:N[:a1d_nm]` rows into (ω [rad/s], N, a1D [m]).
pub fn parse_table2_rows(rows: &str) -> Result<Vec<(f64, u64, Option<f64>)>, ConfigError> {
    rows.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|entry| {
            let parts: Vec<&str> = entry.trim().split(':').collect();
            let (nu, n, a) = match parts.as_slice() {
                [nu, n] => (nu, n, None),
                [nu, n, a] => (nu, n, Some(a)),
                _ => {
                    return Err(ConfigError::Schema(format!(
                        "row `{entry}`: expected nu_kHz:N[:a1d_nm]"
                    )))
                }
            };
            let n: u64 = n
                .trim()
                .parse()
                .map_err(|_| ConfigError::Schema(format!("row `{entry}`: N must be an integer")))?;
            let a = a.map(|a| number(a, entry)).transpose()?.map(|a| a * 1e-9);
            Ok((2.0 * PI * 1e3 * number(nu, entry)?, n, a))
        })
        .collect()
}

fn number(s: &str, entry: &str) -> Result<f64, ConfigError> {
    s.trim()
        .parse()
        .map_err(|_| ConfigError::Schema(format!("row `{entry}`: `{s}` is not a number")))
}

fn scale_opt(v: Option<f64>, k: f64) -> Option<f64> {
    v.map(|x| x * k)
}

impl RunConfig {
    /// Parse a JSON configuration file.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))
    }

    /// Parse the parameters for the command without unit conversion.
    pub fn typed_params(&self) -> Result<Params, ConfigError> {
        let p = &self.params;
        Ok(match self.command {
            CommandName::Single => Params::Single(parse_params(p)?),
            CommandName::SweepTable1 => Params::Table1(parse_params(p)?),
            CommandName::Gas => Params::Gas(parse_params(p)?),
            CommandName::SweepTable2 => Params::Table2(parse_params(p)?),
            CommandName::Stability => Params::Stability(parse_params(p)?),
            CommandName::Double => Params::Double(parse_params(p)?),
            CommandName::Fig3 => Params::Fig3(parse_params(p)?),
            CommandName::Grid => Params::Grid(parse_params(p)?),
        })
    }

    /// Rewrite `params` in canonical form (defaults filled, key order fixed)
    /// so a flag-built and a file-built config echo identically.
    pub fn normalized(mut self) -> Result<Self, ConfigError> {
        let typed = self.typed_params()?;
        self.params =
            serde_json::to_value(typed).map_err(|e| ConfigError::Schema(e.to_string()))?;
        Ok(self)
    }

    /// Convert to SI and apply overrides. Does not check physical bounds.
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let s = self.units.scale();
        let params = match self.typed_params()? {
            Params::Single(p) => Params::Single(SingleParams {
                current: p.current * s.current,
                bx: scale_opt(p.bx, s.field),
                bz: scale_opt(p.bz, s.field),
                ..p
            }),
            Params::Table1(p) => Params::Table1(p),
            Params::Gas(p) => Params::Gas(GasParams {
                omega: p.omega * s.frequency,
                omega_z: scale_opt(p.omega_z, s.frequency),
                a1d: scale_opt(p.a1d, s.length),
                ..p
            }),
            Params::Table2(p) => Params::Table2(Table2Params {
                omega_z: scale_opt(p.omega_z, s.frequency),
                ..p
            }),
            Params::Stability(p) => Params::Stability(StabilityParams {
                current: p.current * s.current,
                pair_x0: scale_opt(p.pair_x0, s.length),
                casimir_r: scale_opt(p.casimir_r, s.length),
                ..p
            }),
            Params::Double(p) => Params::Double(DoubleParams {
                current: p.current * s.current,
                x0: p.x0 * s.length,
                y0: p.y0 * s.length,
                ..p
            }),
            Params::Fig3(p) => Params::Fig3(Fig3Params {
                current: p.current * s.current,
                x0: p.x0 * s.length,
                match_current: scale_opt(p.match_current, s.current),
                ..p
            }),
            Params::Grid(p) => Params::Grid(GridParams {
                current: p.current * s.current,
                x0: scale_opt(p.x0, s.length),
                y0: scale_opt(p.y0, s.length),
                ..p
            }),
        };
        Ok(Resolved {
            command: self.command,
            params,
            species: merge(default_rb87(), &self.species, "species")?,
            wire: merge(default_mwnt(), &self.wire, "wire")?,
            tolerances: merge(ToleranceConfig::default(), &self.tolerances, "tolerances")?,
        })
    }
}

/// Every precondition the run would trip over; empty means the run can
/// proceed.
pub fn validate(config: &RunConfig) -> Result<Vec<Violation>, ConfigError> {
    let r = config.resolve()?;
    let mut out = Vec::new();
    for res in [
        r.species.validate(),
        r.wire.validate(),
        r.tolerances.validate(),
    ] {
        if let Err(e) = res {
            out.extend(Violation::from_error(&e));
        }
    }
    if out.is_empty() {
        if let Err(e) = crate::commands::prepare(&r) {
            out.extend(e.violation());
        }
    }
    Ok(out)
}
