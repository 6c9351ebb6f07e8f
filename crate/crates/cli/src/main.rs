#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nanoguide::constants::{Dataset, PhysicalConstants};
use serde_json::{json, Map, Value};

use config::{CommandName, ConfigError, Format, RunConfig, Units};

const EXIT_NUMERICAL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nanoguide",
    version,
    about = "Design nanowire atom traps and guides"
)]
struct Cli {
    /// JSON run configuration; replaces the subcommand and its flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Unit system for input parameters.
    #[arg(long, global = true, value_enum)]
    units: Option<Units>,

    /// Output file; `-` writes to stdout.
    #[arg(long, global = true)]
    output: Option<String>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Species override, `key=value`.
    #[arg(long, global = true, value_parser = key_value)]
    species: Vec<(String, f64)>,

    /// Wire override, `key=value`.
    #[arg(long, global = true, value_parser = key_value)]
    wire: Vec<(String, f64)>,

    /// Tolerance override, `key=value`.
    #[arg(long = "tol", global = true, value_parser = key_value)]
    tolerances: Vec<(String, f64)>,

    /// Only check preconditions and print the violations as JSON.
    #[arg(long, global = true)]
    validate: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

fn key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}`: expected key=value"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One single-wire trap.
    Single(SingleArgs),
    /// Single-wire traps over a list of (I, d) rows.
    SweepTable1(Table1Args),
    /// Regime and cloud length of a trapped 1D gas.
    Gas(GasArgs),
    /// Gas characterization over a list of rows.
    SweepTable2(Table2Args),
    /// Loss, heating and decoherence budget of a single-wire trap.
    Stability(StabilityArgs),
    /// One two-wire double-well trap.
    Double(DoubleArgs),
    /// Tunneling rate against well separation.
    Fig3(Fig3Args),
    /// Potential sampled on a grid.
    Grid(GridArgs),
}

#[derive(Args, Debug)]
#[command(rename_all = "snake_case")]
struct SingleArgs {
    #[arg(long = "I")]
    current: f64,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long = "Bx")]
    bx: Option<f64>,
    #[arg(long = "Bz")]
    bz: Option<f64>,
}

#[derive(Args, Debug)]
#[command(rename_all = "snake_case")]
struct Table1Args {
    #[arg(long)]
    chi: f64,
    /// `I_uA:d` pairs separated by commas.
    #[arg(long)]
    rows: String,
}

#[derive(Args, Debug)]
#[command(rename_all = "snake_case")]
struct GasArgs {
    #[arg(long)]
    omega: f64,
    #[arg(long)]
    omega_z: Option<f64>,
    #[arg(long = "N")]
    n: u64,
    #[arg(long)]
    a1d: Option<f64>,
}

#[derive(Args, Debug)]
#[command(rename_all = "snake_case")]
struct Table2Args {
    #[arg(long)]
    omega_z: Option<f64>,
    /// `nu_kHz:N[:a1d_nm]` entries separated by commas.
    #[arg(long)]
    rows: String,
}

#[derive(Args, Debug)]
#[command(rename_all = "snake_case")]
struct StabilityArgs {
    #[arg(long = "I")]
    current: f64,
    #[arg(long)]
    d: f64,
    #[arg(long)]
    chi: f64,
    #[arg(long = "T")]
    temperature: Option<f64>,
    #[arg(long)]
    pair_x0: Option<f64>,
    #[arg(long)]
    casimir_r: Option<f64>,
    #[arg(long = "C4")]
    c4: Option<f64>,
    #[arg(long = "S_I")]
    noise: Option<f64>,
}

#[derive(Args, Debug)]
#[command(rename_all = "snake_case")]
struct DoubleArgs {
    #[arg(long = "I")]
    current: f64,
    #[arg(long)]
    x0: f64,
    #[arg(long)]
    y0: f64,
    #[arg(long)]
    chi: f64,
}

#[derive(Args, Debug)]
#[command(rename_all = "snake_case")]
struct Fig3Args {
    #[arg(long = "I")]
    current: f64,
    #[arg(long)]
    x0: f64,
    #[arg(long)]
    chi: f64,
    #[arg(long)]
    ratio_min: Option<f64>,
    #[arg(long)]
    ratio_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long = "match_I")]
    match_current: Option<f64>,
}

#[derive(Args, Debug)]
#[command(rename_all = "snake_case")]
struct GridArgs {
    #[arg(long, value_parser = ["single", "double"])]
    mode: String,
    #[arg(long = "I")]
    current: f64,
    #[arg(long)]
    chi: f64,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    y0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_max: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
}

/// Insert the present entries into a JSON object.
fn object(entries: &[(&str, Option<Value>)]) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        if let Some(v) = v {
            m.insert(k.to_string(), v.clone());
        }
    }
    Value::Object(m)
}

fn some<T: Into<Value>>(v: T) -> Option<Value> {
    Some(v.into())
}

fn opt<T: Into<Value>>(v: Option<T>) -> Option<Value> {
    v.map(Into::into)
}

impl Command {
    fn to_params(&self) -> (CommandName, Value) {
        match self {
            Command::Single(a) => (
                CommandName::Single,
                object(&[
                    ("I", some(a.current)),
                    ("d", opt(a.d)),
                    ("chi", opt(a.chi)),
                    ("Bx", opt(a.bx)),
                    ("Bz", opt(a.bz)),
                ]),
            ),
            Command::SweepTable1(a) => (
                CommandName::SweepTable1,
                object(&[("chi", some(a.chi)), ("rows", some(a.rows.clone()))]),
            ),
            Command::Gas(a) => (
                CommandName::Gas,
                object(&[
                    ("omega", some(a.omega)),
                    ("omega_z", opt(a.omega_z)),
                    ("N", some(a.n)),
                    ("a1d", opt(a.a1d)),
                ]),
            ),
            Command::SweepTable2(a) => (
                CommandName::SweepTable2,
                object(&[("omega_z", opt(a.omega_z)), ("rows", some(a.rows.clone()))]),
            ),
            Command::Stability(a) => (
                CommandName::Stability,
                object(&[
                    ("I", some(a.current)),
                    ("d", some(a.d)),
                    ("chi", some(a.chi)),
                    ("T", opt(a.temperature)),
                    ("pair_x0", opt(a.pair_x0)),
                    ("casimir_r", opt(a.casimir_r)),
                    ("C4", opt(a.c4)),
                    ("S_I", opt(a.noise)),
                ]),
            ),
            Command::Double(a) => (
                CommandName::Double,
                object(&[
                    ("I", some(a.current)),
                    ("x0", some(a.x0)),
                    ("y0", some(a.y0)),
                    ("chi", some(a.chi)),
                ]),
            ),
            Command::Fig3(a) => (
                CommandName::Fig3,
                object(&[
                    ("I", some(a.current)),
                    ("x0", some(a.x0)),
                    ("chi", some(a.chi)),
                    ("ratio_min", opt(a.ratio_min)),
                    ("ratio_max", opt(a.ratio_max)),
                    ("points", opt(a.points)),
                    ("match_I", opt(a.match_current)),
                ]),
            ),
            Command::Grid(a) => (
                CommandName::Grid,
                object(&[
                    ("mode", some(a.mode.clone())),
                    ("I", some(a.current)),
                    ("chi", some(a.chi)),
                    ("d", opt(a.d)),
                    ("x0", opt(a.x0)),
                    ("y0", opt(a.y0)),
                    ("x_min", opt(a.x_min)),
                    ("x_max", opt(a.x_max)),
                    ("y_min", opt(a.y_min)),
                    ("y_max", opt(a.y_max)),
                    ("nx", opt(a.nx)),
                    ("ny", opt(a.ny)),
                ]),
            ),
        }
    }
}

enum Failure {
    Invalid(String),
    Io(String),
    Numerical(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        let (msg, code) = match self {
            Failure::Invalid(m) => (m, EXIT_INVALID),
            Failure::Io(m) => (m, EXIT_IO),
            Failure::Numerical(m) => (m, EXIT_NUMERICAL),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<commands::CommandError> for Failure {
    fn from(e: commands::CommandError) -> Self {
        if e.violation().is_some() || matches!(e, commands::CommandError::Config(_)) {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn overrides(pairs: &[(String, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().cloned().collect()
}

/// Assemble the run configuration: file first, then flags on top.
fn build_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match (&cli.config, &cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        (Some(_), Some(_)) => {
            return Err(Failure::Invalid(
                "--config cannot be combined with a subcommand".to_string(),
            ))
        }
        (None, Some(cmd)) => {
            let (command, params) = cmd.to_params();
            RunConfig {
                command,
                params,
                units: Units::default(),
                format: Format::default(),
                output: "-".to_string(),
                species: BTreeMap::new(),
                wire: BTreeMap::new(),
                tolerances: BTreeMap::new(),
            }
        }
        (None, None) => {
            return Err(Failure::Invalid(
                "a subcommand or --config is required".to_string(),
            ))
        }
    };
    if let Some(u) = cli.units {
        cfg.units = u;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = &cli.output {
        cfg.output = o.clone();
    }
    cfg.species.extend(overrides(&cli.species));
    cfg.wire.extend(overrides(&cli.wire));
    cfg.tolerances.extend(overrides(&cli.tolerances));
    Ok(cfg.normalized()?)
}

/// Write atomically through a temporary file in the target directory.
fn write_output(target: &str, body: &[u8]) -> Result<(), Failure> {
    if target == "-" {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(body)
            .and_then(|_| out.flush())
            .map_err(|e| Failure::Io(format!("stdout: {e}")));
    }
    let path = Path::new(target);
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::Io(format!("{target}: {e}"));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(body).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = build_config(cli)?;
    if cli.validate {
        let violations = config::validate(&cfg)?;
        let body = serde_json::to_string_pretty(&violations).expect("violations serialize") + "\n";
        write_output(&cfg.output, body.as_bytes())?;
        return if violations.is_empty() {
            Ok(())
        } else {
            Err(Failure::Invalid(format!(
                "{} precondition(s) violated",
                violations.len()
            )))
        };
    }
    let resolved = cfg.resolve()?;
    resolved
        .species
        .validate()
        .and_then(|_| resolved.wire.validate())
        .and_then(|_| resolved.tolerances.validate())
        .map_err(commands::CommandError::from)?;
    let plan = commands::prepare(&resolved)?;
    let output = commands::execute(plan, &resolved)?;
    if let Some(w) = output.data.get("warnings").and_then(Value::as_array) {
        for line in w.iter().filter_map(Value::as_str) {
            eprintln!("warning: {line}");
        }
    }
    let body = match cfg.format {
        Format::Csv => output.csv,
        Format::Json => {
            let doc = json!({
                "meta": {
                    "constants": PhysicalConstants::VERSION,
                    "dataset_version": Dataset::builtin().version,
                    "tool_version": env!("CARGO_PKG_VERSION"),
                    "config": cfg,
                },
                "data": output.data,
            });
            serde_json::to_string_pretty(&doc).expect("output serializes") + "\n"
        }
    };
    write_output(&cfg.output, body.as_bytes())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
