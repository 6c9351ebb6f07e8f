//! Physical constants, atom species and nanowire material data.
//!
//! All quantities are SI. Every module reads its constants from [`CODATA`];
//! presentation units only appear in the CLI.
//!
//! The default species and wire live in `data/defaults.json`, which is
//! compiled into the crate. The wire values are calibration targets: they are
//! chosen so that the fundamental flexural mode of a 10 μm suspended tube sits
//! near 2π×11.9 MHz and its room-temperature midpoint jitter near 0.2-0.3 nm,
//! not measured material properties.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fundamental constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Vacuum permeability [T·m/A].
    pub mu0: f64,
    /// Reduced Planck constant [J·s].
    pub hbar: f64,
    /// Boltzmann constant [J/K].
    pub kb: f64,
    /// Bohr magneton [J/T].
    pub mu_b: f64,
    /// Elementary charge [C].
    pub e: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 recommended values.
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        mu0: 1.256_637_062_12e-6,
        hbar: 1.054_571_817e-34,
        kb: 1.380_649e-23,
        mu_b: 9.274_010_078_3e-24,
        e: 1.602_176_634e-19,
    };

    pub const VERSION: &'static str = "CODATA 2018";
}

/// The constants table shared by every module.
pub const CODATA: PhysicalConstants = PhysicalConstants::CODATA_2018;

/// Atomic mass unit [kg], CODATA 2018.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// An atom in a fixed hyperfine state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpecies {
    #[serde(rename = "mass_kg")]
    pub mass: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "mF")]
    pub m_f: f64,
    #[serde(rename = "gF")]
    pub g_f: f64,
    /// 3D s-wave scattering length [m].
    #[serde(rename = "a3d_m")]
    pub a3d: f64,
}

impl AtomSpecies {
    /// Magnetic moment μ = mF·gF·μB [J/T].
    pub fn moment(&self) -> f64 {
        self.m_f * self.g_f * CODATA.mu_b
    }

    pub fn with_scattering_length(mut self, a3d: f64) -> Self {
        self.a3d = a3d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(invalid("mass_kg", self.mass, "> 0"));
        }
        if self.m_f.abs() > self.f {
            return Err(invalid("mF", self.m_f, "|mF| <= F"));
        }
        if !(self.moment() > 0.0) {
            return Err(invalid(
                "gF",
                self.g_f,
                "mF*gF > 0 (weak-field seeking state)",
            ));
        }
        if !self.a3d.is_finite() {
            return Err(invalid("a3d_m", self.a3d, "finite"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let species: AtomSpecies =
            serde_json::from_str(text).map_err(|e| Error::Dataset(e.to_string()))?;
        species.validate()?;
        Ok(species)
    }
}

/// Geometry and material of a suspended, doubly clamped nanowire.
///
/// The moment of inertia, cross-section and lineal density are always derived
/// from the radii, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NanowireSpec {
    /// Suspended length [m].
    #[serde(rename = "L_m")]
    pub length: f64,
    /// Total length including the supported parts [m].
    #[serde(rename = "Ltot_m")]
    pub total_length: f64,
    #[serde(rename = "r_o_m")]
    pub outer_radius: f64,
    #[serde(rename = "r_i_m")]
    pub inner_radius: f64,
    /// Young's modulus [Pa].
    #[serde(rename = "Y_Pa")]
    pub young: f64,
    /// Mass density [kg/m³].
    #[serde(rename = "rho_kg_m3")]
    pub density: f64,
    /// Conductivity [S/m].
    #[serde(rename = "sigma0_S_m")]
    pub conductivity: f64,
    /// Area through which the current flows [m²].
    #[serde(rename = "A_m2")]
    pub conduction_area: f64,
}

impl NanowireSpec {
    /// Areal moment of inertia π(r_o⁴ − r_i⁴)/4 [m⁴].
    pub fn moment_of_inertia(&self) -> f64 {
        PI * (self.outer_radius.powi(4) - self.inner_radius.powi(4)) / 4.0
    }

    /// Cross-sectional area π(r_o² − r_i²) [m²].
    pub fn cross_section(&self) -> f64 {
        PI * (self.outer_radius.powi(2) - self.inner_radius.powi(2))
    }

    /// Mass per unit length [kg/m].
    pub fn lineal_density(&self) -> f64 {
        self.density * self.cross_section()
    }

    pub fn with_length(mut self, length: f64) -> Self {
        self.length = length;
        if self.total_length < length {
            self.total_length = length;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("L_m", self.length),
            ("r_o_m", self.outer_radius),
            ("Y_Pa", self.young),
            ("rho_kg_m3", self.density),
            ("sigma0_S_m", self.conductivity),
            ("A_m2", self.conduction_area),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, value, "> 0"));
            }
        }
        if !(self.inner_radius >= 0.0 && self.inner_radius < self.outer_radius) {
            return Err(invalid("r_i_m", self.inner_radius, "0 <= r_i < r_o"));
        }
        if !(self.length <= self.total_length) {
            return Err(invalid("Ltot_m", self.total_length, "L <= Ltot"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: NanowireSpec =
            serde_json::from_str(text).map_err(|e| Error::Dataset(e.to_string()))?;
        wire.validate()?;
        Ok(wire)
    }
}

fn invalid(parameter: &'static str, value: f64, bound: &'static str) -> Error {
    Error::InvalidParameter {
        module: "constants",
        parameter,
        value,
        bound,
    }
}

/// A versioned collection of species and wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub version: String,
    pub species: BTreeMap<String, AtomSpecies>,
    pub wires: BTreeMap<String, NanowireSpec>,
}

const BUILTIN_DATASET: &str = include_str!("../data/defaults.json");

impl Dataset {
    pub fn from_json(text: &str) -> Result<Self> {
        let dataset: Dataset =
            serde_json::from_str(text).map_err(|e| Error::Dataset(e.to_string()))?;
        for species in dataset.species.values() {
            species.validate()?;
        }
        for wire in dataset.wires.values() {
            wire.validate()?;
        }
        Ok(dataset)
    }

    /// The compiled-in dataset.
    pub fn builtin() -> &'static Dataset {
        static DATASET: OnceLock<Dataset> = OnceLock::new();
        DATASET.get_or_init(|| {
            Dataset::from_json(BUILTIN_DATASET).expect("bundled defaults.json is valid")
        })
    }
}

/// ⁸⁷Rb in |F, mF⟩ = |2, 2⟩ (gF = 1/2, so μ = μB), a3d = 5.3 nm.
pub fn default_rb87() -> AtomSpecies {
    Dataset::builtin().species["rb87"]
}

/// Calibrated multiwall nanotube: solid 24 nm radius, 10 μm suspended.
pub fn default_mwnt() -> NanowireSpec {
    Dataset::builtin().wires["mwnt"]
}
