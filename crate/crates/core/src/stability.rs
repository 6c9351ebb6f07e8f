//! Destructive-effect budget for a single-wire trap: Majorana loss,
//! current-noise spin flips, thermal wire vibrations, current-noise
//! decoherence, the Casimir-Polder scale and magnetostatic wire deflection.
//!
//! Contact electric fields are not modelled.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{AtomSpecies, NanowireSpec, CODATA};
use crate::error::{require_positive, Error, Result};
use crate::singlewell::SingleWellTrap;

/// First root of cos β cosh β = 1 (clamped-clamped beam).
pub const BETA1: f64 = 4.73;

/// C4 for ⁸⁷Rb in front of a metal plane [J·m⁴].
pub const C4_RB87_METAL: f64 = 1.8e-55;

/// Current noise spectral density S_I(ω_L).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseSpectrum {
    /// White shot noise of a diffusive wire, S_I = 2eI/3, valid for
    /// ħω_L ≪ k_B T ≪ eV0.
    ShotNoiseDiffusive,
    /// Fixed S_I [A²·s], e.g. zero for an ideal supercurrent.
    UserConstant { s_i: f64 },
}

impl NoiseSpectrum {
    pub fn density(&self, current: f64) -> f64 {
        match *self {
            NoiseSpectrum::ShotNoiseDiffusive => 2.0 * CODATA.e * current / 3.0,
            NoiseSpectrum::UserConstant { s_i } => s_i,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpectrum::UserConstant { s_i } if !(s_i >= 0.0 && s_i.is_finite()) => {
                Err(Error::InvalidParameter {
                    module: "stability",
                    parameter: "S_I",
                    value: s_i,
                    bound: ">= 0",
                })
            }
            _ => Ok(()),
        }
    }
}

/// γ_sf = (μ0μ/(2πħy0))²·S_I/2 for a wire at distance y0.
pub fn spin_flip_rate(
    current: f64,
    y0: f64,
    spectrum: &NoiseSpectrum,
    species: &AtomSpecies,
) -> Result<f64> {
    require_positive("stability", "I", current)?;
    require_positive("stability", "y0", y0)?;
    spectrum.validate()?;
    let coupling = CODATA.mu0 * species.moment() / (2.0 * PI * CODATA.hbar * y0);
    Ok(coupling * coupling * spectrum.density(current) / 2.0)
}

pub fn noise_spin_flip_rate(
    trap: &SingleWellTrap,
    spectrum: &NoiseSpectrum,
    species: &AtomSpecies,
) -> Result<f64> {
    spin_flip_rate(trap.current, trap.y0, spectrum, species)
}

fn require_temperature(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            module: "stability",
            parameter: "T",
            value: t,
            bound: ">= 0",
        })
    }
}

/// RMS midpoint displacement σ = √(k_B T L³/(192 Y M_I)) [m].
pub fn thermal_sigma(wire: &NanowireSpec, temperature: f64) -> Result<f64> {
    require_temperature(temperature)?;
    wire.validate()?;
    Ok((CODATA.kb * temperature * wire.length.powi(3)
        / (192.0 * wire.young * wire.moment_of_inertia()))
    .sqrt())
}

/// ω_f = (β1²/L²)·√(Y M_I/(ρ A_c)) [rad/s], clamped-clamped first mode.
pub fn fundamental_mode_frequency(wire: &NanowireSpec) -> Result<f64> {
    wire.validate()?;
    Ok(BETA1 * BETA1 / wire.length.powi(2)
        * (wire.young * wire.moment_of_inertia() / wire.lineal_density()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyMismatch {
    /// ω_f/ω.
    pub ratio: f64,
    /// ratio > threshold.
    pub decoupled: bool,
}

pub const DEFAULT_MISMATCH_THRESHOLD: f64 = 10.0;

pub fn frequency_mismatch(omega_trap: f64, omega_f: f64, threshold: f64) -> FrequencyMismatch {
    let ratio = omega_f / omega_trap;
    FrequencyMismatch {
        ratio,
        decoupled: ratio > threshold,
    }
}

pub fn frequency_mismatch_flag(
    trap: &SingleWellTrap,
    wire: &NanowireSpec,
) -> Result<FrequencyMismatch> {
    Ok(frequency_mismatch(
        trap.omega,
        fundamental_mode_frequency(wire)?,
        DEFAULT_MISMATCH_THRESHOLD,
    ))
}

/// γ_c/ω = (3π/4ħ)·k_B T·σ0A/y0³·(μ0μB/2π)²·χ/(ħω).
///
/// The Bohr magneton (not the species moment) enters, as in the original
/// near-field noise estimate.
pub fn current_noise_decoherence(
    trap: &SingleWellTrap,
    wire: &NanowireSpec,
    temperature: f64,
) -> Result<f64> {
    require_temperature(temperature)?;
    wire.validate()?;
    let hbar = CODATA.hbar;
    let coupling = CODATA.mu0 * CODATA.mu_b / (2.0 * PI);
    Ok(
        3.0 * PI / (4.0 * hbar)
            * CODATA.kb
            * temperature
            * wire.conductivity
            * wire.conduction_area
            / trap.y0.powi(3)
            * coupling
            * coupling
            * trap.chi
            / (hbar * trap.omega),
    )
}

/// |V_CP|/ħ = C4/(ħr⁴) for an infinite plane [rad/s]. A scale only: a
/// nanotube is not a plane, so this is never added to the trap potential.
pub fn casimir_polder_scale(r: f64, c4: f64) -> Result<f64> {
    require_positive("stability", "r", r)?;
    if !(c4 >= 0.0 && c4.is_finite()) {
        return Err(Error::InvalidParameter {
            module: "stability",
            parameter: "C4",
            value: c4,
            bound: ">= 0",
        });
    }
    Ok(c4 / (CODATA.hbar * r.powi(4)))
}

/// Repulsive line force between two co-propagating wires 2x0 apart [N/m].
pub fn deflection_line_load(current: f64, x0: f64) -> f64 {
    CODATA.mu0 * current * current / (4.0 * PI * x0)
}

/// Static deflection of a clamped-clamped wire under the mutual repulsion of
/// a wire pair, φ(z) = μ0I²z²(L−z)²/(96π Y M_I x0) [m].
pub fn static_deflection(z: f64, wire: &NanowireSpec, current: f64, x0: f64) -> Result<f64> {
    wire.validate()?;
    require_positive("stability", "I", current)?;
    require_positive("stability", "x0", x0)?;
    if !(0.0..=wire.length).contains(&z) {
        return Err(Error::InvalidParameter {
            module: "stability",
            parameter: "z",
            value: z,
            bound: "0 <= z <= L",
        });
    }
    let s = z * (wire.length - z);
    Ok(CODATA.mu0 * current * current * s * s
        / (96.0 * PI * wire.young * wire.moment_of_inertia() * x0))
}

/// Pass/fail limits for [`stability_report`]. Each is roughly an order of
/// magnitude looser than the values expected for a sensible design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub loss_per_osc: f64,
    /// [1/s]
    pub gamma_sf: f64,
    /// Minimum ω_f/ω.
    pub mismatch: f64,
    pub gamma_c_over_omega: f64,
    /// Maximum σ/l0.
    pub sigma_over_l0: f64,
    /// Maximum φ(L/2)/x0.
    pub deflection_over_x0: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            loss_per_osc: 1e-5,
            gamma_sf: 1.0,
            mismatch: DEFAULT_MISMATCH_THRESHOLD,
            gamma_c_over_omega: 1e-6,
            sigma_over_l0: 0.1,
            deflection_over_x0: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub value: f64,
    pub unit: &'static str,
    /// Limit the value is compared against; `None` for informational entries.
    pub threshold: Option<f64>,
    pub pass: bool,
}

impl Metric {
    fn below(value: f64, unit: &'static str, threshold: f64) -> Self {
        Self {
            value,
            unit,
            threshold: Some(threshold),
            pass: value < threshold,
        }
    }

    fn above(value: f64, unit: &'static str, threshold: f64) -> Self {
        Self {
            value,
            unit,
            threshold: Some(threshold),
            pass: value > threshold,
        }
    }

    fn info(value: f64, unit: &'static str) -> Self {
        Self {
            value,
            unit,
            threshold: None,
            pass: true,
        }
    }
}

/// Everything the report is computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityInputs {
    pub trap: SingleWellTrap,
    pub wire: NanowireSpec,
    /// [K]
    pub temperature: f64,
    pub spectrum: NoiseSpectrum,
    /// Half-separation of a wire pair [m]; enables the deflection entry.
    pub pair_half_distance: Option<f64>,
    /// Surface distance for the Casimir-Polder scale [m].
    pub casimir_distance: f64,
    pub c4: f64,
    pub budget: Budget,
}

impl StabilityInputs {
    pub fn new(trap: SingleWellTrap, wire: NanowireSpec, temperature: f64) -> Self {
        Self {
            trap,
            wire,
            temperature,
            spectrum: NoiseSpectrum::ShotNoiseDiffusive,
            pair_half_distance: None,
            casimir_distance: 1e-6,
            c4: C4_RB87_METAL,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub loss_per_osc: Metric,
    pub adiabaticity: Metric,
    pub gamma_sf: Metric,
    pub sigma_thermal: Metric,
    pub omega_f: Metric,
    pub frequency_mismatch: Metric,
    pub gamma_c_over_omega: Metric,
    pub v_cp_scale: Metric,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deflection_max: Option<Metric>,
    pub inputs: StabilityInputs,
}

impl StabilityReport {
    pub fn all_pass(&self) -> bool {
        self.metrics().iter().all(|(_, m)| m.pass)
    }

    pub fn metrics(&self) -> Vec<(&'static str, &Metric)> {
        let mut out = vec![
            ("loss_per_osc", &self.loss_per_osc),
            ("adiabaticity", &self.adiabaticity),
            ("gamma_sf", &self.gamma_sf),
            ("sigma_thermal", &self.sigma_thermal),
            ("omega_f", &self.omega_f),
            ("frequency_mismatch", &self.frequency_mismatch),
            ("gamma_c_over_omega", &self.gamma_c_over_omega),
            ("v_cp_scale", &self.v_cp_scale),
        ];
        if let Some(d) = &self.deflection_max {
            out.push(("deflection_max", d));
        }
        out
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.metrics()
            .into_iter()
            .filter(|(_, m)| !m.pass)
            .map(|(name, _)| name)
            .collect()
    }
}

pub fn stability_report(inputs: StabilityInputs, species: &AtomSpecies) -> Result<StabilityReport> {
    let StabilityInputs {
        trap,
        wire,
        temperature,
        spectrum,
        pair_half_distance,
        casimir_distance,
        c4,
        budget,
    } = inputs.clone();

    let omega_f = fundamental_mode_frequency(&wire)?;
    let sigma = thermal_sigma(&wire, temperature)?;
    let deflection_max = match pair_half_distance {
        Some(x0) => Some(Metric::below(
            static_deflection(wire.length / 2.0, &wire, trap.current, x0)?,
            "m",
            budget.deflection_over_x0 * x0,
        )),
        None => None,
    };
    Ok(StabilityReport {
        loss_per_osc: Metric::below(trap.loss_per_oscillation(), "1", budget.loss_per_osc),
        adiabaticity: Metric::below(trap.chi, "1", 1.0),
        gamma_sf: Metric::below(
            noise_spin_flip_rate(&trap, &spectrum, species)?,
            "1/s",
            budget.gamma_sf,
        ),
        sigma_thermal: Metric::below(sigma, "m", budget.sigma_over_l0 * trap.l0),
        omega_f: Metric::info(omega_f, "rad/s"),
        frequency_mismatch: Metric::above(omega_f / trap.omega, "1", budget.mismatch),
        gamma_c_over_omega: Metric::below(
            current_noise_decoherence(&trap, &wire, temperature)?,
            "1",
            budget.gamma_c_over_omega,
        ),
        v_cp_scale: Metric::info(casimir_polder_scale(casimir_distance, c4)?, "rad/s"),
        deflection_max,
        inputs,
    })
}
