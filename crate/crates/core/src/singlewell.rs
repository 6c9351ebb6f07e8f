//! Single-wire waveguide design.
//!
//! A wire at (−x0, 0) with current I and a transverse bias Bx = μ0I/(2πy0)
//! produces a line of vanishing transverse field at (−x0, y0). The
//! longitudinal bias Bz lifts the floor to μBz and sets the adiabaticity
//! parameter χ = ħω/(μBz) = ω/ω_L.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{AtomSpecies, CODATA};
use crate::error::{require_chi, require_positive, Error, Result};
use crate::magnetics::{self, format_sci, BiasFields, DimensionlessPoint, WireLayout};
use crate::numerics::{self, ToleranceConfig};

/// Below this d the harmonic picture breaks down and the escape barrier is
/// only a few ħω.
pub const CONFINING_D: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confinement {
    Confining,
    Weak,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DesignWarning {
    /// d below [`CONFINING_D`]; the numbers are still produced.
    WeakConfinement { d: f64 },
}

impl std::fmt::Display for DesignWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DesignWarning::WeakConfinement { d } => write!(
                f,
                "d = {d} < {CONFINING_D}: harmonic approximation unreliable, escape barrier is small"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleWellTrap {
    /// Wire current [A].
    pub current: f64,
    /// Wire axis sits at (−x0, 0) [m].
    pub x0: f64,
    /// Cloud-wire distance [m].
    pub y0: f64,
    /// Transverse trap angular frequency [rad/s].
    pub omega: f64,
    /// Oscillator length √(ħ/mω) [m].
    pub l0: f64,
    pub d: f64,
    pub chi: f64,
    pub bx: f64,
    pub bz: f64,
    /// Majorana loss rate [1/s].
    pub loss_rate: f64,
    /// Larmor angular frequency μBz/ħ [rad/s].
    pub omega_larmor: f64,
}

/// ω = (mχμ²/ħ³)(μ0I/(2πd²))².
fn omega_from_current_and_d(current: f64, d: f64, chi: f64, species: &AtomSpecies) -> f64 {
    let mu = species.moment();
    let k = CODATA.mu0 * current / (2.0 * PI * d * d);
    species.mass * chi * mu * mu / CODATA.hbar.powi(3) * k * k
}

pub fn oscillator_length(omega: f64, species: &AtomSpecies) -> f64 {
    (CODATA.hbar / (species.mass * omega)).sqrt()
}

/// Γ_loss ≈ (πω/2)·exp(1 − 1/χ).
pub fn majorana_loss_rate(omega: f64, chi: f64) -> Result<f64> {
    require_positive("singlewell", "omega", omega)?;
    require_chi(chi)?;
    Ok(0.5 * PI * omega * (1.0 - 1.0 / chi).exp())
}

/// Height of V(∞) = χ⁻¹(1 + χd²)^½ above the trap floor 1/χ, in units of ħω.
pub fn escape_barrier(d: f64, chi: f64) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter {
            module: "singlewell",
            parameter: "d",
            value: d,
            bound: ">= 0",
        });
    }
    require_positive("singlewell", "chi", chi)?;
    // χ⁻¹(√(1+χd²) − 1) without the cancellation
    Ok(d * d / ((1.0 + chi * d * d).sqrt() + 1.0))
}

impl SingleWellTrap {
    /// Design from the current, the dimensionless distance d = y0/l0 and χ.
    pub fn from_current_and_d(
        current: f64,
        d: f64,
        chi: f64,
        species: &AtomSpecies,
    ) -> Result<Self> {
        require_positive("singlewell", "I", current)?;
        require_positive("singlewell", "d", d)?;
        require_chi(chi)?;
        species.validate()?;
        let omega = omega_from_current_and_d(current, d, chi, species);
        let l0 = oscillator_length(omega, species);
        let y0 = d * l0;
        let mu = species.moment();
        let bz = CODATA.hbar * omega / (mu * chi);
        let bx = CODATA.mu0 * current / (2.0 * PI * y0);
        Ok(Self {
            current,
            x0: 0.0,
            y0,
            omega,
            l0,
            d,
            chi,
            bx,
            bz,
            loss_rate: majorana_loss_rate(omega, chi)?,
            omega_larmor: mu * bz / CODATA.hbar,
        })
    }

    /// Design from the current and the two bias fields.
    pub fn from_fields(current: f64, bx: f64, bz: f64, species: &AtomSpecies) -> Result<Self> {
        require_positive("singlewell", "I", current)?;
        require_positive("singlewell", "Bx", bx)?;
        require_positive("singlewell", "Bz", bz)?;
        species.validate()?;
        let k = CODATA.mu0 * current / (2.0 * PI);
        let y0 = k / bx;
        let mu = species.moment();
        let omega = (mu / (species.mass * bz)).sqrt() * k / (y0 * y0);
        let chi = CODATA.hbar * omega / (mu * bz);
        require_chi(chi)?;
        let l0 = oscillator_length(omega, species);
        Ok(Self {
            current,
            x0: 0.0,
            y0,
            omega,
            l0,
            d: y0 / l0,
            chi,
            bx,
            bz,
            loss_rate: majorana_loss_rate(omega, chi)?,
            omega_larmor: mu * bz / CODATA.hbar,
        })
    }

    /// Moves the wire to (−x0, 0); the trap geometry relative to it is unchanged.
    pub fn with_wire_offset(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn frequency_hz(&self) -> f64 {
        self.omega / (2.0 * PI)
    }

    pub fn loss_per_oscillation(&self) -> f64 {
        self.loss_rate / self.omega
    }

    pub fn layout(&self) -> WireLayout {
        WireLayout::single(self.x0, self.current).expect("trap current is positive")
    }

    pub fn bias(&self) -> BiasFields {
        BiasFields {
            bx: self.bx,
            bz: self.bz,
        }
    }

    /// Position of the potential minimum [m].
    pub fn minimum(&self) -> [f64; 3] {
        [-self.x0, self.y0, 0.0]
    }

    pub fn confinement(&self) -> Confinement {
        if self.d >= CONFINING_D {
            Confinement::Confining
        } else {
            Confinement::Weak
        }
    }

    pub fn warnings(&self) -> Vec<DesignWarning> {
        match self.confinement() {
            Confinement::Confining => Vec::new(),
            Confinement::Weak => vec![DesignWarning::WeakConfinement { d: self.d }],
        }
    }

    pub fn escape_barrier(&self) -> f64 {
        escape_barrier(self.d, self.chi).expect("trap parameters are valid")
    }

    /// Evaluate the dimensionless potential, with the wire offset x0/l0.
    pub fn dimensionless_potential(&self, p: DimensionlessPoint) -> Result<f64> {
        magnetics::dimensionless_single_potential(p, self.d, self.chi, self.x0 / self.l0)
    }
}

/// Outcome of the finite-difference harmonicity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyCheck {
    /// Numerically located minimum [m].
    pub minimum: [f64; 2],
    /// Distance of the located minimum from (−x0, y0), in units of l0.
    pub drift: f64,
    /// Eigenfrequencies of the Hessian, ascending [rad/s].
    pub omegas: [f64; 2],
    /// max |ω_i/ω − 1|.
    pub max_relative_deviation: f64,
}

/// Locate the minimum of μ|B| by damped Newton from (−x0, y0) and compare
/// the finite-difference Hessian frequencies with the analytic ω.
pub fn numeric_frequency_check(
    trap: &SingleWellTrap,
    species: &AtomSpecies,
    tol: &ToleranceConfig,
) -> Result<FrequencyCheck> {
    let layout = trap.layout();
    let bias = trap.bias();
    let (l0, hw) = (trap.l0, CODATA.hbar * trap.omega);
    // trap units: u = (x + x0)/l0, v = y/l0, energy/ħω
    let to_si = |p: [f64; 2]| [p[0] * l0 - trap.x0, p[1] * l0, 0.0];
    let gradient = |p: [f64; 2]| {
        magnetics::potential_gradient(to_si(p), &layout, &bias, species)
            .map(|g| [g[0] * l0 / hw, g[1] * l0 / hw])
            .unwrap_or([f64::NAN; 2])
    };
    let h_newton = tol.fd_step;
    let hessian = |p: [f64; 2]| {
        let gxp = gradient([p[0] + h_newton, p[1]]);
        let gxm = gradient([p[0] - h_newton, p[1]]);
        let gyp = gradient([p[0], p[1] + h_newton]);
        let gym = gradient([p[0], p[1] - h_newton]);
        let hxx = (gxp[0] - gxm[0]) / (2.0 * h_newton);
        let hyy = (gyp[1] - gym[1]) / (2.0 * h_newton);
        let hxy = 0.5 * ((gxp[1] - gxm[1]) + (gyp[0] - gym[0])) / (2.0 * h_newton);
        [[hxx, hxy], [hxy, hyy]]
    };
    let start = [0.0, trap.d];
    let found = numerics::damped_newton_2d(
        gradient,
        hessian,
        start,
        tol.root_abs_tol,
        tol.max_iterations,
    )?;
    let drift = (found[0] - start[0]).hypot(found[1] - start[1]);
    if !(drift <= 1e-3) {
        return Err(Error::MinimumDrift { drift });
    }

    let excess = |u: f64, v: f64| {
        magnetics::zeeman_excess_at(to_si([u, v]), &layout, &bias, species)
            .map(|e| e / hw)
            .unwrap_or(f64::NAN)
    };
    let h = tol.fd_step * trap.d;
    let hess = numerics::fd_hessian(excess, found, h);
    let eig = numerics::symmetric_eigenvalues(hess);
    let omegas = [trap.omega * eig[0].sqrt(), trap.omega * eig[1].sqrt()];
    let max_relative_deviation = omegas
        .iter()
        .map(|w| (w / trap.omega - 1.0).abs())
        .fold(0.0, f64::max);
    let si = to_si(found);
    Ok(FrequencyCheck {
        minimum: [si[0], si[1]],
        drift,
        omegas,
        max_relative_deviation,
    })
}

/// Design one trap per (I, d) pair at a common χ, in input order.
pub fn design_sweep(
    rows: &[(f64, f64)],
    chi: f64,
    species: &AtomSpecies,
) -> Result<Vec<SingleWellTrap>> {
    rows.par_iter()
        .map(|&(current, d)| SingleWellTrap::from_current_and_d(current, d, chi, species))
        .collect()
}

pub const TABLE1_CSV_HEADER: &str = "I_uA,d,chi,nu_kHz,y0_nm,l0_nm,Bx_G,Bz_G,loss_per_osc";

pub fn write_table1_csv<W: Write>(traps: &[SingleWellTrap], mut out: W) -> io::Result<()> {
    writeln!(out, "{TABLE1_CSV_HEADER}")?;
    for t in traps {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            format_sci(t.current * 1e6),
            format_sci(t.d),
            format_sci(t.chi),
            format_sci(t.frequency_hz() * 1e-3),
            format_sci(t.y0 * 1e9),
            format_sci(t.l0 * 1e9),
            format_sci(t.bx * 1e4),
            format_sci(t.bz * 1e4),
            format_sci(t.loss_per_oscillation()),
        )?;
    }
    Ok(())
}
