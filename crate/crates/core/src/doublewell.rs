//! Two-wire bistable trap.
//!
//! Wires at (∓x0, 0) with co-propagating currents and the single-wire bias
//! Bx = μ0I/(2πy0) give two field zeros at y0·(±√(x0²/y0² − 1), 1) as long as
//! x0 > y0. Tunneling between them is estimated with a single-particle WKB
//! integral along the line y = y0 joining the minima.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{AtomSpecies, CODATA};
use crate::error::{require_chi, require_positive, Error, Result};
use crate::magnetics::{self, format_sci, BiasFields, DimensionlessPoint, WireLayout};
use crate::numerics::{self, ToleranceConfig};
use crate::singlewell::oscillator_length;

/// Samples used to bracket each turning point between a minimum and the
/// barrier top.
pub const TURNING_POINT_SCAN: usize = 10_000;

/// Γ/ω above which a configuration counts as tunneling.
pub const DEFAULT_TUNNELING_THRESHOLD: f64 = 1e-3;

fn check_geometry(x0: f64, y0: f64) -> Result<()> {
    require_positive("doublewell", "y0", y0)?;
    require_positive("doublewell", "x0", x0)?;
    if !(x0 > y0) {
        return Err(Error::NotBistable { x0, y0 });
    }
    Ok(())
}

/// ω = [μ²χ/(mħ)·(μ0I/2π)²·(1/y0²)(1/y0² − 1/x0²)]^⅓.
fn well_frequency(current: f64, x0: f64, y0: f64, chi: f64, species: &AtomSpecies) -> f64 {
    let mu = species.moment();
    let k = CODATA.mu0 * current / (2.0 * PI);
    (mu * mu * chi / (species.mass * CODATA.hbar) * k * k / (y0 * y0)
        * (1.0 / (y0 * y0) - 1.0 / (x0 * x0)))
        .cbrt()
}

/// Single-well frequency at y0 = x0/2 with the same current and χ.
pub fn reference_omega0(current: f64, x0: f64, chi: f64, species: &AtomSpecies) -> Result<f64> {
    require_positive("doublewell", "I", current)?;
    require_positive("doublewell", "x0", x0)?;
    require_chi(chi)?;
    let y0 = 0.5 * x0;
    let mu = species.moment();
    let gradient = CODATA.mu0 * current / (2.0 * PI * y0 * y0);
    Ok((gradient * gradient * mu * mu * chi / (species.mass * CODATA.hbar)).cbrt())
}

/// ω/ω0 = [(1/16)(x0/y0)⁴(1 − y0²/x0²)]^⅓; zero when the minima merge.
pub fn frequency_ratio(x0: f64, y0: f64) -> Result<f64> {
    require_positive("doublewell", "y0", y0)?;
    if !(x0 >= y0) {
        return Err(Error::NotBistable { x0, y0 });
    }
    let s = x0 / y0;
    Ok((s.powi(4) * (1.0 - 1.0 / (s * s)) / 16.0).cbrt())
}

/// Barrier between the wells in units of ħω:
/// D/ħω = χ⁻¹(1 + χdy²(1 − dy/dx)/(1 + dy/dx))^½ − χ⁻¹.
///
/// This is the potential at the saddle point (0, dx) above the well floor.
pub fn barrier_height(dx: f64, dy: f64, chi: f64) -> Result<f64> {
    require_positive("doublewell", "dy", dy)?;
    require_positive("doublewell", "chi", chi)?;
    if !(dx >= dy) {
        return Err(Error::NotBistable { x0: dx, y0: dy });
    }
    let r = dy / dx;
    let s = dy * dy * (1.0 - r) / (1.0 + r);
    Ok(s / ((1.0 + chi * s).sqrt() + 1.0))
}

/// Locate the saddle between the wells as the minimum of the potential along
/// the symmetry axis x = 0. Returns its y coordinate (units of l0).
pub fn locate_saddle(dx: f64, dy: f64, chi: f64, tol: &ToleranceConfig) -> Result<f64> {
    let f = |y: f64| {
        magnetics::dimensionless_double_excess(DimensionlessPoint::new(0.0, y), dx, dy, chi)
            .unwrap_or(f64::INFINITY)
    };
    numerics::minimize_golden(
        f,
        1e-3 * dy,
        10.0 * dx,
        tol.root_abs_tol,
        10 * tol.max_iterations,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WkbResult {
    /// Left turning point on y = dy (units of l0).
    pub x_a: f64,
    /// Right turning point on y = dy (units of l0).
    pub x_b: f64,
    /// ∫ √(2[V − V_min − 1]) dx between the turning points.
    pub action: f64,
    /// Γ/ω = e^(−action).
    pub ratio: f64,
    /// Potential at (0, dy) above the floor, in ħω.
    pub line_barrier: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleWellTrap {
    /// Current per wire [A].
    pub current: f64,
    /// Wire half-separation [m].
    pub x0: f64,
    /// Height of the minima [m].
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    /// Well angular frequency [rad/s].
    pub omega: f64,
    pub l0: f64,
    pub chi: f64,
    pub bx: f64,
    pub bz: f64,
    /// Minima positions [m].
    pub minima: [[f64; 2]; 2],
    /// Largest |B⊥|/Bz at the two minima.
    pub minimum_field_residual: f64,
    /// Barrier height D [J].
    pub barrier: f64,
    /// Reference single-well frequency at y0 = x0/2 [rad/s].
    pub omega0: f64,
    /// Γ/ω, when a classically forbidden region exists at E = ħω.
    pub tunneling_ratio: Option<f64>,
}

impl DoubleWellTrap {
    pub fn design(current: f64, x0: f64, y0: f64, chi: f64, species: &AtomSpecies) -> Result<Self> {
        Self::design_with(current, x0, y0, chi, species, &ToleranceConfig::default())
    }

    pub fn design_with(
        current: f64,
        x0: f64,
        y0: f64,
        chi: f64,
        species: &AtomSpecies,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        require_positive("doublewell", "I", current)?;
        check_geometry(x0, y0)?;
        require_chi(chi)?;
        species.validate()?;
        let omega = well_frequency(current, x0, y0, chi, species);
        let l0 = oscillator_length(omega, species);
        let mu = species.moment();
        let bz = CODATA.hbar * omega / (mu * chi);
        let bx = CODATA.mu0 * current / (2.0 * PI * y0);
        let xm = (x0 * x0 - y0 * y0).sqrt();
        let minima = [[-xm, y0], [xm, y0]];

        let layout = WireLayout::pair(x0, current)?;
        let bias = BiasFields { bx, bz };
        let mut residual: f64 = 0.0;
        for m in &minima {
            let [fx, fy] = magnetics::transverse_field_at([m[0], m[1], 0.0], &layout, &bias)?;
            residual = residual.max(fx.hypot(fy) / bz);
        }

        let (dx, dy) = (x0 / l0, y0 / l0);
        let barrier = CODATA.hbar * omega * barrier_height(dx, dy, chi)?;
        let mut trap = Self {
            current,
            x0,
            y0,
            dx,
            dy,
            omega,
            l0,
            chi,
            bx,
            bz,
            minima,
            minimum_field_residual: residual,
            barrier,
            omega0: reference_omega0(current, x0, chi, species)?,
            tunneling_ratio: None,
        };
        trap.tunneling_ratio = match wkb_tunneling(&trap, tol) {
            Ok(w) => Some(w.ratio),
            Err(Error::NoBarrier { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(trap)
    }

    pub fn layout(&self) -> WireLayout {
        WireLayout::pair(self.x0, self.current).expect("validated at design time")
    }

    pub fn bias(&self) -> BiasFields {
        BiasFields {
            bx: self.bx,
            bz: self.bz,
        }
    }

    /// D/ħω.
    pub fn barrier_over_hbar_omega(&self) -> f64 {
        self.barrier / (CODATA.hbar * self.omega)
    }

    pub fn frequency_ratio(&self) -> f64 {
        self.omega / self.omega0
    }

    pub fn dimensionless_potential(&self, p: DimensionlessPoint) -> Result<f64> {
        magnetics::dimensionless_double_potential(p, self.dx, self.dy, self.chi)
    }

    /// Dimensionless minima (±√(dx² − dy²), dy).
    pub fn dimensionless_minima(&self) -> [DimensionlessPoint; 2] {
        let xm = (self.dx * self.dx - self.dy * self.dy).sqrt();
        [
            DimensionlessPoint::new(-xm, self.dy),
            DimensionlessPoint::new(xm, self.dy),
        ]
    }

    /// ħω/k_B and D/k_B [K].
    pub fn temperature_scales(&self) -> (f64, f64) {
        (
            CODATA.hbar * self.omega / CODATA.kb,
            self.barrier / CODATA.kb,
        )
    }
}

/// WKB tunneling ratio Γ/ω for the lowest doublet.
///
/// The energy is taken one quantum above the well floor, so with V in units
/// of ħω the integrand is √(2[V − 1/χ − 1]); it vanishes at the turning
/// points. The square-root endpoint behaviour is removed by substituting
/// x = x_a + u² on the left half and x = x_b − u² on the right half.
pub fn wkb_tunneling(trap: &DoubleWellTrap, tol: &ToleranceConfig) -> Result<WkbResult> {
    let (dx, dy, chi) = (trap.dx, trap.dy, trap.chi);
    let excess = |x: f64| {
        magnetics::dimensionless_double_excess(DimensionlessPoint::new(x, dy), dx, dy, chi)
    };
    let line_barrier = excess(0.0)?;
    if !(line_barrier > 1.0) {
        return Err(Error::NoBarrier {
            barrier: line_barrier,
        });
    }
    let g = |x: f64| excess(x).map(|v| v - 1.0).unwrap_or(f64::NAN);
    let xm = (dx * dx - dy * dy).sqrt();

    let left = numerics::sign_change_brackets(g, -xm, 0.0, TURNING_POINT_SCAN);
    let &(la, lb) = left.last().ok_or(Error::NoSignChange { a: -xm, b: 0.0 })?;
    let x_a = numerics::find_root_bracketed_with(g, la, lb, tol.root_abs_tol, tol.max_iterations)?;
    let right = numerics::sign_change_brackets(g, 0.0, xm, TURNING_POINT_SCAN);
    let &(ra, rb) = right.first().ok_or(Error::NoSignChange { a: 0.0, b: xm })?;
    let x_b = numerics::find_root_bracketed_with(g, ra, rb, tol.root_abs_tol, tol.max_iterations)?;

    let integrand = |x: f64| (2.0 * g(x)).max(0.0).sqrt();
    let mid = 0.5 * (x_a + x_b);
    let left_half = numerics::adaptive_quadrature(
        |u: f64| 2.0 * u * integrand(x_a + u * u),
        0.0,
        (mid - x_a).sqrt(),
        tol.quad_rel_tol,
        tol.max_subdivisions,
    )?;
    let right_half = numerics::adaptive_quadrature(
        |u: f64| 2.0 * u * integrand(x_b - u * u),
        0.0,
        (x_b - mid).sqrt(),
        tol.quad_rel_tol,
        tol.max_subdivisions,
    )?;
    let action = left_half.value + right_half.value;
    Ok(WkbResult {
        x_a,
        x_b,
        action,
        ratio: (-action).exp(),
        line_barrier,
    })
}

/// Finite-difference check of the well frequency: Hessian of the
/// dimensionless potential at a minimum, eigenvalues in (ħω/l0²) units.
/// Returns the two eigenfrequencies relative to ω.
pub fn numeric_frequency_ratios(trap: &DoubleWellTrap, tol: &ToleranceConfig) -> Result<[f64; 2]> {
    let [_, right] = trap.dimensionless_minima();
    let f = |x: f64, y: f64| {
        magnetics::dimensionless_double_excess(
            DimensionlessPoint::new(x, y),
            trap.dx,
            trap.dy,
            trap.chi,
        )
        .unwrap_or(f64::NAN)
    };
    let h = tol.fd_step * trap.dy;
    let eig = numerics::symmetric_eigenvalues(numerics::fd_hessian(f, [right.x, right.y], h));
    Ok([eig[0].sqrt(), eig[1].sqrt()])
}

/// Wire half-distance for `current` that reproduces a target ω0.
pub fn matched_x0(
    current: f64,
    omega0: f64,
    chi: f64,
    species: &AtomSpecies,
    tol: &ToleranceConfig,
) -> Result<f64> {
    require_positive("doublewell", "omega0", omega0)?;
    let f = |x0: f64| {
        reference_omega0(current, x0, chi, species)
            .map(|w| (w / omega0).ln())
            .unwrap_or(f64::NAN)
    };
    // ω0 falls monotonically with x0; widen a bracket geometrically
    let (mut lo, mut hi) = (1e-9, 2e-9);
    let mut steps = 0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > 200 {
            return Err(Error::IterationLimit(steps));
        }
    }
    while f(lo) < 0.0 {
        hi = lo;
        lo *= 0.5;
        steps += 1;
        if steps > 200 {
            return Err(Error::IterationLimit(steps));
        }
    }
    // relative precision on x0
    let log_root = numerics::find_root_bracketed_with(
        |s: f64| f(s.exp()),
        lo.ln(),
        hi.ln(),
        tol.root_abs_tol,
        tol.max_iterations,
    )?;
    Ok(log_root.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig3Row {
    pub y0_over_x0: f64,
    pub omega_over_omega0: f64,
    /// `None` where no WKB estimate exists.
    pub gamma_over_omega: Option<f64>,
    pub action: Option<f64>,
    /// D/ħω.
    pub barrier: f64,
    /// Current per wire [A].
    pub current: f64,
}

/// Sweep y0/x0 at fixed current and wire separation.
///
/// Rows keep the order of `ratio_grid`. At fixed I and x0, dy grows like
/// (y0/x0)^⅓, so for y0/x0 of a few percent the action passes through a
/// maximum and Γ/ω only rises monotonically above it.
pub fn fig3_sweep(
    current: f64,
    x0: f64,
    chi: f64,
    species: &AtomSpecies,
    ratio_grid: &[f64],
    tol: &ToleranceConfig,
) -> Result<Vec<Fig3Row>> {
    for &r in ratio_grid {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter {
                module: "doublewell",
                parameter: "y0/x0",
                value: r,
                bound: "0 < y0/x0 < 1",
            });
        }
    }
    ratio_grid
        .par_iter()
        .map(|&r| {
            let trap = DoubleWellTrap::design_with(current, x0, r * x0, chi, species, tol)?;
            let wkb = match wkb_tunneling(&trap, tol) {
                Ok(w) => Some(w),
                Err(Error::NoBarrier { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(Fig3Row {
                y0_over_x0: r,
                omega_over_omega0: frequency_ratio(x0, r * x0)?,
                gamma_over_omega: wkb.map(|w| w.ratio),
                action: wkb.map(|w| w.action),
                barrier: trap.barrier_over_hbar_omega(),
                current,
            })
        })
        .collect()
}

/// ω/ω0 at which Γ/ω first reaches `threshold` along a sweep ordered by
/// increasing y0/x0, interpolated linearly in the action.
pub fn tunneling_onset(rows: &[Fig3Row], threshold: f64) -> Option<f64> {
    let target = -threshold.ln();
    let mut prev: Option<&Fig3Row> = None;
    for row in rows {
        let Some(action) = row.action else {
            prev = None;
            continue;
        };
        if action <= target {
            return Some(match prev.and_then(|p| p.action.map(|a| (p, a))) {
                Some((p, a_prev)) => {
                    let t = (a_prev - target) / (a_prev - action);
                    p.omega_over_omega0 + t * (row.omega_over_omega0 - p.omega_over_omega0)
                }
                None => row.omega_over_omega0,
            });
        }
        prev = Some(row);
    }
    None
}

pub const FIG3_CSV_HEADER: &str = "y0_over_x0,omega_over_omega0,gamma_over_omega,current_uA";

pub fn write_fig3_csv<W: Write>(rows: &[Fig3Row], mut out: W) -> io::Result<()> {
    writeln!(out, "{FIG3_CSV_HEADER}")?;
    for r in rows {
        let gamma = r
            .gamma_over_omega
            .map_or_else(|| "NA".to_string(), format_sci);
        writeln!(
            out,
            "{},{},{},{}",
            format_sci(r.y0_over_x0),
            format_sci(r.omega_over_omega0),
            gamma,
            format_sci(r.current * 1e6)
        )?;
    }
    Ok(())
}
