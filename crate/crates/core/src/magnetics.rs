//! Magnetic fields and Zeeman potentials of infinite straight wires plus a
//! homogeneous bias, in SI and in trap units (lengths in l0, energies in ħω).
//!
//! Wires run along z at `(x_wire, 0)` and carry the same current in +z.
//! Finite-length corrections are not modelled.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{AtomSpecies, CODATA};
use crate::error::{require_positive, Error, Result};

/// Radius around each wire axis inside which fields are not evaluated [m].
pub const DEFAULT_AXIS_EXCLUSION: f64 = 1e-12;

/// Exclusion radius for the dimensionless evaluators, in units of l0.
const DIMENSIONLESS_EXCLUSION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasFields {
    /// Transverse bias along x [T].
    pub bx: f64,
    /// Longitudinal bias along z [T].
    pub bz: f64,
}

impl BiasFields {
    pub fn new(bx: f64, bz: f64) -> Result<Self> {
        if !(bx >= 0.0 && bx.is_finite()) {
            return Err(Error::InvalidParameter {
                module: "magnetics",
                parameter: "Bx",
                value: bx,
                bound: ">= 0",
            });
        }
        require_positive("magnetics", "Bz", bz)?;
        Ok(Self { bx, bz })
    }
}

/// Parallel wires with a common current.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireLayout {
    /// x-offsets of the wire axes [m].
    pub positions: Vec<f64>,
    /// Current per wire [A].
    pub current: f64,
}

impl WireLayout {
    /// One wire at (−x0, 0).
    pub fn single(x0: f64, current: f64) -> Result<Self> {
        require_positive("magnetics", "I", current)?;
        Ok(Self {
            positions: vec![-x0],
            current,
        })
    }

    /// Two wires at (∓x0, 0).
    pub fn pair(x0: f64, current: f64) -> Result<Self> {
        require_positive("magnetics", "I", current)?;
        require_positive("magnetics", "x0", x0)?;
        Ok(Self {
            positions: vec![-x0, x0],
            current,
        })
    }

    /// μ0 I / 2π [T·m].
    pub fn strength(&self) -> f64 {
        CODATA.mu0 * self.current / (2.0 * PI)
    }
}

/// Transverse field of one wire, (−y, x − x_wire)·μ0I/(2πr²).
fn wire_field(x: f64, y: f64, x_wire: f64, strength: f64) -> [f64; 2] {
    let dx = x - x_wire;
    let r2 = dx * dx + y * y;
    [-strength * y / r2, strength * dx / r2]
}

fn check_exclusion(point: [f64; 3], layout: &WireLayout, epsilon: f64) -> Result<()> {
    for &xw in &layout.positions {
        let distance = (point[0] - xw).hypot(point[1]);
        if distance < epsilon {
            return Err(Error::SingularPoint { distance, epsilon });
        }
    }
    Ok(())
}

/// Transverse part (Bx, By) of the total field, bias included.
pub fn transverse_field_at(
    point: [f64; 3],
    layout: &WireLayout,
    bias: &BiasFields,
) -> Result<[f64; 2]> {
    check_exclusion(point, layout, DEFAULT_AXIS_EXCLUSION)?;
    Ok(transverse_unchecked(point[0], point[1], layout, bias))
}

fn transverse_unchecked(x: f64, y: f64, layout: &WireLayout, bias: &BiasFields) -> [f64; 2] {
    let k = layout.strength();
    let mut b = [bias.bx, 0.0];
    for &xw in &layout.positions {
        let w = wire_field(x, y, xw, k);
        b[0] += w[0];
        b[1] += w[1];
    }
    b
}

pub fn field_at(point: [f64; 3], layout: &WireLayout, bias: &BiasFields) -> Result<[f64; 3]> {
    field_at_with_exclusion(point, layout, bias, DEFAULT_AXIS_EXCLUSION)
}

pub fn field_at_with_exclusion(
    point: [f64; 3],
    layout: &WireLayout,
    bias: &BiasFields,
    epsilon: f64,
) -> Result<[f64; 3]> {
    check_exclusion(point, layout, epsilon)?;
    let [bx, by] = transverse_unchecked(point[0], point[1], layout, bias);
    Ok([bx, by, bias.bz])
}

/// Jacobian ∂(Bx, By)/∂(x, y) of the transverse field.
pub fn transverse_field_jacobian(point: [f64; 3], layout: &WireLayout) -> Result<[[f64; 2]; 2]> {
    check_exclusion(point, layout, DEFAULT_AXIS_EXCLUSION)?;
    let k = layout.strength();
    let mut j = [[0.0; 2]; 2];
    for &xw in &layout.positions {
        let dx = point[0] - xw;
        let y = point[1];
        let r2 = dx * dx + y * y;
        let r4 = r2 * r2;
        let off = k * (y * y - dx * dx) / r4;
        let diag = 2.0 * k * dx * y / r4;
        j[0][0] += diag;
        j[0][1] += off;
        j[1][0] += off;
        j[1][1] -= diag;
    }
    Ok(j)
}

/// Zeeman potential μ|B| [J].
pub fn potential_at(
    point: [f64; 3],
    layout: &WireLayout,
    bias: &BiasFields,
    species: &AtomSpecies,
) -> Result<f64> {
    let [bx, by, bz] = field_at(point, layout, bias)?;
    Ok(species.moment() * (bx * bx + by * by + bz * bz).sqrt())
}

/// μ(|B| − Bz) [J], evaluated as μ|B⊥|²/(|B| + Bz) so that it keeps full
/// relative precision when the transverse field is small next to Bz.
pub fn zeeman_excess_at(
    point: [f64; 3],
    layout: &WireLayout,
    bias: &BiasFields,
    species: &AtomSpecies,
) -> Result<f64> {
    let [bx, by] = transverse_field_at(point, layout, bias)?;
    let bt2 = bx * bx + by * by;
    let b = (bt2 + bias.bz * bias.bz).sqrt();
    Ok(species.moment() * bt2 / (b + bias.bz))
}

/// Analytic transverse gradient of μ|B| [J/m].
pub fn potential_gradient(
    point: [f64; 3],
    layout: &WireLayout,
    bias: &BiasFields,
    species: &AtomSpecies,
) -> Result<[f64; 2]> {
    let [bx, by] = transverse_field_at(point, layout, bias)?;
    let j = transverse_field_jacobian(point, layout)?;
    let b = (bx * bx + by * by + bias.bz * bias.bz).sqrt();
    let mu = species.moment();
    Ok([
        mu * (j[0][0] * bx + j[1][0] * by) / b,
        mu * (j[0][1] * bx + j[1][1] * by) / b,
    ])
}

/// A transverse position in units of l0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessPoint {
    pub x: f64,
    pub y: f64,
}

impl DimensionlessPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// The bracketed quantity q in χV = √(1 + χq) for a single wire at
/// x = −x_offset with its trap minimum at (−x_offset, d).
fn single_q(p: DimensionlessPoint, d: f64, x_offset: f64) -> Result<f64> {
    let xs = p.x + x_offset;
    let r2 = xs * xs + p.y * p.y;
    if r2.sqrt() < DIMENSIONLESS_EXCLUSION {
        return Err(Error::SingularPoint {
            distance: r2.sqrt(),
            epsilon: DIMENSIONLESS_EXCLUSION,
        });
    }
    let a = xs * xs - d * p.y + p.y * p.y;
    Ok((d * d * a * a + d.powi(4) * xs * xs) / (r2 * r2))
}

fn check_single(d: f64, chi: f64) -> Result<()> {
    require_positive("magnetics", "d", d)?;
    require_positive("magnetics", "chi", chi)
}

/// Single-wire potential in units of ħω:
/// χV = (1 + χ·{d²[(x+x₀)² − dy + y²]² + d⁴(x+x₀)²}/[(x+x₀)² + y²]²)^½.
pub fn dimensionless_single_potential(
    p: DimensionlessPoint,
    d: f64,
    chi: f64,
    x_offset: f64,
) -> Result<f64> {
    check_single(d, chi)?;
    let q = single_q(p, d, x_offset)?;
    Ok((1.0 + chi * q).sqrt() / chi)
}

/// V − 1/χ for the single-wire potential, computed without cancellation.
pub fn dimensionless_single_excess(
    p: DimensionlessPoint,
    d: f64,
    chi: f64,
    x_offset: f64,
) -> Result<f64> {
    check_single(d, chi)?;
    let q = single_q(p, d, x_offset)?;
    Ok(q / ((1.0 + chi * q).sqrt() + 1.0))
}

fn check_double(dx: f64, dy: f64, chi: f64) -> Result<()> {
    require_positive("magnetics", "dy", dy)?;
    require_positive("magnetics", "chi", chi)?;
    if !(dx > dy) {
        return Err(Error::NotBistable { x0: dx, y0: dy });
    }
    Ok(())
}

/// χ·q for the two-wire potential, i.e. the term under the square root minus one.
fn double_chi_q(p: DimensionlessPoint, dx: f64, dy: f64, chi: f64) -> Result<f64> {
    let (x, y) = (p.x, p.y);
    let r2_left = (x + dx) * (x + dx) + y * y;
    let r2_right = (x - dx) * (x - dx) + y * y;
    let nearest = r2_left.min(r2_right).sqrt();
    if nearest < DIMENSIONLESS_EXCLUSION {
        return Err(Error::SingularPoint {
            distance: nearest,
            epsilon: DIMENSIONLESS_EXCLUSION,
        });
    }
    let prefactor = chi * dy.powi(4) / (1.0 - dy * dy / (dx * dx));
    let first = -y / r2_left - y / r2_right + 1.0 / dy;
    let second = (x + dx) / r2_left + (x - dx) / r2_right;
    Ok(prefactor * (first * first + second * second))
}

/// Two-wire potential in units of ħω, wires at (∓dx, 0), minima at
/// (±√(dx² − dy²), dy).
pub fn dimensionless_double_potential(
    p: DimensionlessPoint,
    dx: f64,
    dy: f64,
    chi: f64,
) -> Result<f64> {
    check_double(dx, dy, chi)?;
    let cq = double_chi_q(p, dx, dy, chi)?;
    Ok((1.0 + cq).sqrt() / chi)
}

/// V − 1/χ for the two-wire potential, computed without cancellation.
pub fn dimensionless_double_excess(
    p: DimensionlessPoint,
    dx: f64,
    dy: f64,
    chi: f64,
) -> Result<f64> {
    check_double(dx, dy, chi)?;
    let cq = double_chi_q(p, dx, dy, chi)?;
    Ok(cq / (chi * ((1.0 + cq).sqrt() + 1.0)))
}

/// A regular rectangular grid in trap units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    fn coordinate(min: f64, max: f64, n: usize, i: usize) -> f64 {
        if n <= 1 {
            min
        } else {
            min + (max - min) * i as f64 / (n - 1) as f64
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        Self::coordinate(self.x_min, self.x_max, self.nx, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        Self::coordinate(self.y_min, self.y_max, self.ny, j)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidParameter {
                module: "magnetics",
                parameter: "grid size",
                value: 0.0,
                bound: "nx, ny >= 1",
            });
        }
        if !(self.x_max >= self.x_min && self.y_max >= self.y_min) {
            return Err(Error::InvalidParameter {
                module: "magnetics",
                parameter: "grid extent",
                value: self.x_max - self.x_min,
                bound: "max >= min",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSample {
    pub x: f64,
    pub y: f64,
    /// Potential in units of ħω; `None` inside a wire exclusion zone.
    pub value: Option<f64>,
}

/// Evaluate `potential` on the grid. Rows are ordered by y, x varies fastest.
pub fn evaluate_grid<F>(grid: &GridSpec, potential: F) -> Vec<GridSample>
where
    F: Fn(DimensionlessPoint) -> Result<f64> + Sync,
{
    (0..grid.nx * grid.ny)
        .into_par_iter()
        .map(|k| {
            let (j, i) = (k / grid.nx, k % grid.nx);
            let p = DimensionlessPoint::new(grid.x(i), grid.y(j));
            GridSample {
                x: p.x,
                y: p.y,
                value: potential(p).ok(),
            }
        })
        .collect()
}

/// Nine significant digits in scientific notation.
pub fn format_sci(v: f64) -> String {
    format!("{v:.8e}")
}

pub const GRID_CSV_HEADER: &str = "x_over_l0,y_over_l0,V_over_hbar_omega";

pub fn write_grid_csv<W: Write>(samples: &[GridSample], mut out: W) -> io::Result<()> {
    writeln!(out, "{GRID_CSV_HEADER}")?;
    for s in samples {
        let v = s.value.map_or_else(|| "NA".to_string(), format_sci);
        writeln!(out, "{},{},{}", format_sci(s.x), format_sci(s.y), v)?;
    }
    Ok(())
}
