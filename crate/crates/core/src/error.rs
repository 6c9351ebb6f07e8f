use thiserror::Error;

/// Errors raised by the trap design routines.
///
/// Every precondition violation names the parameter and the bound it broke so
/// that front ends can relay it without further context.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{module}: parameter `{parameter}` = {value} violates {bound}")]
    InvalidParameter {
        module: &'static str,
        parameter: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("adiabaticity violated: chi = {chi} must satisfy 0 < chi < 1 (omega << omega_L)")]
    Adiabaticity { chi: f64 },

    #[error("point lies within {distance:e} m of a wire axis (exclusion radius {epsilon:e} m)")]
    SingularPoint { distance: f64, epsilon: f64 },

    #[error("bistability requires x0 > y0 (x0 = {x0:e}, y0 = {y0:e})")]
    NotBistable { x0: f64, y0: f64 },

    #[error("a3d = {a3d:e} m is within the resonance window of the CIR at {resonance:e} m")]
    ConfinementResonance { a3d: f64, resonance: f64 },

    #[error(
        "barrier of {barrier} hbar*omega leaves no classically forbidden region at E = hbar*omega"
    )]
    NoBarrier { barrier: f64 },

    #[error("no sign change of the bracketed function on [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },

    #[error("quadrature did not reach rel_tol {rel_tol:e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence { rel_tol: f64, subdivisions: usize },

    #[error("located minimum drifted {drift:e} l0 from the analytic position")]
    MinimumDrift { drift: f64 },

    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("dataset: {0}")]
    Dataset(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_positive(
    module: &'static str,
    parameter: &'static str,
    value: f64,
) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            module,
            parameter,
            value,
            bound: "> 0 and finite",
        })
    }
}

pub(crate) fn require_chi(chi: f64) -> Result<()> {
    if chi > 0.0 && chi < 1.0 {
        Ok(())
    } else {
        Err(Error::Adiabaticity { chi })
    }
}
