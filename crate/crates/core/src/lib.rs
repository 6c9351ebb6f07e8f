//! Magnetic microtraps for neutral atoms above current-carrying nanowires.
//!
//! Single-wire guides, two-wire bistable traps with WKB tunneling, the
//! one-dimensional gas they hold, and a stability budget for the wire.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod doublewell;
pub mod error;
pub mod magnetics;
pub mod numerics;
pub mod onedgas;
pub mod singlewell;
pub mod stability;

pub use constants::{default_mwnt, default_rb87, AtomSpecies, Dataset, NanowireSpec, CODATA};
pub use doublewell::{DoubleWellTrap, Fig3Row, WkbResult};
pub use error::{Error, Result};
pub use magnetics::{BiasFields, DimensionlessPoint, GridSpec, WireLayout};
pub use numerics::ToleranceConfig;
pub use onedgas::{GasProfile, Regime, RegimeThresholds};
pub use singlewell::SingleWellTrap;
pub use stability::{NoiseSpectrum, StabilityInputs, StabilityReport};
