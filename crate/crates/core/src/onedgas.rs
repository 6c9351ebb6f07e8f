//! One-dimensional gas in the waveguide: effective 1D scattering length with
//! its confinement-induced resonance, the Tonks-Girardeau / Thomas-Fermi
//! regime parameter η and the longitudinal cloud length.

use std::f64::consts::SQRT_2;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::constants::{AtomSpecies, CODATA};
use crate::error::{require_positive, Error, Result};
use crate::singlewell::oscillator_length;

/// Olshanii's constant C = −ζ(1/2).
pub const CIR_CONSTANT: f64 = 1.4603;

/// Relative distance from the CIR inside which a1D is refused.
pub const DEFAULT_RESONANCE_WINDOW: f64 = 1e-6;

/// 3D scattering length at which g1D diverges, √2·l0/C.
pub fn cir_position(l0: f64) -> Result<f64> {
    require_positive("onedgas", "l0", l0)?;
    Ok(SQRT_2 * l0 / CIR_CONSTANT)
}

/// a1D = −(l0²/a)(1 − C·a/(√2 l0)).
pub fn a1d_from_confinement(a3d: f64, l0: f64) -> Result<f64> {
    a1d_from_confinement_with_window(a3d, l0, DEFAULT_RESONANCE_WINDOW)
}

pub fn a1d_from_confinement_with_window(a3d: f64, l0: f64, window: f64) -> Result<f64> {
    require_positive("onedgas", "a3d", a3d)?;
    let resonance = cir_position(l0)?;
    if (a3d / resonance - 1.0).abs() <= window {
        return Err(Error::ConfinementResonance { a3d, resonance });
    }
    Ok(-(l0 * l0 / a3d) * (1.0 - CIR_CONSTANT * a3d / (SQRT_2 * l0)))
}

/// g1D = −2ħ²/(m·a1D) [J·m].
pub fn g1d(a1d: f64, species: &AtomSpecies) -> f64 {
    -2.0 * CODATA.hbar * CODATA.hbar / (species.mass * a1d)
}

fn check_cloud_inputs(n: u64, omega_z: f64, a1d: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            module: "onedgas",
            parameter: "N",
            value: n as f64,
            bound: ">= 1",
        });
    }
    require_positive("onedgas", "omega_z", omega_z)?;
    if a1d == 0.0 || !a1d.is_finite() {
        return Err(Error::InvalidParameter {
            module: "onedgas",
            parameter: "a1d",
            value: a1d,
            bound: "nonzero and finite",
        });
    }
    Ok(())
}

/// Central Thomas-Fermi density n_TF = [(9/64)·N²·(mω_z/ħ)²·|a1D|]^⅓ [1/m].
///
/// The longitudinal oscillator enters as (mω_z/ħ)², the only combination
/// with units of 1/length here; the form (mω_zħ)² found in some write-ups is
/// dimensionally inconsistent.
pub fn tf_density(n: u64, omega_z: f64, a1d: f64, species: &AtomSpecies) -> Result<f64> {
    check_cloud_inputs(n, omega_z, a1d)?;
    let inv_az2 = species.mass * omega_z / CODATA.hbar;
    let n = n as f64;
    Ok((9.0 / 64.0 * n * n * inv_az2 * inv_az2 * a1d.abs()).cbrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "TG")]
    TonksGirardeau,
    #[serde(rename = "TF")]
    ThomasFermi,
    #[serde(rename = "crossover")]
    Crossover,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::TonksGirardeau => "TG",
            Regime::ThomasFermi => "TF",
            Regime::Crossover => "crossover",
        }
    }
}

/// η < `tg_below` is TG, η > `tf_above` is TF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub tg_below: f64,
    pub tf_above: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            tg_below: 0.5,
            tf_above: 2.0,
        }
    }
}

pub fn classify_regime(eta: f64, thresholds: &RegimeThresholds) -> Result<Regime> {
    if !(eta >= 0.0) {
        return Err(Error::InvalidParameter {
            module: "onedgas",
            parameter: "eta",
            value: eta,
            bound: ">= 0",
        });
    }
    Ok(if eta < thresholds.tg_below {
        Regime::TonksGirardeau
    } else if eta > thresholds.tf_above {
        Regime::ThomasFermi
    } else {
        Regime::Crossover
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CloudLength {
    /// Selected length ℓ [m]; the mean of both candidates in the crossover.
    pub length: f64,
    pub regime: Regime,
    pub eta: f64,
    pub n_tf: f64,
    /// ℓ = [3N(ħ/mω_z)²/|a1D|]^⅓.
    pub tf_length: f64,
    /// ℓ = [2N(ħ/mω_z)]^½.
    pub tg_length: f64,
}

pub fn cloud_length(
    n: u64,
    omega_z: f64,
    a1d: f64,
    species: &AtomSpecies,
    thresholds: &RegimeThresholds,
) -> Result<CloudLength> {
    let n_tf = tf_density(n, omega_z, a1d, species)?;
    let eta = n_tf * a1d.abs();
    let regime = classify_regime(eta, thresholds)?;
    let az2 = CODATA.hbar / (species.mass * omega_z);
    let nf = n as f64;
    let tf_length = (3.0 * nf * az2 * az2 / a1d.abs()).cbrt();
    let tg_length = (2.0 * nf * az2).sqrt();
    let length = match regime {
        Regime::TonksGirardeau => tg_length,
        Regime::ThomasFermi => tf_length,
        Regime::Crossover => 0.5 * (tf_length + tg_length),
    };
    Ok(CloudLength {
        length,
        regime,
        eta,
        n_tf,
        tf_length,
        tg_length,
    })
}

/// Largest N whose cloud fits into `fill_fraction` of the suspended length.
///
/// ℓ grows with N inside each regime but drops when the crossover mean
/// hands over to the shorter TF length, so the search restarts from the
/// first TF atom number if that one still fits.
pub fn max_atoms_for_wire(
    suspended_length: f64,
    omega_z: f64,
    a1d: f64,
    species: &AtomSpecies,
    fill_fraction: f64,
    thresholds: &RegimeThresholds,
) -> Result<u64> {
    require_positive("onedgas", "L", suspended_length)?;
    if !(fill_fraction > 0.0 && fill_fraction <= 1.0) {
        return Err(Error::InvalidParameter {
            module: "onedgas",
            parameter: "fill_fraction",
            value: fill_fraction,
            bound: "0 < fill <= 1",
        });
    }
    let limit = fill_fraction * suspended_length;
    let fits = |n: u64| -> Result<bool> {
        Ok(cloud_length(n, omega_z, a1d, species, thresholds)?.length <= limit)
    };
    if !fits(1)? {
        return Ok(0);
    }

    let boundary_from = |start: u64| -> Result<u64> {
        let (mut lo, mut hi) = (start, start.saturating_mul(2).max(start + 1));
        while fits(hi)? {
            lo = hi;
            hi = hi.checked_mul(2).ok_or(Error::IterationLimit(64))?;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    };

    let mut n = boundary_from(1)?;
    // η ∝ N^(2/3): first N classified as TF
    let eta1 = tf_density(1, omega_z, a1d, species)? * a1d.abs();
    let mut first_tf = (thresholds.tf_above / eta1).powf(1.5).floor() as u64;
    while cloud_length(first_tf.max(1), omega_z, a1d, species, thresholds)?.regime
        != Regime::ThomasFermi
    {
        first_tf += 1;
    }
    if first_tf > n + 1 && fits(first_tf)? {
        n = boundary_from(first_tf)?;
    }
    Ok(n)
}

/// Full characterization of a trapped 1D gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasProfile {
    pub omega: f64,
    pub omega_z: f64,
    pub n: u64,
    /// [m], signed
    pub a1d: f64,
    /// [J·m]
    pub g1d: f64,
    pub eta: f64,
    pub regime: Regime,
    /// Cloud length ℓ [m].
    pub length: f64,
    pub n_tf: f64,
    pub tf_length: f64,
    pub tg_length: f64,
}

impl GasProfile {
    /// Characterize a gas of `n` atoms in a trap with transverse frequency
    /// `omega`, deriving a1D from the species' 3D scattering length.
    pub fn characterize(
        omega: f64,
        omega_z: f64,
        n: u64,
        species: &AtomSpecies,
        thresholds: &RegimeThresholds,
    ) -> Result<Self> {
        require_positive("onedgas", "omega", omega)?;
        let a1d = a1d_from_confinement(species.a3d, oscillator_length(omega, species))?;
        Self::with_a1d(omega, omega_z, n, a1d, species, thresholds)
    }

    /// As [`GasProfile::characterize`] but with a given a1D.
    pub fn with_a1d(
        omega: f64,
        omega_z: f64,
        n: u64,
        a1d: f64,
        species: &AtomSpecies,
        thresholds: &RegimeThresholds,
    ) -> Result<Self> {
        require_positive("onedgas", "omega", omega)?;
        if !(omega_z < omega) {
            return Err(Error::InvalidParameter {
                module: "onedgas",
                parameter: "omega_z",
                value: omega_z,
                bound: "omega_z < omega",
            });
        }
        let c = cloud_length(n, omega_z, a1d, species, thresholds)?;
        Ok(Self {
            omega,
            omega_z,
            n,
            a1d,
            g1d: g1d(a1d, species),
            eta: c.eta,
            regime: c.regime,
            length: c.length,
            n_tf: c.n_tf,
            tf_length: c.tf_length,
            tg_length: c.tg_length,
        })
    }
}

pub const TABLE2_CSV_HEADER: &str = "nu_kHz,a1d_nm,N,eta,ell_um,regime";

pub fn write_table2_csv<W: Write>(profiles: &[GasProfile], mut out: W) -> io::Result<()> {
    writeln!(out, "{TABLE2_CSV_HEADER}")?;
    for p in profiles {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            crate::magnetics::format_sci(p.omega / (2.0 * std::f64::consts::PI) / 1e3),
            crate::magnetics::format_sci(p.a1d * 1e9),
            p.n,
            crate::magnetics::format_sci(p.eta),
            crate::magnetics::format_sci(p.length * 1e6),
            p.regime.label()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::default_rb87;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    const OMEGA_Z: f64 = 2.0 * PI * 100.0;

    #[test]
    fn a1d_for_460_khz() {
        let rb = default_rb87();
        let l0 = oscillator_length(2.0 * PI * 460e3, &rb);
        let a = a1d_from_confinement(rb.a3d, l0).unwrap();
        assert!(rel(a, -26.65e-9) < 0.20, "{a}");
    }

    #[test]
    fn a1d_limits() {
        let l0 = 100e-9;
        // weak-confinement limit
        let a = a1d_from_confinement(1e-12, l0).unwrap();
        assert!(rel(a, -l0 * l0 / 1e-12) < 1e-4);
        // approaches 0⁻ from below the resonance
        let res = cir_position(l0).unwrap();
        let near = a1d_from_confinement(res * (1.0 - 1e-4), l0).unwrap();
        assert!(near < 0.0 && near.abs() < 2e-4 * l0);
        assert!(matches!(
            a1d_from_confinement(res, l0),
            Err(Error::ConfinementResonance { .. })
        ));
    }

    #[test]
    fn cir_position_values() {
        let p = cir_position(14e-9).unwrap();
        assert!((p - 13.558166e-9).abs() < 1e-15, "{p}");
        assert!(rel(cir_position(28e-9).unwrap(), 2.0 * p) < 1e-15);
    }

    #[test]
    fn coupling_product_is_exact() {
        let rb = default_rb87();
        let a = -223e-9;
        let expected = -2.0 * CODATA.hbar * CODATA.hbar / rb.mass;
        assert!(rel(g1d(a, &rb) * a, expected) < 1e-15);
    }

    #[test]
    fn tf_density_scaling_and_table_row() {
        let rb = default_rb87();
        let n = tf_density(100, OMEGA_Z, -603e-9, &rb).unwrap();
        let eta = n * 603e-9;
        assert!(rel(eta, 5.72) < 0.15, "{eta}");
        let n4 = tf_density(400, OMEGA_Z, -603e-9, &rb).unwrap();
        assert!(rel(n4, n * 4f64.powf(2.0 / 3.0)) < 1e-14);
    }

    #[test]
    fn tf_density_has_inverse_length_units() {
        // rescale lengths by s with ħ/(mω_z) kept in length² units:
        // n_TF → n_TF / s when a1d → s·a1d and ħ/(mω_z) → s²·ħ/(mω_z)
        let rb = default_rb87();
        let s = 3.0;
        let n1 = tf_density(50, OMEGA_Z, -200e-9, &rb).unwrap();
        let n2 = tf_density(50, OMEGA_Z / (s * s), -200e-9 * s, &rb).unwrap();
        assert!(rel(n2, n1 / s) < 1e-14);
    }

    #[test]
    fn regime_classification() {
        let t = RegimeThresholds::default();
        assert_eq!(classify_regime(0.11, &t).unwrap(), Regime::TonksGirardeau);
        assert_eq!(classify_regime(5.72, &t).unwrap(), Regime::ThomasFermi);
        assert_eq!(classify_regime(1.0, &t).unwrap(), Regime::Crossover);
        assert!(classify_regime(-0.1, &t).is_err());
    }

    #[test]
    fn cloud_length_rows() {
        let rb = default_rb87();
        let t = RegimeThresholds::default();
        let c = cloud_length(100, OMEGA_Z, -603e-9, &rb, &t).unwrap();
        assert_eq!(c.regime, Regime::ThomasFermi);
        assert!(rel(c.length, 7.9e-6) < 0.25);
        let c = cloud_length(30, OMEGA_Z, -26.65e-9, &rb, &t).unwrap();
        assert_eq!(c.regime, Regime::TonksGirardeau);
        assert!(rel(c.length, 7.7e-6) < 0.25);
        // TG candidate ignores a1d
        let d = cloud_length(30, OMEGA_Z, -1e-6, &rb, &t).unwrap();
        assert_eq!(c.tg_length, d.tg_length);
    }

    #[test]
    fn crossover_reports_mean() {
        let rb = default_rb87();
        let c = cloud_length(50, OMEGA_Z, -223e-9, &rb, &RegimeThresholds::default()).unwrap();
        assert_eq!(c.regime, Regime::Crossover);
        assert_eq!(c.length, 0.5 * (c.tf_length + c.tg_length));
    }

    #[test]
    fn max_atoms_few_tens() {
        let rb = default_rb87();
        let l0 = oscillator_length(2.0 * PI * 460e3, &rb);
        let a1d = a1d_from_confinement(rb.a3d, l0).unwrap();
        let t = RegimeThresholds::default();
        let n = max_atoms_for_wire(10e-6, OMEGA_Z, a1d, &rb, 1.0, &t).unwrap();
        assert!((10..100).contains(&n), "{n}");
        let at = cloud_length(n, OMEGA_Z, a1d, &rb, &t).unwrap().length;
        let next = cloud_length(n + 1, OMEGA_Z, a1d, &rb, &t).unwrap().length;
        assert!(at <= 10e-6 && next > 10e-6);
        assert!(max_atoms_for_wire(10e-6, OMEGA_Z, a1d, &rb, 0.0, &t).is_err());
        assert_eq!(
            max_atoms_for_wire(1e-7, OMEGA_Z, a1d, &rb, 1.0, &t).unwrap(),
            0
        );
    }

    #[test]
    fn max_atoms_is_largest_across_tf_drop() {
        let rb = default_rb87();
        let t = RegimeThresholds::default();
        let a1d = -603e-9;
        for l_um in [5.0, 6.0, 6.5, 7.0, 8.0, 12.0] {
            let limit = l_um * 1e-6;
            let n = max_atoms_for_wire(limit, OMEGA_Z, a1d, &rb, 1.0, &t).unwrap();
            let brute = (1..5000u64)
                .filter(|&k| cloud_length(k, OMEGA_Z, a1d, &rb, &t).unwrap().length <= limit)
                .max()
                .unwrap_or(0);
            assert_eq!(n, brute, "L = {l_um} um");
        }
    }

    #[test]
    fn profile_relations() {
        let rb = default_rb87();
        let p = GasProfile::characterize(2.0 * PI * 73.8e3, OMEGA_Z, 50, &rb, &Default::default())
            .unwrap();
        assert_eq!(p.g1d, g1d(p.a1d, &rb));
        assert_eq!(p.eta, p.n_tf * p.a1d.abs());
        assert!(GasProfile::characterize(1.0, 2.0, 5, &rb, &Default::default()).is_err());
    }
}
