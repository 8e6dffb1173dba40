//! SI conversion factors used at the input boundary.
//!
//! Everything inside the crate is SI; these helpers only exist so that
//! configuration files and callers can state masses in eV/c² or atomic
//! mass units, densities in GeV/cm³ and frequencies in Hz.

use std::f64::consts::TAU;

/// Elementary charge, exact since the 2019 SI redefinition (J per eV).
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;

/// Unified atomic mass unit (CODATA 2018), kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Planck constant, exact, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Local dark-matter density commonly quoted for the solar neighbourhood, GeV/cm³.
pub const LOCAL_DM_DENSITY_GEV_CM3: f64 = 0.4;

pub fn ev_to_joule(ev: f64) -> f64 {
    ev * ELECTRON_VOLT
}

/// Mass given as a rest energy in eV (i.e. eV/c²) converted to kg.
pub fn ev_mass_to_kg(ev: f64, c: f64) -> f64 {
    ev_to_joule(ev) / (c * c)
}

pub fn amu_to_kg(u: f64) -> f64 {
    u * ATOMIC_MASS_UNIT
}

/// Energy density in GeV/cm³ to J/m³.
pub fn gev_per_cm3_to_si(rho: f64) -> f64 {
    rho * 1e9 * ELECTRON_VOLT * 1e6
}

/// Ordinary frequency (Hz) to angular frequency (rad/s).
pub fn hz_to_rad_per_s(f: f64) -> f64 {
    f * TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_conversion() {
        // 1 GeV/cm³ = 1.602176634e-10 J / 1e-6 m³
        let si = gev_per_cm3_to_si(1.0);
        assert!((si - 1.602_176_634e-4).abs() <= 1e-19);
    }

    #[test]
    fn hz_round_trip() {
        assert_eq!(hz_to_rad_per_s(1.0), TAU);
    }
}
