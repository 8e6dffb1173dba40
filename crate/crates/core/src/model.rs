//! Physical constants, atomic species, dilaton field and the perturbation
//! parameters derived from them.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::units;

/// Fundamental constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light, m/s.
    pub c: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Newtonian gravitational constant, m³/(kg s²).
    pub g_newton: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 recommended values.
    pub const CODATA_2018: Self = Self { c: 299_792_458.0, hbar: 1.054_571_817e-34, g_newton: 6.674_30e-11 };

    pub fn new(c: f64, hbar: f64, g_newton: f64) -> Result<Self> {
        for (name, v) in [("c", c), ("hbar", hbar), ("G", g_newton)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { c, hbar, g_newton })
    }

    /// (ħc/G)^½, kg.
    pub fn planck_mass(&self) -> f64 {
        (self.hbar * self.c / self.g_newton).sqrt()
    }

    /// (ħG/c³)^½, m.
    pub fn planck_length(&self) -> f64 {
        (self.hbar * self.g_newton / (self.c * self.c * self.c)).sqrt()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// A two-level atom: mean rest mass, mass defect and the dilaton couplings of
/// the ground and excited state. The couplings are held as mean and
/// difference so that a tiny Δε/ε̄ survives exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpecies {
    constants: PhysicalConstants,
    mean_mass: f64,
    mass_defect: f64,
    eps_bar: f64,
    delta_eps: f64,
}

impl AtomSpecies {
    pub fn new(constants: PhysicalConstants, mean_mass: f64, mass_defect: f64, eps_g: f64, eps_e: f64) -> Result<Self> {
        Self::with_mean_and_differential(constants, mean_mass, mass_defect, 0.5 * (eps_e + eps_g), eps_e - eps_g)
    }

    /// Builds the species from mean and differential coupling instead of the
    /// per-state values.
    pub fn with_mean_and_differential(
        constants: PhysicalConstants,
        mean_mass: f64,
        mass_defect: f64,
        eps_bar: f64,
        delta_eps: f64,
    ) -> Result<Self> {
        if !(mean_mass.is_finite() && mean_mass > 0.0) {
            return Err(Error::domain(format!("mean mass must be positive, got {mean_mass}")));
        }
        if !mass_defect.is_finite() || mass_defect.abs() >= mean_mass {
            return Err(Error::domain(format!("mass defect must satisfy |dm| < mean mass, got {mass_defect}")));
        }
        if !(eps_bar.is_finite() && delta_eps.is_finite()) {
            return Err(Error::domain("state couplings must be finite"));
        }
        Ok(Self { constants, mean_mass, mass_defect, eps_bar, delta_eps })
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
    pub fn mean_mass(&self) -> f64 {
        self.mean_mass
    }
    pub fn mass_defect(&self) -> f64 {
        self.mass_defect
    }
    pub fn eps_g(&self) -> f64 {
        self.eps_bar - 0.5 * self.delta_eps
    }
    pub fn eps_e(&self) -> f64 {
        self.eps_bar + 0.5 * self.delta_eps
    }

    /// Mean coupling (ε_e + ε_g)/2.
    pub fn eps_bar(&self) -> f64 {
        self.eps_bar
    }

    /// Differential coupling ε_e − ε_g.
    pub fn delta_eps(&self) -> f64 {
        self.delta_eps
    }

    /// Dimensionless mass defect Δm₀/m̄₀.
    pub fn delta_mu0(&self) -> f64 {
        self.mass_defect / self.mean_mass
    }

    /// Compton frequency m̄₀c²/ħ, rad/s.
    pub fn compton_frequency(&self) -> f64 {
        let c = self.constants.c;
        self.mean_mass * c * c / self.constants.hbar
    }

    /// Atomic transition frequency Δm₀c²/ħ, rad/s.
    pub fn transition_frequency(&self) -> f64 {
        let c = self.constants.c;
        self.mass_defect * c * c / self.constants.hbar
    }

    /// The species as seen by a state-preserving (Bragg) interferometer:
    /// no mass defect and both states coupled with the mean coupling.
    pub fn bragg_effective(&self) -> Self {
        Self { mass_defect: 0.0, delta_eps: 0.0, ..*self }
    }

    pub fn with_couplings(&self, eps_g: f64, eps_e: f64) -> Result<Self> {
        Self::new(self.constants, self.mean_mass, self.mass_defect, eps_g, eps_e)
    }

    pub fn with_mean_couplings(&self, eps_bar: f64, delta_eps: f64) -> Result<Self> {
        Self::with_mean_and_differential(self.constants, self.mean_mass, self.mass_defect, eps_bar, delta_eps)
    }

    pub fn with_mass_defect(&self, mass_defect: f64) -> Result<Self> {
        Self::with_mean_and_differential(self.constants, self.mean_mass, mass_defect, self.eps_bar, self.delta_eps)
    }
}

/// Shipped atomic presets. Couplings are not part of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpeciesPreset {
    /// ⁸⁸Sr on the 698 nm ¹S₀–³P₀ clock line (Ω/ω_c ≈ 2e-11).
    Strontium88,
    /// ⁸⁷Rb ground-state hyperfine splitting (Ω/ω_c ≈ 3.5e-16), as used by
    /// Raman interferometers.
    Rubidium87,
}

impl SpeciesPreset {
    pub const ALL: [Self; 2] = [Self::Strontium88, Self::Rubidium87];

    pub fn name(self) -> &'static str {
        match self {
            Self::Strontium88 => "strontium88",
            Self::Rubidium87 => "rubidium87",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "strontium88" | "strontium" | "sr88" | "sr" => Some(Self::Strontium88),
            "rubidium87" | "rubidium" | "rb87" | "rb" => Some(Self::Rubidium87),
            _ => None,
        }
    }

    /// Atomic mass, kg.
    pub fn mass(self) -> f64 {
        match self {
            Self::Strontium88 => units::amu_to_kg(87.905_612_257_1),
            Self::Rubidium87 => units::amu_to_kg(86.909_180_527),
        }
    }

    /// Transition frequency, Hz.
    pub fn transition_hz(self) -> f64 {
        match self {
            Self::Strontium88 => 429_228_004_229_873.0,
            Self::Rubidium87 => 6_834_682_610.904_29,
        }
    }

    /// Effective wave vector of the matching diffraction scheme, rad/m:
    /// single photon at 698 nm for Sr, counter-propagating 780 nm pair for Rb.
    pub fn default_wavevector(self) -> f64 {
        match self {
            Self::Strontium88 => TAU / 698.445_7e-9,
            Self::Rubidium87 => 2.0 * TAU / 780.241_2e-9,
        }
    }

    pub fn species(self, constants: PhysicalConstants, eps_g: f64, eps_e: f64) -> Result<AtomSpecies> {
        let energy = units::PLANCK * self.transition_hz();
        let mass_defect = energy / (constants.c * constants.c);
        AtomSpecies::new(constants, self.mass(), mass_defect, eps_g, eps_e)
    }
}

/// Parameters of the dilaton background and of its coupling to the source
/// mass. The field carries no spatial wave vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilatonParams {
    pub omega_rho: f64,
    pub phi_rho: f64,
    pub rho_0: f64,
    pub eps_s: f64,
    pub phi_s: f64,
    /// Energy density (J/m³) the amplitude was derived from, if any.
    pub rho_dm: Option<f64>,
}

impl DilatonParams {
    pub fn new(omega_rho: f64, phi_rho: f64, rho_0: f64, eps_s: f64, phi_s: f64) -> Result<Self> {
        if !(omega_rho.is_finite() && omega_rho > 0.0) {
            return Err(Error::domain(format!("omega_rho must be positive, got {omega_rho}")));
        }
        if !(phi_rho.is_finite() && rho_0.is_finite() && eps_s.is_finite() && phi_s.is_finite()) {
            return Err(Error::domain("dilaton parameters must be finite"));
        }
        Ok(Self { omega_rho, phi_rho: phi_rho.rem_euclid(TAU), rho_0, eps_s, phi_s, rho_dm: None })
    }

    /// Amplitude derived from a dark-matter energy density `rho_dm` (J/m³).
    pub fn from_density(
        constants: &PhysicalConstants,
        omega_rho: f64,
        rho_dm: f64,
        phi_rho: f64,
        eps_s: f64,
        phi_s: f64,
    ) -> Result<Self> {
        let rho_0 = dilaton_amplitude(constants, omega_rho, rho_dm)?;
        let mut p = Self::new(omega_rho, phi_rho, rho_0, eps_s, phi_s)?;
        p.rho_dm = Some(rho_dm);
        Ok(p)
    }

    /// Same field with a different dilaton phase; the phase is not reduced so
    /// that averaging grids stay exactly as requested.
    pub fn with_phi_rho(&self, phi_rho: f64) -> Self {
        Self { phi_rho, ..*self }
    }

    pub fn with_phi_s(&self, phi_s: f64) -> Self {
        Self { phi_s, ..*self }
    }

    /// Changes the frequency. A density-derived amplitude is re-derived so that
    /// ρ₀ ∝ 1/ω_ρ holds.
    pub fn with_omega(&self, constants: &PhysicalConstants, omega_rho: f64) -> Result<Self> {
        match self.rho_dm {
            Some(rho) => Self::from_density(constants, omega_rho, rho, self.phi_rho, self.eps_s, self.phi_s),
            None => Self::new(omega_rho, self.phi_rho, self.rho_0, self.eps_s, self.phi_s),
        }
    }
}

/// Dimensionless dilaton amplitude for a field of frequency `omega_rho`
/// carrying energy density `rho_dm` (J/m³).
pub fn dilaton_amplitude(constants: &PhysicalConstants, omega_rho: f64, rho_dm: f64) -> Result<f64> {
    if !(omega_rho.is_finite() && omega_rho > 0.0) {
        return Err(Error::domain(format!("omega_rho must be positive, got {omega_rho}")));
    }
    if !(rho_dm.is_finite() && rho_dm >= 0.0) {
        return Err(Error::domain(format!("dark-matter density must be non-negative, got {rho_dm}")));
    }
    let c = constants.c;
    let planck_energy = constants.planck_mass() * c * c;
    let lp = constants.planck_length();
    let prefactor = planck_energy / (constants.hbar * omega_rho);
    Ok(prefactor * (8.0 * PI * rho_dm * lp * lp * lp / planck_energy).sqrt())
}

/// Dilaton field ε_S g₀ z/c² + ρ₀ cos(ω_ρ t + φ_ρ).
pub fn dilaton_field(z: f64, t: f64, params: &DilatonParams, g0: f64, constants: &PhysicalConstants) -> f64 {
    let c = constants.c;
    params.eps_s * g0 * z / (c * c) + params.rho_0 * (params.omega_rho * t + params.phi_rho).cos()
}

/// Whether next-order products of a coupling with Δm₀/m̄₀ are kept in the
/// oscillation amplitudes of μ̄_DM and Δμ_DM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BracePolicy {
    #[default]
    Dropped,
    Included,
}

/// Amplitudes of the dimensionless perturbations entering the kinetic and
/// potential energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationParameters {
    /// Amplitude of μ̄_DM(t).
    pub mu_bar_amp: f64,
    /// Amplitude of Δμ_DM(t).
    pub delta_mu_amp: f64,
    pub gamma_bar_ep: f64,
    pub delta_gamma_ep: f64,
    /// Amplitude of γ̄_DM(t) (oscillating gravity).
    pub gamma_dm_amp: f64,
    pub braces: BracePolicy,
}

pub fn perturbation_parameters(
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    braces: BracePolicy,
) -> PerturbationParameters {
    let eps_bar = species.eps_bar();
    let delta_eps = species.delta_eps();
    let rho_0 = dilaton.rho_0;
    let (mu_bar_amp, delta_mu_amp) = match braces {
        BracePolicy::Dropped => (rho_0 * eps_bar, rho_0 * delta_eps),
        BracePolicy::Included => {
            let dmu = species.delta_mu0();
            (rho_0 * (eps_bar + dmu * delta_eps / 4.0), rho_0 * (delta_eps + dmu * eps_bar))
        }
    };
    PerturbationParameters {
        mu_bar_amp,
        delta_mu_amp,
        gamma_bar_ep: dilaton.eps_s * eps_bar,
        delta_gamma_ep: dilaton.eps_s * delta_eps,
        gamma_dm_amp: dilaton.eps_s * rho_0,
        braces,
    }
}

/// Amplitude δΩ = (ω_c Δε + Ω ε̄) ρ₀ of the transition-frequency modulation, rad/s.
pub fn transition_modulation_amplitude(species: &AtomSpecies, rho_0: f64) -> f64 {
    (species.compton_frequency() * species.delta_eps() + species.transition_frequency() * species.eps_bar()) * rho_0
}

/// Oscillation amplitude (ω_c ε̄ + Ω Δε/4) ρ₀ of the Compton frequency, rad/s.
pub fn compton_modulation_amplitude(species: &AtomSpecies, rho_0: f64) -> f64 {
    (species.compton_frequency() * species.eps_bar() + species.transition_frequency() * species.delta_eps() / 4.0)
        * rho_0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const K: PhysicalConstants = PhysicalConstants::CODATA_2018;

    fn strontium(eps_g: f64, eps_e: f64) -> AtomSpecies {
        SpeciesPreset::Strontium88.species(K, eps_g, eps_e).unwrap()
    }

    #[test]
    fn planck_units() {
        assert_relative_eq!(K.planck_mass(), 2.176_434_342_051_126_7e-8, max_relative = 1e-15);
        assert_relative_eq!(K.planck_length(), 1.616_255_023_928_550_1e-35, max_relative = 1e-15);
    }

    #[test]
    fn amplitude_zero_density() {
        assert_eq!(dilaton_amplitude(&K, 3.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn amplitude_halves_when_frequency_doubles() {
        let rho = units::gev_per_cm3_to_si(0.4);
        let a = dilaton_amplitude(&K, 0.37, rho).unwrap();
        let b = dilaton_amplitude(&K, 0.74, rho).unwrap();
        assert_relative_eq!(b / a, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn amplitude_golden_local_density() {
        // Direct 40-digit evaluation of (m_P c²/ħω) sqrt(8π ρ L_P³ / m_P c²)
        // with CODATA 2018 constants, ω = 1 rad/s, ρ = 0.4 GeV/cm³.
        let rho = units::gev_per_cm3_to_si(0.4);
        let r = dilaton_amplitude(&K, 1.0, rho).unwrap();
        assert_relative_eq!(r, 1.093_672_472_806_499_3e-15, max_relative = 1e-13);
    }

    #[test]
    fn amplitude_rejects_bad_frequency() {
        assert!(matches!(dilaton_amplitude(&K, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(dilaton_amplitude(&K, -1.0, 1.0), Err(Error::Domain(_))));
        assert!(dilaton_amplitude(&K, 1.0, -1.0).is_err());
    }

    #[test]
    fn field_zero_cases() {
        let p = DilatonParams::new(2.0, 0.0, 0.0, 1e-3, 0.0).unwrap();
        assert_eq!(dilaton_field(0.0, 1.7, &p, 9.81, &K), 0.0);
        // ω t + φ = π/2
        let p = DilatonParams::new(2.0, 0.0, 1e-3, 0.3, 0.0).unwrap();
        let v = dilaton_field(0.0, std::f64::consts::FRAC_PI_4, &p, 9.81, &K);
        assert!(v.abs() < 1e-18);
    }

    #[test]
    fn species_rejects_unphysical_masses() {
        assert!(AtomSpecies::new(K, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(AtomSpecies::new(K, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(AtomSpecies::new(K, 1.0, -1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn preset_frequency_ratios() {
        let sr = strontium(0.0, 0.0);
        let r = sr.transition_frequency() / sr.compton_frequency();
        assert!(r > 1e-11 && r < 1e-10, "Sr ratio {r}");
        let rb = SpeciesPreset::Rubidium87.species(K, 0.0, 0.0).unwrap();
        let r = rb.transition_frequency() / rb.compton_frequency();
        assert!(r > 1e-16 && r < 1e-15, "Rb ratio {r}");
    }

    #[test]
    fn identical_couplings_have_no_differential_part() {
        let s = strontium(2e-4, 2e-4);
        let d = DilatonParams::new(1.0, 0.0, 1e-6, 0.0, 0.0).unwrap();
        let p = perturbation_parameters(&s, &d, BracePolicy::Dropped);
        assert_eq!(s.delta_eps(), 0.0);
        assert_eq!(p.delta_mu_amp, 0.0);
    }

    #[test]
    fn opposite_couplings_have_no_mean_part() {
        let s = strontium(-3e-4, 3e-4);
        let d = DilatonParams::new(1.0, 0.0, 1e-6, 0.0, 0.0).unwrap();
        let p = perturbation_parameters(&s, &d, BracePolicy::Dropped);
        assert_eq!(s.eps_bar(), 0.0);
        assert_eq!(p.mu_bar_amp, 0.0);
    }

    #[test]
    fn braces_vanish_without_mass_defect() {
        let s = AtomSpecies::new(K, 1.4e-25, 0.0, 1e-4, 3e-4).unwrap();
        let d = DilatonParams::new(1.0, 0.0, 1e-6, 2e-3, 0.0).unwrap();
        assert_eq!(
            perturbation_parameters(&s, &d, BracePolicy::Dropped),
            PerturbationParameters {
                braces: BracePolicy::Dropped,
                ..perturbation_parameters(&s, &d, BracePolicy::Included)
            }
        );
    }

    #[test]
    fn modulation_limits() {
        let rho = 1e-7;
        let s = strontium(4e-4, 4e-4);
        assert_relative_eq!(
            transition_modulation_amplitude(&s, rho),
            s.transition_frequency() * s.eps_bar() * rho,
            max_relative = 1e-15
        );
        let s = strontium(-4e-4, 4e-4);
        assert_relative_eq!(
            transition_modulation_amplitude(&s, rho),
            s.compton_frequency() * s.delta_eps() * rho,
            max_relative = 1e-15
        );
        assert_eq!(compton_modulation_amplitude(&s, 0.0), 0.0);
        let s = strontium(1e-3, 1e-3);
        assert_relative_eq!(
            compton_modulation_amplitude(&s, rho),
            s.compton_frequency() * 1e-3 * rho,
            max_relative = 1e-15
        );
    }

    #[test]
    fn strontium_modulation_dominated_by_differential_term() {
        // Ω/ω_c ~ 1e-11: once Δε/ε̄ = 1e-8 the Compton term is ~1e3 times larger.
        let eps_bar = 1e-4;
        let s = AtomSpecies::with_mean_and_differential(
            K,
            SpeciesPreset::Strontium88.mass(),
            SpeciesPreset::Strontium88.species(K, 0.0, 0.0).unwrap().mass_defect(),
            eps_bar,
            1e-8 * eps_bar,
        )
        .unwrap();
        let compton_part = s.compton_frequency() * s.delta_eps();
        let clock_part = s.transition_frequency() * s.eps_bar();
        assert!(compton_part / clock_part > 100.0);
    }

    proptest! {
        #[test]
        fn coupling_identities(
            mass in 1e-27f64..1e-24,
            defect_frac in -0.5f64..0.5,
            eps_g in -1e-2f64..1e-2,
            eps_e in -1e-2f64..1e-2,
            rho_0 in 0.0f64..1e-3,
            eps_s in -1e-2f64..1e-2,
        ) {
            let s = AtomSpecies::new(K, mass, defect_frac * mass, eps_g, eps_e).unwrap();
            let d = DilatonParams::new(1.0, 0.0, rho_0, eps_s, 0.0).unwrap();
            let p = perturbation_parameters(&s, &d, BracePolicy::Dropped);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-15 * a.abs().max(b.abs()) + f64::MIN_POSITIVE;
            prop_assert!(close(s.eps_bar(), (eps_e + eps_g) / 2.0));
            prop_assert!(close(s.delta_eps(), eps_e - eps_g));
            prop_assert!(close(s.delta_mu0(), defect_frac * mass / mass));
            prop_assert!(close(s.compton_frequency(), mass * K.c * K.c / K.hbar));
            prop_assert!(close(s.transition_frequency(), defect_frac * mass * K.c * K.c / K.hbar));
            prop_assert!(close(p.mu_bar_amp, rho_0 * s.eps_bar()));
            prop_assert!(close(p.delta_mu_amp, rho_0 * s.delta_eps()));
            prop_assert!(close(p.gamma_bar_ep, eps_s * s.eps_bar()));
            prop_assert!(close(p.delta_gamma_ep, eps_s * s.delta_eps()));
            prop_assert!(close(p.gamma_dm_amp, eps_s * rho_0));
        }

        #[test]
        fn amplitude_times_frequency_is_constant(log_w in -6.0f64..4.0) {
            let rho = units::gev_per_cm3_to_si(0.4);
            let w = 10f64.powf(log_w);
            let a = dilaton_amplitude(&K, w, rho).unwrap() * w;
            let b = dilaton_amplitude(&K, 1.0, rho).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }

        #[test]
        fn transition_modulation_is_bilinear(
            a in -3.0f64..3.0, b in -3.0f64..3.0,
            deps in -1e-4f64..1e-4, ebar in -1e-4f64..1e-4,
        ) {
            let base = strontium(0.0, 0.0);
            let (m, dm) = (base.mean_mass(), base.mass_defect());
            let make = |e_bar: f64, d_eps: f64| {
                AtomSpecies::with_mean_and_differential(K, m, dm, e_bar, d_eps).unwrap()
            };
            let full = transition_modulation_amplitude(&make(b * ebar, a * deps), 1.0);
            let parts = a * transition_modulation_amplitude(&make(0.0, deps), 1.0)
                + b * transition_modulation_amplitude(&make(ebar, 0.0), 1.0);
            let scale = base.compton_frequency() * deps.abs().max(1e-30) * 4.0
                + base.transition_frequency() * ebar.abs() * 4.0;
            prop_assert!((full - parts).abs() <= 1e-12 * scale);
        }
    }
}
