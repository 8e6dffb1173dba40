//! Standard phase and dilaton-induced phase contributions of a single
//! Mach-Zehnder interferometer.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    perturbation_parameters, transition_modulation_amplitude, AtomSpecies, DilatonParams, PerturbationParameters,
};
use crate::timescales::Timescales;

/// How the light pulses couple momentum and internal state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Diffraction {
    /// State-changing single-photon (clock) transition.
    #[default]
    SinglePhoton,
    /// State-changing two-photon transition; shares the single-photon formulas
    /// with a hyperfine Ω and the effective two-photon k.
    Raman,
    /// State-preserving two-photon momentum transfer.
    Bragg,
}

impl Diffraction {
    pub fn preserves_state(self) -> bool {
        matches!(self, Self::Bragg)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SinglePhoton => "single_photon",
            Self::Raman => "raman",
            Self::Bragg => "bragg",
        }
    }
}

impl FromStr for Diffraction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "single_photon" | "singlephoton" | "clock" => Ok(Self::SinglePhoton),
            "raman" => Ok(Self::Raman),
            "bragg" => Ok(Self::Bragg),
            other => {
                Err(Error::domain(format!("unknown diffraction '{other}' (expected single_photon, raman or bragg)")))
            }
        }
    }
}

impl fmt::Display for Diffraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Geometry of one closed three-pulse interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziGeometry {
    /// Effective wave vector, rad/m.
    pub k: f64,
    /// Interrogation half-time T, s.
    pub t_half: f64,
    /// Time of the first pulse, s.
    pub t0: f64,
    /// Initial position, m.
    pub z0: f64,
    /// Initial momentum, kg m/s.
    pub p0: f64,
    /// Gravitational acceleration, m/s².
    pub g0: f64,
    pub diffraction: Diffraction,
}

impl MziGeometry {
    pub fn new(k: f64, t_half: f64, t0: f64, z0: f64, p0: f64, g0: f64, diffraction: Diffraction) -> Result<Self> {
        let g = Self { k, t_half, t0, z0, p0, g0, diffraction };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k != 0.0) {
            return Err(Error::domain(format!("wave vector must be finite and nonzero, got {}", self.k)));
        }
        if !(self.t_half.is_finite() && self.t_half > 0.0) {
            return Err(Error::domain(format!("interrogation time must be positive, got {}", self.t_half)));
        }
        if !(self.t0.is_finite() && self.z0.is_finite() && self.p0.is_finite() && self.g0.is_finite()) {
            return Err(Error::domain("geometry fields must be finite"));
        }
        Ok(())
    }

    /// Same pulse sequence for an atom starting at (z0, p0) at time t0.
    pub fn with_start(&self, z0: f64, p0: f64, t0: f64) -> Self {
        Self { z0, p0, t0, ..*self }
    }

    pub fn with_gravity(&self, g0: f64) -> Self {
        Self { g0, ..*self }
    }

    pub fn with_diffraction(&self, diffraction: Diffraction) -> Self {
        Self { diffraction, ..*self }
    }

    /// Photon momentum ħk.
    pub fn photon_momentum(&self, species: &AtomSpecies) -> f64 {
        species.constants().hbar * self.k
    }

    /// ℘₀ = p₀/(ħk).
    pub fn momentum_ratio(&self, species: &AtomSpecies) -> f64 {
        self.p0 / self.photon_momentum(species)
    }

    /// ℘̄ at the mirror pulse, (p₀ − m̄₀g₀T + ħk/2)/(ħk).
    pub fn mean_momentum_ratio_at_mirror(&self, species: &AtomSpecies) -> f64 {
        let hk = self.photon_momentum(species);
        (self.p0 - species.mean_mass() * self.g0 * self.t_half + 0.5 * hk) / hk
    }

    /// Recoil frequency ħk²/(2m̄₀), rad/s.
    pub fn recoil_frequency(&self, species: &AtomSpecies) -> f64 {
        species.constants().hbar * self.k * self.k / (2.0 * species.mean_mass())
    }
}

/// Label of a phase contribution: 0 is the rest-mass term `m`, 1 to 14 the
/// kinetic and potential terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseLabel(u8);

impl PhaseLabel {
    pub const M: Self = Self(0);
    pub const COUNT: usize = 15;
    pub const ALL: [Self; 15] = {
        let mut all = [Self(0); 15];
        let mut i = 0;
        while i < 15 {
            all[i] = Self(i as u8);
            i += 1;
        }
        all
    };

    pub fn new(index: u8) -> Result<Self> {
        if (index as usize) < Self::COUNT {
            Ok(Self(index))
        } else {
            Err(Error::domain(format!("phase label index {index} out of range 0..=14")))
        }
    }

    /// Numbered label φ₁ … φ₁₄.
    pub fn phi(n: u8) -> Self {
        assert!((1..=14).contains(&n), "phase label {n} out of range 1..=14");
        Self(n)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Labels whose expression carries Δε or Δμ₀; they vanish for Bragg.
    pub fn is_state_dependent(self) -> bool {
        matches!(self.0, 0 | 3 | 4 | 5 | 6 | 8 | 11 | 12 | 13 | 14)
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            f.write_str("m")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for PhaseLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix("phi_").or_else(|| t.strip_prefix("phi")).unwrap_or(t);
        if t == "m" {
            return Ok(Self::M);
        }
        t.parse::<u8>().map_err(|_| Error::domain(format!("unknown phase label '{s}'"))).and_then(|n| {
            if n == 0 {
                Err(Error::domain("phase label 0 is spelled 'm'"))
            } else {
                Self::new(n)
            }
        })
    }
}

/// Frequencies and coupling amplitudes entering the phase formulas, after the
/// diffraction type has been taken into account.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    /// Amplitude δΩ of the transition-frequency modulation, rad/s.
    pub delta_omega: f64,
    pub mu_bar: f64,
    pub delta_mu: f64,
    pub gamma_bar_ep: f64,
    pub delta_gamma_ep: f64,
    pub gamma_dm: f64,
    pub delta_mu0: f64,
    pub compton_frequency: f64,
}

impl Couplings {
    /// For Bragg diffraction the atom stays in one state, which is described by
    /// an effective species with no mass defect and both couplings equal to ε̄.
    pub fn resolve(
        diffraction: Diffraction,
        species: &AtomSpecies,
        dilaton: &DilatonParams,
        pert: &PerturbationParameters,
    ) -> Self {
        if diffraction.preserves_state() {
            let eff = species.bragg_effective();
            let p = perturbation_parameters(&eff, dilaton, pert.braces);
            Self {
                delta_omega: 0.0,
                mu_bar: p.mu_bar_amp,
                delta_mu: 0.0,
                gamma_bar_ep: p.gamma_bar_ep,
                delta_gamma_ep: 0.0,
                gamma_dm: pert.gamma_dm_amp,
                delta_mu0: 0.0,
                compton_frequency: eff.compton_frequency(),
            }
        } else {
            Self {
                delta_omega: transition_modulation_amplitude(species, dilaton.rho_0),
                mu_bar: pert.mu_bar_amp,
                delta_mu: pert.delta_mu_amp,
                gamma_bar_ep: pert.gamma_bar_ep,
                delta_gamma_ep: pert.delta_gamma_ep,
                gamma_dm: pert.gamma_dm_amp,
                delta_mu0: species.delta_mu0(),
                compton_frequency: species.compton_frequency(),
            }
        }
    }
}

/// Standard phase −k g₀ T².
pub fn standard_phase(geom: &MziGeometry) -> f64 {
    -geom.k * geom.g0 * geom.t_half * geom.t_half
}

struct Context {
    c: Couplings,
    ts: Timescales,
    k: f64,
    g: f64,
    t2: f64,
    z0: f64,
    wp0: f64,
    wp_bar: f64,
    omega_k: f64,
    c_light: f64,
}

impl Context {
    fn new(
        geom: &MziGeometry,
        species: &AtomSpecies,
        dilaton: &DilatonParams,
        pert: &PerturbationParameters,
    ) -> Result<Self> {
        geom.validate()?;
        let ts = Timescales::evaluate(geom.t0, geom.t_half, dilaton.omega_rho, dilaton.phi_rho, dilaton.phi_s)?;
        Ok(Self {
            c: Couplings::resolve(geom.diffraction, species, dilaton, pert),
            ts,
            k: geom.k,
            g: geom.g0,
            t2: geom.t_half * geom.t_half,
            z0: geom.z0,
            wp0: geom.momentum_ratio(species),
            wp_bar: geom.mean_momentum_ratio_at_mirror(species),
            omega_k: geom.recoil_frequency(species),
            c_light: species.constants().c,
        })
    }

    fn phase(&self, label: PhaseLabel) -> f64 {
        let Self { c, ts, k, g, t2, z0, wp0, wp_bar, omega_k, c_light } = *self;
        let c2 = c_light * c_light;
        match label.0 {
            0 => -c.delta_omega * ts.tau1,
            1 => c.mu_bar * omega_k * ts.tau1 * (1.0 + 2.0 * wp0),
            2 => -c.mu_bar * k * g * ts.tau2_sq,
            3 | 11 => c.delta_mu0 * k * g * t2 * wp_bar,
            4 => c.delta_mu * omega_k * ts.tau1 * (wp0 * wp0 + wp0 + 0.5),
            5 | 13 => -c.delta_mu * k * g * ts.tau2_sq * (wp0 + 0.5),
            6 | 14 => c.delta_mu * (g * g / (2.0 * c2)) * c.compton_frequency * ts.tau3_cu,
            7 => -c.gamma_bar_ep * k * g * t2,
            8 => c.delta_gamma_ep * k * g * t2 * wp_bar,
            9 => -c.gamma_dm * k * g * ts.tau_s_sq,
            10 => -c.mu_bar * k * g * ts.tau_ep_sq,
            12 => -c.delta_mu * (g * z0 / c2) * c.compton_frequency * ts.tau1,
            _ => unreachable!("label index checked at construction"),
        }
    }
}

/// Phase contribution of one label, rad.
pub fn phase_contribution(
    label: PhaseLabel,
    geom: &MziGeometry,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<f64> {
    if geom.diffraction.preserves_state() && label.is_state_dependent() {
        geom.validate()?;
        return Ok(0.0);
    }
    Ok(Context::new(geom, species, dilaton, pert)?.phase(label))
}

/// All contributions of one interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    pub standard: f64,
    /// Indexed by [`PhaseLabel::index`].
    pub contributions: [f64; PhaseLabel::COUNT],
    /// Standard phase plus the contributions, summed in label order.
    pub total: f64,
}

impl PhaseBreakdown {
    pub fn get(&self, label: PhaseLabel) -> f64 {
        self.contributions[label.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (PhaseLabel, f64)> + '_ {
        PhaseLabel::ALL.into_iter().zip(self.contributions.iter().copied())
    }

    /// Sum of the dilaton-induced contributions only.
    pub fn dilaton_total(&self) -> f64 {
        self.contributions.iter().sum()
    }
}

pub fn phase_breakdown(
    geom: &MziGeometry,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<PhaseBreakdown> {
    let ctx = Context::new(geom, species, dilaton, pert)?;
    let bragg = geom.diffraction.preserves_state();
    let mut contributions = [0.0; PhaseLabel::COUNT];
    for label in PhaseLabel::ALL {
        if !(bragg && label.is_state_dependent()) {
            contributions[label.index()] = ctx.phase(label);
        }
    }
    let standard = standard_phase(geom);
    let total = contributions.iter().fold(standard, |acc, v| acc + v);
    Ok(PhaseBreakdown { standard, contributions, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BracePolicy, PhysicalConstants, SpeciesPreset};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn scenario(diffraction: Diffraction) -> (MziGeometry, AtomSpecies, DilatonParams, PerturbationParameters) {
        let sp = SpeciesPreset::Strontium88.species(PhysicalConstants::CODATA_2018, 3e-4, 7e-4).unwrap();
        let k = SpeciesPreset::Strontium88.default_wavevector();
        let hk = PhysicalConstants::CODATA_2018.hbar * k;
        let geom = MziGeometry::new(k, 0.8, 0.3, 1.5, 2.5 * hk, 9.81, diffraction).unwrap();
        let dil = DilatonParams::new(2.1, 0.7, 1e-12, 2e-4, 0.4).unwrap();
        let pert = perturbation_parameters(&sp, &dil, BracePolicy::Dropped);
        (geom, sp, dil, pert)
    }

    #[test]
    fn standard_phase_arithmetic() {
        let (g, ..) = scenario(Diffraction::SinglePhoton);
        let g = MziGeometry { k: 1e7, g0: 9.8, t_half: 1.0, ..g };
        assert_relative_eq!(standard_phase(&g), -9.8e7, max_relative = 1e-15);
        assert_eq!(standard_phase(&MziGeometry { k: -1e7, ..g }), 9.8e7);
        assert_eq!(standard_phase(&g.with_gravity(0.0)), 0.0);
    }

    #[test]
    fn label_round_trip() {
        for l in PhaseLabel::ALL {
            assert_eq!(l.to_string().parse::<PhaseLabel>().unwrap(), l);
        }
        assert_eq!("phi_m".parse::<PhaseLabel>().unwrap(), PhaseLabel::M);
        assert_eq!("phi12".parse::<PhaseLabel>().unwrap(), PhaseLabel::phi(12));
        assert!("15".parse::<PhaseLabel>().is_err());
        assert!("0".parse::<PhaseLabel>().is_err());
        assert!("x".parse::<PhaseLabel>().is_err());
    }

    #[test]
    fn phi7_vanishes_without_gradient_coupling() {
        let (g, sp, dil, _) = scenario(Diffraction::SinglePhoton);
        let dil = DilatonParams { eps_s: 0.0, ..dil };
        let pert = perturbation_parameters(&sp, &dil, BracePolicy::Dropped);
        assert_eq!(phase_contribution(PhaseLabel::phi(7), &g, &sp, &dil, &pert).unwrap(), 0.0);
    }

    #[test]
    fn phi_m_vanishes_without_couplings() {
        let (g, sp, dil, _) = scenario(Diffraction::SinglePhoton);
        let sp = sp.with_couplings(0.0, 0.0).unwrap();
        let pert = perturbation_parameters(&sp, &dil, BracePolicy::Dropped);
        assert_eq!(phase_contribution(PhaseLabel::M, &g, &sp, &dil, &pert).unwrap(), 0.0);
    }

    #[test]
    fn bragg_keeps_only_five_labels() {
        let (g, sp, dil, pert) = scenario(Diffraction::Bragg);
        let b = phase_breakdown(&g, &sp, &dil, &pert).unwrap();
        let nonzero: Vec<_> = b.iter().filter(|(_, v)| *v != 0.0).map(|(l, _)| l.index()).collect();
        assert_eq!(nonzero, vec![1, 2, 7, 9, 10]);
        for (l, v) in b.iter() {
            if l.is_state_dependent() {
                assert_eq!(v.to_bits(), 0.0f64.to_bits());
            }
        }
    }

    #[test]
    fn no_field_leaves_standard_phase() {
        let (g, sp, dil, _) = scenario(Diffraction::SinglePhoton);
        let dil = DilatonParams { rho_0: 0.0, eps_s: 0.0, ..dil };
        let pert = perturbation_parameters(&sp, &dil, BracePolicy::Dropped);
        let b = phase_breakdown(&g, &sp, &dil, &pert).unwrap();
        // the mass-defect terms are static and survive; only dilaton labels must vanish
        for (l, v) in b.iter() {
            if !matches!(l.index(), 3 | 11) {
                assert_eq!(v, 0.0, "label {l}");
            }
        }
        let sp = sp.with_mass_defect(0.0).unwrap();
        let b = phase_breakdown(&g, &sp, &dil, &pert).unwrap();
        assert_eq!(b.total, b.standard);
    }

    #[test]
    fn breakdown_matches_single_contributions() {
        for d in [Diffraction::SinglePhoton, Diffraction::Raman, Diffraction::Bragg] {
            let (g, sp, dil, pert) = scenario(d);
            let b = phase_breakdown(&g, &sp, &dil, &pert).unwrap();
            let mut acc = b.standard;
            for l in PhaseLabel::ALL {
                let v = phase_contribution(l, &g, &sp, &dil, &pert).unwrap();
                assert_eq!(v, b.get(l));
                acc += v;
            }
            assert_eq!(acc, b.total);
        }
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        let (g, sp, dil, pert) = scenario(Diffraction::SinglePhoton);
        let bad = MziGeometry { k: 0.0, ..g };
        assert!(phase_contribution(PhaseLabel::M, &bad, &sp, &dil, &pert).is_err());
        let bad = MziGeometry { t_half: -1.0, ..g };
        assert!(phase_breakdown(&bad, &sp, &dil, &pert).is_err());
        assert!(MziGeometry::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, Diffraction::Bragg).is_err());
    }

    proptest! {
        #[test]
        fn structural_identities(
            t in 0.05f64..3.0, t0 in -2.0f64..2.0, z0 in -5.0f64..5.0, wp in -5.0f64..5.0,
            w in 0.01f64..20.0, phi in 0.0f64..std::f64::consts::TAU, eg in -1e-3f64..1e-3, ee in -1e-3f64..1e-3,
        ) {
            let (g, sp, dil, _) = scenario(Diffraction::SinglePhoton);
            let hk = PhysicalConstants::CODATA_2018.hbar * g.k;
            let g = MziGeometry { t_half: t, t0, z0, p0: wp * hk, ..g };
            let sp = sp.with_couplings(eg, ee).unwrap();
            let dil = DilatonParams::new(w, phi, dil.rho_0, dil.eps_s, dil.phi_s).unwrap();
            let pert = perturbation_parameters(&sp, &dil, BracePolicy::Dropped);
            let b = phase_breakdown(&g, &sp, &dil, &pert).unwrap();
            prop_assert_eq!(b.get(PhaseLabel::phi(3)), b.get(PhaseLabel::phi(11)));
            prop_assert_eq!(b.get(PhaseLabel::phi(5)), b.get(PhaseLabel::phi(13)));
            prop_assert_eq!(b.get(PhaseLabel::phi(6)), b.get(PhaseLabel::phi(14)));
            let tau1 = crate::timescales::timescale(crate::TimescaleKind::Tau1, t0, t, w, dil.phi_rho, 0.0).unwrap();
            if tau1.abs() > 1e-12 {
                let ratio = b.get(PhaseLabel::M) / tau1;
                let expect = -transition_modulation_amplitude(&sp, dil.rho_0);
                prop_assert!((ratio - expect).abs() <= 1e-12 * expect.abs().max(1e-300));
            }
        }

        #[test]
        fn linear_in_coupling_prefactor(scale in -10.0f64..10.0, l in 0u8..15) {
            let label = PhaseLabel::new(l).unwrap();
            let (g, sp, dil, pert) = scenario(Diffraction::SinglePhoton);
            let base = phase_contribution(label, &g, &sp, &dil, &pert).unwrap();
            let scaled_pert = PerturbationParameters {
                mu_bar_amp: scale * pert.mu_bar_amp,
                delta_mu_amp: scale * pert.delta_mu_amp,
                gamma_bar_ep: scale * pert.gamma_bar_ep,
                delta_gamma_ep: scale * pert.delta_gamma_ep,
                gamma_dm_amp: scale * pert.gamma_dm_amp,
                ..pert
            };
            // φ₃ and φ₁₁ scale with Δμ₀, every other label with the couplings
            let sp2 = if matches!(l, 3 | 11) {
                sp.with_mass_defect(scale * sp.mass_defect()).unwrap()
            } else {
                sp.with_couplings(scale * sp.eps_g(), scale * sp.eps_e()).unwrap()
            };
            let v = phase_contribution(label, &g, &sp2, &dil, &scaled_pert).unwrap();
            prop_assert!((v - scale * base).abs() <= 1e-13 * base.abs().max(1e-300) * scale.abs().max(1.0));
        }
    }
}
