//! Brute-force phases from the perturbation potentials integrated along the
//! unperturbed classical arms.
//!
//! Each arm consists of two free-fall segments separated by the mirror pulse.
//! The phase of a potential V is −(1/ħ)∫(V_upper − V_lower)dt over the whole
//! sequence, where the upper arm is the one kicked by the first pulse. Both
//! windows are integrated together in local time s = t − t₀ − jT, so arm
//! differences are formed pointwise before any quadrature error enters.
//! Positions are carried relative to z₀ for the same reason.

use crate::error::Result;
use crate::model::{AtomSpecies, DilatonParams, PerturbationParameters};
use crate::phases::{Couplings, MziGeometry, PhaseLabel};
use crate::quadrature::PanelQuadrature;

/// Free flight between two pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub z_start: f64,
    pub p_start: f64,
    /// +1 in the excited state, −1 in the ground state.
    pub lambda: f64,
}

impl ArmSegment {
    /// Position and momentum a time `s` after the segment start.
    pub fn state_at(&self, s: f64, mass: f64, g0: f64) -> (f64, f64) {
        let z = self.z_start + self.p_start * s / mass - 0.5 * g0 * s * s;
        let p = self.p_start - mass * g0 * s;
        (z, p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmTrajectory {
    pub segments: Vec<ArmSegment>,
    mass: f64,
    g0: f64,
}

impl ArmTrajectory {
    fn segment_at(&self, t: f64) -> Option<&ArmSegment> {
        self.segments.iter().find(|s| t >= s.t_start && t <= s.t_end)
    }

    pub fn position(&self, t: f64) -> Option<f64> {
        self.segment_at(t).map(|s| s.state_at(t - s.t_start, self.mass, self.g0).0)
    }

    pub fn momentum(&self, t: f64) -> Option<f64> {
        self.segment_at(t).map(|s| s.state_at(t - s.t_start, self.mass, self.g0).1)
    }

    /// Position and momentum at the end of the last segment.
    pub fn final_state(&self) -> (f64, f64) {
        let last = self.segments.last().expect("trajectory has segments");
        last.state_at(last.t_end - last.t_start, self.mass, self.g0)
    }
}

/// Upper (kicked at t₀) and lower arm of the unperturbed interferometer.
pub fn classical_trajectories(geom: &MziGeometry, species: &AtomSpecies) -> Result<(ArmTrajectory, ArmTrajectory)> {
    geom.validate()?;
    let m = species.mean_mass();
    let hk = geom.photon_momentum(species);
    let (t0, t, g) = (geom.t0, geom.t_half, geom.g0);
    let (first, second) = if geom.diffraction.preserves_state() { (-1.0, -1.0) } else { (1.0, -1.0) };

    let build = |p_first: f64, kick_mirror: f64, lambdas: (f64, f64)| {
        let s1 = ArmSegment { t_start: t0, t_end: t0 + t, z_start: geom.z0, p_start: p_first, lambda: lambdas.0 };
        let (z_mid, p_mid) = s1.state_at(t, m, g);
        let s2 = ArmSegment {
            t_start: t0 + t,
            t_end: t0 + 2.0 * t,
            z_start: z_mid,
            p_start: p_mid + kick_mirror,
            lambda: lambdas.1,
        };
        ArmTrajectory { segments: vec![s1, s2], mass: m, g0: g }
    };
    let upper = build(geom.p0 + hk, -hk, (first, second));
    let lower = build(geom.p0, hk, (second, first));
    Ok((upper, lower))
}

/// One additive term of the rest-mass, kinetic and potential perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbationTerm {
    /// μ̄_DM m̄₀c²
    RestMeanMass,
    /// Δμ₀ m̄₀c² λ/2
    RestMassDefect,
    /// Δμ_DM m̄₀c² λ/2
    RestTransition,
    /// −μ̄_DM p²/2m̄₀
    KinMeanMass,
    /// −Δμ₀ (p²/2m̄₀) λ/2
    KinMassDefect,
    /// −Δμ_DM (p²/2m̄₀) λ/2
    KinTransition,
    /// γ̄_EP m̄₀g₀z
    PotEp,
    /// Δγ_EP m̄₀g₀z λ/2
    PotStateEp,
    /// γ̄_DM m̄₀g₀z
    PotGravityOsc,
    /// μ̄_DM m̄₀g₀z
    PotMeanMass,
    /// Δμ₀ m̄₀g₀z λ/2
    PotMassDefect,
    /// Δμ_DM m̄₀g₀z λ/2
    PotTransition,
}

impl PerturbationTerm {
    pub const ALL: [Self; 12] = [
        Self::RestMeanMass,
        Self::RestMassDefect,
        Self::RestTransition,
        Self::KinMeanMass,
        Self::KinMassDefect,
        Self::KinTransition,
        Self::PotEp,
        Self::PotStateEp,
        Self::PotGravityOsc,
        Self::PotMeanMass,
        Self::PotMassDefect,
        Self::PotTransition,
    ];

    /// Catalog labels whose sum the term produces; empty for terms with no phase.
    pub fn labels(self) -> Vec<PhaseLabel> {
        let range = match self {
            Self::RestMeanMass | Self::RestMassDefect => 0..0,
            Self::RestTransition => 0..1,
            Self::KinMeanMass => 1..3,
            Self::KinMassDefect => 3..4,
            Self::KinTransition => 4..7,
            Self::PotEp => 7..8,
            Self::PotStateEp => 8..9,
            Self::PotGravityOsc => 9..10,
            Self::PotMeanMass => 10..11,
            Self::PotMassDefect => 11..12,
            Self::PotTransition => 12..15,
        };
        PhaseLabel::ALL[range].to_vec()
    }
}

/// Phase of one perturbation term, rad.
pub fn oracle_phase(
    term: PerturbationTerm,
    geom: &MziGeometry,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<f64> {
    oracle_phase_with(PanelQuadrature::shared(), term, geom, species, dilaton, pert)
}

pub fn oracle_phase_with(
    engine: &PanelQuadrature,
    term: PerturbationTerm,
    geom: &MziGeometry,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<f64> {
    // positions relative to z₀; the z₀ parts of the arm differences are added exactly
    let z0 = geom.z0;
    let (upper, lower) = classical_trajectories(&geom.with_start(0.0, geom.p0, geom.t0), species)?;
    let cp = Couplings::resolve(geom.diffraction, species, dilaton, pert);
    let hbar = species.constants().hbar;
    let c = species.constants().c;
    let m = species.mean_mass();
    let g = geom.g0;
    let (t0, t) = (geom.t0, geom.t_half);
    let (w, phi, phi_s) = (dilaton.omega_rho, dilaton.phi_rho, dilaton.phi_s);

    // each window returns (a, b) with integrand a + z₀·b; the b parts of both
    // windows are combined before scaling by z₀
    let window = |j: usize, s: f64| -> (f64, f64) {
        let (u, l) = (&upper.segments[j], &lower.segments[j]);
        let (zu, pu) = u.state_at(s, m, g);
        let (zl, pl) = l.state_at(s, m, g);
        let (lu, ll) = (u.lambda, l.lambda);
        let (wz, wl) = (lu * zu - ll * zl, lu - ll);
        let cos_t = (w * (t0 + j as f64 * t + s) + phi).cos();
        match term {
            PerturbationTerm::RestMeanMass => {
                let v = |_: f64| cp.mu_bar * cos_t * m * c * c;
                (v(lu) - v(ll), 0.0)
            }
            PerturbationTerm::RestMassDefect => (cp.delta_mu0 * m * c * c * wl / 2.0, 0.0),
            // m̄₀c² Δμ_DM = ħ δΩ cos ϑ
            PerturbationTerm::RestTransition => (hbar * cp.delta_omega * cos_t * wl / 2.0, 0.0),
            PerturbationTerm::KinMeanMass => (-cp.mu_bar * cos_t * (pu - pl) * (pu + pl) / (2.0 * m), 0.0),
            PerturbationTerm::KinMassDefect => (-cp.delta_mu0 * (lu * pu * pu - ll * pl * pl) / (4.0 * m), 0.0),
            PerturbationTerm::KinTransition => (-cp.delta_mu * cos_t * (lu * pu * pu - ll * pl * pl) / (4.0 * m), 0.0),
            PerturbationTerm::PotEp => (cp.gamma_bar_ep * m * g * (zu - zl), 0.0),
            PerturbationTerm::PotStateEp => {
                let f = cp.delta_gamma_ep * m * g / 2.0;
                (f * wz, f * wl)
            }
            PerturbationTerm::PotGravityOsc => {
                let cos_s = (w * (t0 + j as f64 * t + s) + phi + phi_s).cos();
                (cp.gamma_dm * cos_s * m * g * (zu - zl), 0.0)
            }
            PerturbationTerm::PotMeanMass => (cp.mu_bar * cos_t * m * g * (zu - zl), 0.0),
            PerturbationTerm::PotMassDefect => {
                let f = cp.delta_mu0 * m * g / 2.0;
                (f * wz, f * wl)
            }
            PerturbationTerm::PotTransition => {
                let f = cp.delta_mu * cos_t * m * g / 2.0;
                (f * wz, f * wl)
            }
        }
    };
    let integral = engine.integrate(0.0, t, w, |s| {
        let (a0, b0) = window(0, s);
        let (a1, b1) = window(1, s);
        (a0 + a1) + z0 * (b0 + b1)
    })?;
    Ok(-integral / hbar)
}

/// Oracle value of a single catalog label.
///
/// Terms that produce several labels are split by their polynomial dependence
/// on g₀ (constant, odd and even parts) and, for the transition potential, on z₀.
pub fn oracle_label(
    label: PhaseLabel,
    geom: &MziGeometry,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<f64> {
    oracle_label_with(PanelQuadrature::shared(), label, geom, species, dilaton, pert)
}

pub fn oracle_label_with(
    engine: &PanelQuadrature,
    label: PhaseLabel,
    geom: &MziGeometry,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<f64> {
    use PerturbationTerm as P;
    let row = |term, g: &MziGeometry| oracle_phase_with(engine, term, g, species, dilaton, pert);
    let free = geom.with_gravity(0.0);
    let odd = |term, g: &MziGeometry| -> Result<f64> { Ok(0.5 * (row(term, g)? - row(term, &g.with_gravity(-g.g0))?)) };
    let even =
        |term, g: &MziGeometry| -> Result<f64> { Ok(0.5 * (row(term, g)? + row(term, &g.with_gravity(-g.g0))?)) };
    match label.index() {
        0 => row(P::RestTransition, geom),
        1 => row(P::KinMeanMass, &free),
        2 => odd(P::KinMeanMass, geom),
        3 => row(P::KinMassDefect, geom),
        4 => row(P::KinTransition, &free),
        5 => odd(P::KinTransition, geom),
        6 => Ok(even(P::KinTransition, geom)? - row(P::KinTransition, &free)?),
        7 => row(P::PotEp, geom),
        8 => row(P::PotStateEp, geom),
        9 => row(P::PotGravityOsc, geom),
        10 => row(P::PotMeanMass, geom),
        11 => row(P::PotMassDefect, geom),
        12 => {
            let origin = geom.with_start(0.0, geom.p0, geom.t0);
            Ok(odd(P::PotTransition, geom)? - odd(P::PotTransition, &origin)?)
        }
        13 => odd(P::PotTransition, &geom.with_start(0.0, geom.p0, geom.t0)),
        14 => even(P::PotTransition, geom),
        _ => unreachable!("label index is below 15"),
    }
}

/// Oracle values of all labels, indexed by [`PhaseLabel::index`].
pub fn oracle_labels_with(
    engine: &PanelQuadrature,
    geom: &MziGeometry,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<[f64; PhaseLabel::COUNT]> {
    let mut out = [0.0; PhaseLabel::COUNT];
    for label in PhaseLabel::ALL {
        out[label.index()] = oracle_label_with(engine, label, geom, species, dilaton, pert)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{perturbation_parameters, BracePolicy, PhysicalConstants, SpeciesPreset};
    use crate::phases::{phase_breakdown, phase_contribution, Diffraction};
    use approx::assert_relative_eq;

    fn reference(d: Diffraction) -> (MziGeometry, AtomSpecies, DilatonParams, PerturbationParameters) {
        let consts = PhysicalConstants::CODATA_2018;
        let sp = SpeciesPreset::Strontium88.species(consts, 2e-4, -5e-4).unwrap();
        let k = SpeciesPreset::Strontium88.default_wavevector();
        let hk = consts.hbar * k;
        let geom = MziGeometry::new(k, 0.9, 0.25, 2.0, 3.5 * hk, 9.81, d).unwrap();
        let dil = DilatonParams::new(1.7, 0.6, 1e-9, 3e-4, 1.1).unwrap();
        let pert = perturbation_parameters(&sp, &dil, BracePolicy::Dropped);
        (geom, sp, dil, pert)
    }

    #[test]
    fn free_flight_without_gravity() {
        let (g, sp, ..) = reference(Diffraction::SinglePhoton);
        let g = MziGeometry { g0: 0.0, p0: 0.0, ..g };
        let (u, l) = classical_trajectories(&g, &sp).unwrap();
        let hk = g.photon_momentum(&sp);
        let dz = u.position(g.t0 + g.t_half).unwrap() - g.z0;
        assert_relative_eq!(dz, hk * g.t_half / sp.mean_mass(), max_relative = 1e-12);
        assert_eq!(l.position(g.t0 + g.t_half).unwrap(), g.z0);
    }

    #[test]
    fn arms_close() {
        for d in [Diffraction::SinglePhoton, Diffraction::Bragg] {
            let (g, sp, ..) = reference(d);
            let (u, l) = classical_trajectories(&g, &sp).unwrap();
            let (zu, pu) = u.final_state();
            let (zl, pl) = l.final_state();
            let scale = zu.abs().max(g.z0.abs()).max(1.0);
            assert!((zu - zl).abs() <= 1e-12 * scale);
            let m = sp.mean_mass();
            let expect = g.z0 + (2.0 * g.p0 + g.photon_momentum(&sp)) * g.t_half / m - 2.0 * g.g0 * g.t_half * g.t_half;
            assert_relative_eq!(zu, expect, max_relative = 1e-13);
            // final momenta differ by one photon kick, which the last pulse removes
            assert_relative_eq!(pl - pu, g.photon_momentum(&sp), max_relative = 1e-9);
        }
    }

    #[test]
    fn segments_abut_and_momenta_follow_kinematics() {
        let (g, sp, ..) = reference(Diffraction::SinglePhoton);
        let (u, l) = classical_trajectories(&g, &sp).unwrap();
        let hk = g.photon_momentum(&sp);
        let m = sp.mean_mass();
        for arm in [&u, &l] {
            assert_eq!(arm.segments.len(), 2);
            assert_eq!(arm.segments[0].t_end, arm.segments[1].t_start);
            let (z_end, _) = arm.segments[0].state_at(g.t_half, m, g.g0);
            assert_eq!(z_end, arm.segments[1].z_start);
        }
        assert_eq!((u.segments[0].lambda, u.segments[1].lambda), (1.0, -1.0));
        assert_eq!((l.segments[0].lambda, l.segments[1].lambda), (-1.0, 1.0));
        let t = g.t0 + 0.3 * g.t_half;
        assert_relative_eq!(u.momentum(t).unwrap(), g.p0 + hk - m * g.g0 * (t - g.t0), max_relative = 1e-14);
        let t = g.t0 + 1.6 * g.t_half;
        assert_relative_eq!(l.momentum(t).unwrap(), g.p0 + hk - m * g.g0 * (t - g.t0), max_relative = 1e-12);
        assert_relative_eq!(u.momentum(t).unwrap(), g.p0 - m * g.g0 * (t - g.t0), max_relative = 1e-12);
        let (ub, lb) = classical_trajectories(&g.with_diffraction(Diffraction::Bragg), &sp).unwrap();
        assert!(ub.segments.iter().chain(lb.segments.iter()).all(|s| s.lambda == -1.0));
    }

    #[test]
    fn rest_mass_rows_without_catalog_phase_vanish() {
        let (g, sp, dil, pert) = reference(Diffraction::SinglePhoton);
        for term in [PerturbationTerm::RestMeanMass, PerturbationTerm::RestMassDefect] {
            assert_eq!(oracle_phase(term, &g, &sp, &dil, &pert).unwrap(), 0.0, "{term:?}");
        }
    }

    #[test]
    fn every_label_matches_catalog() {
        for d in [Diffraction::SinglePhoton, Diffraction::Raman, Diffraction::Bragg] {
            let (g, sp, dil, pert) = reference(d);
            for label in PhaseLabel::ALL {
                let cat = phase_contribution(label, &g, &sp, &dil, &pert).unwrap();
                let ora = oracle_label(label, &g, &sp, &dil, &pert).unwrap();
                let ok = (cat - ora).abs() <= 1e-6 * cat.abs() || (cat.abs() < 1e-12 && (cat - ora).abs() < 1e-18);
                assert!(ok, "{d:?} label {label}: catalog {cat:e} oracle {ora:e}");
            }
        }
    }

    #[test]
    fn rows_are_additive_in_labels() {
        let (g, sp, dil, pert) = reference(Diffraction::SinglePhoton);
        let cat = phase_breakdown(&g, &sp, &dil, &pert).unwrap();
        let mut total = 0.0;
        for term in PerturbationTerm::ALL {
            let row = oracle_phase(term, &g, &sp, &dil, &pert).unwrap();
            let from_labels: f64 = term.labels().iter().map(|l| cat.get(*l)).sum();
            assert!(
                (row - from_labels).abs() <= 1e-6 * from_labels.abs().max(1e-12),
                "{term:?}: {row:e} vs {from_labels:e}"
            );
            total += row;
        }
        assert_relative_eq!(total, cat.dilaton_total(), max_relative = 1e-6);
    }

    #[test]
    fn bragg_state_terms_are_exactly_zero() {
        let (g, sp, dil, pert) = reference(Diffraction::Bragg);
        for term in [
            PerturbationTerm::RestTransition,
            PerturbationTerm::KinMassDefect,
            PerturbationTerm::KinTransition,
            PerturbationTerm::PotStateEp,
            PerturbationTerm::PotMassDefect,
            PerturbationTerm::PotTransition,
        ] {
            assert_eq!(oracle_phase(term, &g, &sp, &dil, &pert).unwrap(), 0.0, "{term:?}");
        }
    }
}
