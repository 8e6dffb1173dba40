//! Fixed scenarios shared by the kernel benchmarks.

use mzi_dm::verify::Scenario;
use mzi_dm::{
    perturbation_parameters, AtomSpecies, BracePolicy, Diffraction, DilatonParams, GradiometerConfig, MziGeometry,
    PhysicalConstants, SpeciesPreset,
};

/// Strontium gradiometer with a 1 km baseline and all couplings switched on.
pub fn strontium(diffraction: Diffraction) -> Scenario {
    let c = PhysicalConstants::CODATA_2018;
    let p = SpeciesPreset::Strontium88;
    let base = p.species(c, 0.0, 0.0).expect("preset species");
    let species = AtomSpecies::with_mean_and_differential(c, base.mean_mass(), base.mass_defect(), 1e-4, 3e-6)
        .expect("valid couplings");
    let species = if diffraction == Diffraction::Bragg { species.bragg_effective() } else { species };
    let k = p.default_wavevector();
    let hk = c.hbar * k;
    let geom = MziGeometry::new(k, 1.0, 0.3, 1.0, 2.0 * hk, 9.81, diffraction).expect("valid geometry");
    let grad = GradiometerConfig::new(geom, 1e3, 3.0 * hk).expect("valid gradiometer");
    let dilaton = DilatonParams::new(2.0, 0.4, 1e-10, 2e-4, 0.7).expect("valid dilaton");
    let pert = perturbation_parameters(&species, &dilaton, BracePolicy::Dropped);
    Scenario { grad, species, dilaton, pert }
}
