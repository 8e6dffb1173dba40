//! Dark-matter (dilaton) induced phases and signal amplitudes for Mach-Zehnder
//! atom interferometers and gradiometers.
//!
//! The crate covers single-photon (clock) and Raman transitions, which change
//! the internal state at every pulse, and Bragg diffraction, which preserves
//! it. Every closed form has an independent numerical counterpart:
//!
//! - [`timescales`]: oscillatory time-scale integrals in closed form, with a
//!   panel Gauss-Legendre oracle.
//! - [`phases`]: the catalog of phase contributions `phi_m`, `phi_1` ... `phi_14`.
//! - [`oracle`]: brute-force integration of the perturbation potentials along
//!   the classical arm trajectories.
//! - [`signal`]: gradiometer differential phases, dilaton-phase averages and
//!   the analytic correlation catalog.
//! - [`scan`]: one- and two-axis parameter grids.
//! - [`verify`]: seeded random cross-checks of the catalogs against the oracles.
//!
//! All quantities are strict SI internally; [`units`] holds the conversions
//! used at the input boundary.

pub mod error;
pub mod model;
pub mod oracle;
pub mod phases;
pub mod quadrature;
pub mod scan;
pub mod signal;
pub mod timescales;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    compton_modulation_amplitude, dilaton_amplitude, dilaton_field, perturbation_parameters,
    transition_modulation_amplitude, AtomSpecies, BracePolicy, DilatonParams, PerturbationParameters,
    PhysicalConstants, SpeciesPreset,
};

pub use oracle::{classical_trajectories, oracle_label, oracle_phase, ArmSegment, ArmTrajectory, PerturbationTerm};
pub use phases::{
    phase_breakdown, phase_contribution, standard_phase, Couplings, Diffraction, MziGeometry, PhaseBreakdown,
    PhaseLabel,
};
pub use scan::{run_scan, run_scan_with, ParamPath, ScanAxis, ScanPoint, Spacing};
pub use signal::{
    correlation_analytic, coupling_ratio_map, differential_phase, regime_amplitude, signal_amplitude_analytic,
    signal_amplitude_numeric, signal_amplitude_numeric_with, AverageGrid, GradiometerConfig, PairKey, PhiSMode, Regime,
    SignalBreakdown, SignalMethod,
};
pub use timescales::{timescale, timescale_quadrature, TimescaleKind};
