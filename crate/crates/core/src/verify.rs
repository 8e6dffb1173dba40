//! Seeded random cross-checks: catalog phases against the trajectory oracle and
//! closed-form correlations against the numeric dilaton-phase average.
//!
//! Scenarios are drawn sequentially from one seeded stream and evaluated in
//! parallel; results are gathered in trial order so reports do not depend on
//! the number of worker threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    perturbation_parameters, AtomSpecies, BracePolicy, DilatonParams, PerturbationParameters, PhysicalConstants,
    SpeciesPreset,
};
use crate::oracle::oracle_labels_with;
use crate::phases::{phase_breakdown, Diffraction, MziGeometry, PhaseLabel};
use crate::quadrature::PanelQuadrature;
use crate::signal::{
    catalog_pairs, rel_diff, signal_amplitude_analytic, signal_amplitude_numeric, GradiometerConfig, PairKey, PhiSMode,
};

/// One gradiometer configuration with its physics inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub grad: GradiometerConfig,
    pub species: AtomSpecies,
    pub dilaton: DilatonParams,
    pub pert: PerturbationParameters,
}

/// Ranges of the random scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioRanges {
    pub max_coupling: f64,
    pub max_delta_mu0: f64,
    /// Bounds of ω_ρT, sampled log-uniformly.
    pub omega_t: (f64, f64),
    /// Bounds of ω_ρτ_L, sampled log-uniformly. Differential phases lose
    /// about ω_ρt₀/(ω_ρτ_L)² of their relative precision, which sets the floor.
    pub omega_tau_l: (f64, f64),
}

impl Default for ScenarioRanges {
    fn default() -> Self {
        Self { max_coupling: 1e-3, max_delta_mu0: 1e-10, omega_t: (0.01, 100.0), omega_tau_l: (0.03, 3.0) }
    }
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Draws one scenario. Trial parity picks state-changing or Bragg diffraction.
pub fn random_scenario<R: Rng>(rng: &mut R, diffraction: Diffraction, ranges: &ScenarioRanges) -> Result<Scenario> {
    let consts = PhysicalConstants::CODATA_2018;
    let preset = SpeciesPreset::ALL[rng.gen_range(0..SpeciesPreset::ALL.len())];
    let mass = preset.mass();
    let delta_mu0 = rng.gen_range(0.01..=1.0) * ranges.max_delta_mu0;
    let c = ranges.max_coupling;
    let species = AtomSpecies::with_mean_and_differential(
        consts,
        mass,
        delta_mu0 * mass,
        rng.gen_range(-c..=c),
        rng.gen_range(-c..=c),
    )?;
    let k = preset.default_wavevector();
    let hk = consts.hbar * k;
    let t_half = rng.gen_range(0.1..=3.0);
    let omega = log_uniform(rng, ranges.omega_t) / t_half;
    let geom = MziGeometry::new(
        k,
        t_half,
        rng.gen_range(0.0..=10.0),
        rng.gen_range(-10.0..=10.0),
        rng.gen_range(-5.0..=5.0) * hk,
        rng.gen_range(1.0..=10.0),
        diffraction,
    )?;
    let tau_l = log_uniform(rng, ranges.omega_tau_l) / omega;
    let grad = GradiometerConfig::new(geom, tau_l * consts.c, rng.gen_range(-5.0..=5.0) * hk)?;
    let dilaton = DilatonParams::new(
        omega,
        rng.gen_range(0.0..std::f64::consts::TAU),
        log_uniform(rng, (1e-14, 1e-8)),
        rng.gen_range(-c..=c),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )?;
    let pert = perturbation_parameters(&species, &dilaton, BracePolicy::Dropped);
    Ok(Scenario { grad, species, dilaton, pert })
}

/// Diffraction used for trial `n`.
pub fn trial_diffraction(n: usize) -> Diffraction {
    if n.is_multiple_of(2) {
        Diffraction::SinglePhoton
    } else {
        Diffraction::Bragg
    }
}

/// Scenarios for `trials` trials from `seed`.
pub fn scenarios(trials: usize, seed: u64, ranges: &ScenarioRanges) -> Result<Vec<Scenario>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|n| random_scenario(&mut rng, trial_diffraction(n), ranges)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative catalog-vs-oracle tolerance.
    pub oracle_rel: f64,
    /// Absolute catalog-vs-oracle tolerance that applies when the catalog
    /// value is below `oracle_small`.
    pub oracle_abs: f64,
    pub oracle_small: f64,
    /// Relative analytic-vs-numeric tolerance for correlations.
    pub catalog_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { oracle_rel: 1e-6, oracle_abs: 1e-18, oracle_small: 1e-12, catalog_rel: 1e-9 }
    }
}

/// Worst residual seen for one check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Worst {
    /// Relative residual.
    pub residual: f64,
    pub trial: usize,
    pub expected: f64,
    pub actual: f64,
    pub passed: bool,
}

impl Worst {
    fn merge(&mut self, other: Worst) {
        let worse = (!other.passed && self.passed) || (other.passed == self.passed && other.residual > self.residual);
        if worse {
            *self = other;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Catalog vs oracle, per diffraction and label.
    pub labels: BTreeMap<(&'static str, PhaseLabel), Worst>,
    /// Analytic vs numeric, per pair.
    pub pairs: BTreeMap<PairKey, Worst>,
    /// Trials that could not be evaluated.
    pub errors: Vec<(usize, Error)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.labels.values().all(|w| w.passed) && self.pairs.values().all(|w| w.passed)
    }

    pub fn non_converged(&self) -> bool {
        self.errors.iter().any(|(_, e)| matches!(e, Error::NonConvergence { .. }))
    }

    /// Fixed-width text table.
    pub fn render(&self) -> String {
        let mut s = format!(
            "verify: {} trials, seed {}, tolerances oracle {:e} (abs {:e} below {:e}), catalog {:e}\n",
            self.trials,
            self.seed,
            self.tolerances.oracle_rel,
            self.tolerances.oracle_abs,
            self.tolerances.oracle_small,
            self.tolerances.catalog_rel
        );
        s.push_str("\ncatalog vs oracle\ndiffraction     label  worst_rel                trial  status\n");
        for ((d, l), w) in &self.labels {
            s.push_str(&format!(
                "{:<15} {:<6} {:<24.17e} {:<6} {}\n",
                d,
                l.to_string(),
                w.residual,
                w.trial,
                status(w.passed)
            ));
        }
        s.push_str("\nanalytic vs numeric\npair      worst_rel                trial  status\n");
        for (k, w) in &self.pairs {
            s.push_str(&format!("{:<9} {:<24.17e} {:<6} {}\n", k.to_string(), w.residual, w.trial, status(w.passed)));
        }
        for (n, e) in &self.errors {
            s.push_str(&format!("trial {n}: {e}\n"));
        }
        s.push_str(if self.passed() { "\nresult: PASS\n" } else { "\nresult: FAIL\n" });
        s
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

struct TrialResult {
    labels: Vec<((&'static str, PhaseLabel), Worst)>,
    pairs: Vec<(PairKey, Worst)>,
}

fn oracle_check(n: usize, cat: f64, ora: f64, tol: &Tolerances) -> Worst {
    let err = (cat - ora).abs();
    let passed = err <= tol.oracle_rel * cat.abs() || (cat.abs() < tol.oracle_small && err <= tol.oracle_abs);
    Worst { residual: rel_diff(cat, ora), trial: n, expected: cat, actual: ora, passed }
}

fn evaluate(n: usize, sc: &Scenario, tol: &Tolerances, engine: &PanelQuadrature) -> Result<TrialResult> {
    let d = sc.grad.geom.diffraction.name();
    let mut labels = Vec::with_capacity(2 * PhaseLabel::COUNT);
    for geom in [sc.grad.geom, sc.grad.upper(&sc.species)] {
        let cat = phase_breakdown(&geom, &sc.species, &sc.dilaton, &sc.pert)?;
        let ora = oracle_labels_with(engine, &geom, &sc.species, &sc.dilaton, &sc.pert)?;
        for l in PhaseLabel::ALL {
            labels.push(((d, l), oracle_check(n, cat.get(l), ora[l.index()], tol)));
        }
    }
    let analytic = signal_amplitude_analytic(&sc.grad, &sc.species, &sc.dilaton, &sc.pert)?;
    let numeric = signal_amplitude_numeric(&sc.grad, &sc.species, &sc.dilaton, &sc.pert, PhiSMode::Coherent)?;
    let pairs = catalog_pairs()
        .into_iter()
        .map(|k| {
            let (a, v) = (analytic.get(k), numeric.get(k));
            let r = rel_diff(a, v);
            (k, Worst { residual: r, trial: n, expected: a, actual: v, passed: r <= tol.catalog_rel })
        })
        .collect();
    Ok(TrialResult { labels, pairs })
}

/// Runs both gates over `trials` seeded scenarios.
pub fn run_verification(trials: usize, seed: u64, tol: Tolerances, ranges: &ScenarioRanges) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let list = scenarios(trials, seed, ranges)?;
    Ok(verify_scenarios(&list, seed, tol))
}

/// Runs both gates over given scenarios.
pub fn verify_scenarios(list: &[Scenario], seed: u64, tol: Tolerances) -> VerifyReport {
    let engine = PanelQuadrature::shared();
    let results: Vec<Result<TrialResult>> =
        list.par_iter().enumerate().map(|(n, sc)| evaluate(n, sc, &tol, engine)).collect();
    let mut report = VerifyReport {
        trials: list.len(),
        seed,
        tolerances: tol,
        labels: BTreeMap::new(),
        pairs: BTreeMap::new(),
        errors: Vec::new(),
    };
    for (n, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => {
                for (k, w) in t.labels {
                    report.labels.entry(k).and_modify(|x| x.merge(w)).or_insert(w);
                }
                for (k, w) in t.pairs {
                    report.pairs.entry(k).and_modify(|x| x.merge(w)).or_insert(w);
                }
            }
            Err(e) => report.errors.push((n, e)),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_scenarios_repeat() {
        let r = ScenarioRanges::default();
        assert_eq!(scenarios(5, 7, &r).unwrap(), scenarios(5, 7, &r).unwrap());
        assert_ne!(scenarios(5, 7, &r).unwrap(), scenarios(5, 8, &r).unwrap());
    }

    #[test]
    fn scenarios_respect_ranges() {
        let r = ScenarioRanges::default();
        for (n, s) in scenarios(40, 1, &r).unwrap().iter().enumerate() {
            let x = s.dilaton.omega_rho * s.grad.geom.t_half;
            assert!((0.01 * (1.0 - 1e-12)..=100.0 * (1.0 + 1e-12)).contains(&x));
            assert!(s.species.eps_bar().abs() <= 1e-3 && s.species.delta_eps().abs() <= 2e-3);
            assert!(s.species.delta_mu0() <= 1e-10 * (1.0 + 1e-12));
            assert_eq!(s.grad.geom.diffraction, trial_diffraction(n));
        }
    }

    #[test]
    fn zero_couplings_give_zero_residuals() {
        let r = ScenarioRanges { max_coupling: 0.0, ..Default::default() };
        let report = run_verification(1, 3, Tolerances::default(), &r).unwrap();
        assert!(report.passed(), "{}", report.render());
        assert!(report.pairs.values().all(|w| w.residual == 0.0));
    }

    #[test]
    fn small_run_passes_and_a_tight_tolerance_fails() {
        let r = ScenarioRanges::default();
        let report = run_verification(6, 11, Tolerances::default(), &r).unwrap();
        assert!(report.passed(), "{}", report.render());
        let tight = Tolerances { catalog_rel: 0.0, oracle_rel: 0.0, oracle_abs: 0.0, ..Default::default() };
        assert!(!run_verification(6, 11, tight, &r).unwrap().passed());
    }

    #[test]
    fn no_trials_is_an_error() {
        assert!(run_verification(0, 1, Tolerances::default(), &ScenarioRanges::default()).is_err());
    }
}
