//! Parameter scans over one or two axes.
//!
//! Grid points are evaluated in parallel and returned in grid order (first
//! axis slowest), so output does not depend on the worker count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{perturbation_parameters, BracePolicy};
use crate::signal::{
    coupling_ratio, regime_amplitude, signal_amplitude_analytic, signal_amplitude_numeric_with, AverageGrid, PairKey,
    PhiSMode, Regime,
};
use crate::verify::Scenario;

/// Scannable parameters. Ratio axes are applied after all others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamPath {
    EpsBar,
    DeltaEps,
    EpsG,
    EpsE,
    MassDefect,
    OmegaRho,
    Rho0,
    EpsS,
    PhiS,
    K,
    THalf,
    T0,
    Z0,
    P0,
    G0,
    Baseline,
    P1,
    /// Ω/ω_c = Δm₀/m̄₀, set through the mass defect.
    OmegaOverOmegaC,
    /// Δε/ε̄, set through Δε at fixed ε̄.
    DeltaEpsOverEpsBar,
}

impl ParamPath {
    pub const ALL: [Self; 19] = [
        Self::EpsBar,
        Self::DeltaEps,
        Self::EpsG,
        Self::EpsE,
        Self::MassDefect,
        Self::OmegaRho,
        Self::Rho0,
        Self::EpsS,
        Self::PhiS,
        Self::K,
        Self::THalf,
        Self::T0,
        Self::Z0,
        Self::P0,
        Self::G0,
        Self::Baseline,
        Self::P1,
        Self::OmegaOverOmegaC,
        Self::DeltaEpsOverEpsBar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::EpsBar => "species.eps_bar",
            Self::DeltaEps => "species.delta_eps",
            Self::EpsG => "species.eps_g",
            Self::EpsE => "species.eps_e",
            Self::MassDefect => "species.mass_defect",
            Self::OmegaRho => "dilaton.omega_rho",
            Self::Rho0 => "dilaton.rho_0",
            Self::EpsS => "dilaton.eps_s",
            Self::PhiS => "dilaton.phi_s",
            Self::K => "geometry.k",
            Self::THalf => "geometry.T",
            Self::T0 => "geometry.t0",
            Self::Z0 => "geometry.z0",
            Self::P0 => "geometry.p0",
            Self::G0 => "geometry.g0",
            Self::Baseline => "gradiometer.L",
            Self::P1 => "gradiometer.p1",
            Self::OmegaOverOmegaC => "ratio.omega_over_omegac",
            Self::DeltaEpsOverEpsBar => "ratio.deltaeps_over_bareps",
        }
    }

    /// SI unit of the axis values.
    pub fn unit(self) -> &'static str {
        match self {
            Self::MassDefect => "kg",
            Self::OmegaRho => "rad/s",
            Self::PhiS => "rad",
            Self::K => "rad/m",
            Self::THalf | Self::T0 => "s",
            Self::Z0 | Self::Baseline => "m",
            Self::P0 | Self::P1 => "kg m/s",
            Self::G0 => "m/s^2",
            _ => "1",
        }
    }

    /// Sets the parameter on `sc`. The dilaton amplitude follows a frequency
    /// change when it was derived from a density.
    pub fn apply(self, sc: &mut Scenario, v: f64) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::domain(format!("{} must be finite", self.name())));
        }
        let sp = sc.species;
        let c = *sp.constants();
        let with_mean = |eps_bar: f64, delta_eps: f64| sp.with_mean_couplings(eps_bar, delta_eps);
        let geom = &mut sc.grad.geom;
        match self {
            Self::EpsBar => sc.species = with_mean(v, sp.delta_eps())?,
            Self::DeltaEps => sc.species = with_mean(sp.eps_bar(), v)?,
            Self::EpsG => sc.species = sp.with_couplings(v, sp.eps_e())?,
            Self::EpsE => sc.species = sp.with_couplings(sp.eps_g(), v)?,
            Self::MassDefect => sc.species = sp.with_mass_defect(v)?,
            Self::OmegaRho => sc.dilaton = sc.dilaton.with_omega(&c, v)?,
            Self::Rho0 => {
                sc.dilaton.rho_0 = v;
                sc.dilaton.rho_dm = None;
            }
            Self::EpsS => sc.dilaton.eps_s = v,
            Self::PhiS => sc.dilaton.phi_s = v,
            Self::K => geom.k = v,
            Self::THalf => geom.t_half = v,
            Self::T0 => geom.t0 = v,
            Self::Z0 => geom.z0 = v,
            Self::P0 => geom.p0 = v,
            Self::G0 => geom.g0 = v,
            Self::Baseline => sc.grad.baseline = v,
            Self::P1 => sc.grad.p1 = v,
            Self::OmegaOverOmegaC => sc.species = sp.with_mass_defect(v * sp.mean_mass())?,
            Self::DeltaEpsOverEpsBar => sc.species = with_mean(sp.eps_bar(), v * sp.eps_bar())?,
        }
        sc.grad.validate()
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s.trim()).ok_or_else(|| {
            let valid: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
            Error::domain(format!("unknown parameter path '{s}', valid paths: {}", valid.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" | "lin" => Ok(Self::Linear),
            "log" => Ok(Self::Log),
            other => Err(Error::domain(format!("unknown spacing '{other}', expected linear or log"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanAxis {
    pub path: ParamPath,
    pub start: f64,
    pub end: f64,
    pub spacing: Spacing,
    pub points: usize,
}

impl ScanAxis {
    pub fn new(path: ParamPath, start: f64, end: f64, spacing: Spacing, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::domain(format!("{path}: at least one point is required")));
        }
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::domain(format!("{path}: range must be finite")));
        }
        if spacing == Spacing::Log && !(start > 0.0 && end > 0.0) {
            return Err(Error::domain(format!("{path}: log spacing needs a positive range")));
        }
        Ok(Self { path, start, end, spacing, points })
    }

    /// Grid values; both endpoints are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == n - 1 {
                    return self.end;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + (self.end - self.start) * f,
                    Spacing::Log => (self.start.ln() + (self.end / self.start).ln() * f).exp(),
                }
            })
            .collect()
    }
}

/// Results at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    /// Axis values in axis order.
    pub values: Vec<f64>,
    /// Φ_S² from the numeric dilaton-phase average, rad².
    pub numeric: f64,
    /// Φ_S² restricted to the cataloged pairs, rad².
    pub catalog: f64,
    /// Regime closed forms in [`Regime::ALL`] order, where they apply.
    pub regimes: [Option<f64>; 3],
    /// Largest contributions of the numeric breakdown.
    pub dominance: Vec<(PairKey, f64)>,
    /// Ratio of the Δε = 0 clock term to the full one, where ε̄ ≠ 0.
    pub coupling_ratio: Option<f64>,
}

/// Number of dominance entries kept per point.
pub const DOMINANCE_DEPTH: usize = 3;

pub const MAX_AXES: usize = 2;

/// Evaluates the scan grid around `base` with the default averaging grid.
pub fn run_scan(base: &Scenario, braces: BracePolicy, mode: PhiSMode, axes: &[ScanAxis]) -> Result<Vec<ScanPoint>> {
    run_scan_with(base, braces, mode, &AverageGrid::for_mode(mode), axes)
}

pub fn run_scan_with(
    base: &Scenario,
    braces: BracePolicy,
    mode: PhiSMode,
    grid: &AverageGrid,
    axes: &[ScanAxis],
) -> Result<Vec<ScanPoint>> {
    if axes.is_empty() || axes.len() > MAX_AXES {
        return Err(Error::domain(format!("a scan takes 1 or {MAX_AXES} axes, got {}", axes.len())));
    }
    if axes.len() == 2 && axes[0].path == axes[1].path {
        return Err(Error::domain(format!("axis {} given twice", axes[0].path)));
    }
    let grids: Vec<Vec<f64>> = axes.iter().map(ScanAxis::values).collect();
    let mut points: Vec<Vec<f64>> = grids[0].iter().map(|&v| vec![v]).collect();
    if let Some(second) = grids.get(1) {
        points = points.into_iter().flat_map(|p| second.iter().map(move |&v| vec![p[0], v])).collect();
    }
    points.into_par_iter().map(|vals| evaluate_point(base, braces, mode, grid, axes, vals)).collect()
}

fn evaluate_point(
    base: &Scenario,
    braces: BracePolicy,
    mode: PhiSMode,
    grid: &AverageGrid,
    axes: &[ScanAxis],
    values: Vec<f64>,
) -> Result<ScanPoint> {
    let mut sc = *base;
    let mut order: Vec<usize> = (0..axes.len()).collect();
    order.sort_by_key(|&i| axes[i].path);
    for i in order {
        axes[i].path.apply(&mut sc, values[i])?;
    }
    sc.pert = perturbation_parameters(&sc.species, &sc.dilaton, braces);
    let numeric = signal_amplitude_numeric_with(&sc.grad, &sc.species, &sc.dilaton, &sc.pert, mode, grid)?;
    let catalog = signal_amplitude_analytic(&sc.grad, &sc.species, &sc.dilaton, &sc.pert)?;
    let mut regimes = [None; 3];
    for (slot, r) in regimes.iter_mut().zip(Regime::ALL) {
        *slot = regime_amplitude(r, &sc.grad, &sc.species, &sc.dilaton, &sc.pert).ok();
    }
    let mut dominance = numeric.dominance();
    dominance.truncate(DOMINANCE_DEPTH);
    let sp = &sc.species;
    let ratio = (sp.eps_bar() != 0.0).then(|| coupling_ratio(sp.delta_mu0(), sp.delta_eps() / sp.eps_bar()));
    Ok(ScanPoint { values, numeric: numeric.total, catalog: catalog.total, regimes, dominance, coupling_ratio: ratio })
}
