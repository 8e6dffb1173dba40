//! Gradiometer differential phases and the signal amplitude Φ_S².
//!
//! Φ_S² = 2 Σ_{i,j} ⟨Δφ_i Δφ_j⟩ with the average taken over a uniformly
//! distributed dilaton phase. A stored correlation for a pair i ≤ j is the
//! single-order average ⟨Δφ_i Δφ_j⟩; off-diagonal pairs therefore enter the
//! total twice.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{AtomSpecies, DilatonParams, PerturbationParameters};
use crate::phases::{phase_breakdown, phase_contribution, Couplings, MziGeometry, PhaseLabel};
use crate::quadrature::Neumaier;

/// Two interferometers separated by a vertical baseline and driven by the same
/// light; the upper one starts a light travel time later.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradiometerConfig {
    /// Lower interferometer.
    pub geom: MziGeometry,
    /// Baseline L, m.
    pub baseline: f64,
    /// Initial momentum of the upper interferometer, kg m/s.
    pub p1: f64,
}

impl GradiometerConfig {
    pub fn new(geom: MziGeometry, baseline: f64, p1: f64) -> Result<Self> {
        let g = Self { geom, baseline, p1 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.geom.validate()?;
        if !(self.baseline.is_finite() && self.baseline > 0.0) {
            return Err(Error::domain(format!("baseline must be positive, got {}", self.baseline)));
        }
        if !self.p1.is_finite() {
            return Err(Error::domain("upper momentum must be finite"));
        }
        Ok(())
    }

    /// Light travel time τ_L = L/c.
    pub fn light_delay(&self, species: &AtomSpecies) -> f64 {
        self.baseline / species.constants().c
    }

    /// Upper interferometer: (z₀ + L, p₁, t₀ + τ_L).
    pub fn upper(&self, species: &AtomSpecies) -> MziGeometry {
        self.geom.with_start(self.geom.z0 + self.baseline, self.p1, self.geom.t0 + self.light_delay(species))
    }

    /// ℘̄₀ = (p₁ + p₀)/(2ħk).
    pub fn mean_momentum_ratio(&self, species: &AtomSpecies) -> f64 {
        (self.p1 + self.geom.p0) / (2.0 * self.geom.photon_momentum(species))
    }

    /// Δ℘₀ = (p₀ − p₁)/(ħk).
    pub fn momentum_difference_ratio(&self, species: &AtomSpecies) -> f64 {
        (self.geom.p0 - self.p1) / self.geom.photon_momentum(species)
    }
}

/// Δφ_i = φ_i(upper) − φ_i(lower) at dilaton phase `phi_rho`.
pub fn differential_phase(
    label: PhaseLabel,
    grad: &GradiometerConfig,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
    phi_rho: f64,
) -> Result<f64> {
    grad.validate()?;
    let d = dilaton.with_phi_rho(phi_rho);
    let up = phase_contribution(label, &grad.upper(species), species, &d, pert)?;
    let lo = phase_contribution(label, &grad.geom, species, &d, pert)?;
    Ok(up - lo)
}

/// All differential phases at one dilaton phase, indexed by label.
pub fn differential_phases(
    grad: &GradiometerConfig,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
    phi_rho: f64,
) -> Result<[f64; PhaseLabel::COUNT]> {
    grad.validate()?;
    let d = dilaton.with_phi_rho(phi_rho);
    let up = phase_breakdown(&grad.upper(species), species, &d, pert)?;
    let lo = phase_breakdown(&grad.geom, species, &d, pert)?;
    let mut out = [0.0; PhaseLabel::COUNT];
    for (o, (u, l)) in out.iter_mut().zip(up.contributions.iter().zip(lo.contributions.iter())) {
        *o = u - l;
    }
    Ok(out)
}

/// Unordered label pair, stored with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    pub i: PhaseLabel,
    pub j: PhaseLabel,
}

impl PairKey {
    pub fn new(a: PhaseLabel, b: PhaseLabel) -> Self {
        if a <= b {
            Self { i: a, j: b }
        } else {
            Self { i: b, j: a }
        }
    }

    /// Multiplicity of the pair in the double sum over ordered pairs.
    pub fn multiplicity(self) -> f64 {
        if self.i == self.j {
            1.0
        } else {
            2.0
        }
    }

    pub fn all() -> impl Iterator<Item = Self> {
        PhaseLabel::ALL
            .into_iter()
            .flat_map(|a| PhaseLabel::ALL.into_iter().filter(move |b| *b >= a).map(move |b| Self { i: a, j: b }))
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl std::str::FromStr for PairKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = inner.split_once(',').ok_or_else(|| Error::domain(format!("pair '{s}' must look like (i,j)")))?;
        Ok(Self::new(a.parse()?, b.parse()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalMethod {
    AnalyticCatalog,
    NumericAverage,
}

impl SignalMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::AnalyticCatalog => "analytic-catalog",
            Self::NumericAverage => "numeric-average",
        }
    }
}

/// Correlations ⟨Δφ_i Δφ_j⟩ and the resulting signal amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBreakdown {
    pub correlations: BTreeMap<PairKey, f64>,
    /// Φ_S², rad².
    pub total: f64,
    pub method: SignalMethod,
}

impl SignalBreakdown {
    fn from_correlations(correlations: BTreeMap<PairKey, f64>, method: SignalMethod) -> Self {
        let total = 2.0 * correlations.iter().map(|(k, v)| k.multiplicity() * v).collect::<Neumaier>().value();
        Self { correlations, total, method }
    }

    pub fn get(&self, key: PairKey) -> f64 {
        self.correlations.get(&key).copied().unwrap_or(0.0)
    }

    /// Contribution 2·multiplicity·⟨Δφ_i Δφ_j⟩ of one pair to Φ_S².
    pub fn contribution(&self, key: PairKey) -> f64 {
        2.0 * key.multiplicity() * self.get(key)
    }

    /// Nonzero pairs ordered by the magnitude of their contribution to Φ_S².
    pub fn dominance(&self) -> Vec<(PairKey, f64)> {
        let mut v: Vec<_> =
            self.correlations.keys().map(|k| (*k, self.contribution(*k))).filter(|(_, c)| *c != 0.0).collect();
        v.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        v
    }

    /// Φ_S²/(2⟨Δφ_m²⟩) − 1, summed from the non-(m,m) pairs so that no
    /// cancellation against the dominant term occurs.
    pub fn next_order_ratio(&self) -> f64 {
        let mm = PairKey::new(PhaseLabel::M, PhaseLabel::M);
        let rest: Neumaier =
            self.correlations.iter().filter(|(k, _)| **k != mm).map(|(k, v)| k.multiplicity() * v).collect();
        rest.value() / self.get(mm)
    }
}

/// How the dilaton phases are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhiSMode {
    /// φ_S fixed at the configured value, average over φ_ρ only.
    #[default]
    Coherent,
    /// φ_S averaged uniformly and independently of φ_ρ.
    IndependentPhiS,
}

/// Uniform-node trapezoid grid over the dilaton phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageGrid {
    pub phi_rho_nodes: usize,
    pub phi_s_nodes: usize,
    /// Origin of the φ_ρ nodes; a full-period average does not depend on it.
    pub offset: f64,
}

impl AverageGrid {
    pub const DEFAULT_PHI_RHO_NODES: usize = 256;
    pub const DEFAULT_PHI_S_NODES: usize = 64;

    pub fn for_mode(mode: PhiSMode) -> Self {
        Self {
            phi_rho_nodes: Self::DEFAULT_PHI_RHO_NODES,
            phi_s_nodes: match mode {
                PhiSMode::Coherent => 1,
                PhiSMode::IndependentPhiS => Self::DEFAULT_PHI_S_NODES,
            },
            offset: 0.0,
        }
    }
}

/// Φ_S² from the phase catalog averaged over uniform dilaton-phase nodes.
///
/// The differential phases are trigonometric polynomials of low degree in the
/// dilaton phases, so the trapezoid rule on the default grids is exact up to
/// rounding.
pub fn signal_amplitude_numeric(
    grad: &GradiometerConfig,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
    mode: PhiSMode,
) -> Result<SignalBreakdown> {
    signal_amplitude_numeric_with(grad, species, dilaton, pert, mode, &AverageGrid::for_mode(mode))
}

pub fn signal_amplitude_numeric_with(
    grad: &GradiometerConfig,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
    mode: PhiSMode,
    grid: &AverageGrid,
) -> Result<SignalBreakdown> {
    if grid.phi_rho_nodes < 8 {
        return Err(Error::domain("at least 8 dilaton-phase nodes are required"));
    }
    let s_nodes = match mode {
        PhiSMode::Coherent => 1,
        PhiSMode::IndependentPhiS => grid.phi_s_nodes.max(1),
    };
    let pairs: Vec<PairKey> = PairKey::all().collect();
    let mut sums = vec![Neumaier::default(); pairs.len()];
    for a in 0..s_nodes {
        let d = match mode {
            PhiSMode::Coherent => *dilaton,
            PhiSMode::IndependentPhiS => dilaton.with_phi_s(TAU * a as f64 / s_nodes as f64),
        };
        for n in 0..grid.phi_rho_nodes {
            let phi = grid.offset + TAU * n as f64 / grid.phi_rho_nodes as f64;
            let dp = differential_phases(grad, species, &d, pert, phi)?;
            for (sum, key) in sums.iter_mut().zip(pairs.iter()) {
                sum.add(dp[key.i.index()] * dp[key.j.index()]);
            }
        }
    }
    let count = (s_nodes * grid.phi_rho_nodes) as f64;
    let correlations = pairs.into_iter().zip(sums).map(|(k, s)| (k, s.value() / count)).collect();
    Ok(SignalBreakdown::from_correlations(correlations, SignalMethod::NumericAverage))
}

/// Pairs with a closed-form correlation.
pub fn catalog_pairs() -> Vec<PairKey> {
    let p = |a: u8, b: u8| PairKey::new(PhaseLabel::ALL[a as usize], PhaseLabel::ALL[b as usize]);
    vec![
        p(0, 0),
        p(0, 1),
        p(0, 2),
        p(0, 4),
        p(0, 5),
        p(0, 6),
        p(0, 9),
        p(0, 12),
        p(0, 13),
        p(0, 14),
        p(9, 9),
        p(9, 10),
        p(1, 9),
        p(2, 9),
        p(10, 10),
        p(1, 10),
        p(2, 10),
        p(1, 1),
        p(1, 2),
        p(2, 2),
    ]
}

/// Quantities shared by the closed-form correlations.
pub(crate) struct CatalogInputs {
    pub w: f64,
    pub t: f64,
    pub k: f64,
    pub g: f64,
    pub c: f64,
    pub z0: f64,
    pub baseline: f64,
    pub omega_c: f64,
    pub omega_k: f64,
    pub delta_omega: f64,
    pub mu: f64,
    pub delta_mu: f64,
    pub gamma: f64,
    pub phi_s: f64,
    pub wp_bar: f64,
    pub wp_diff: f64,
    /// S(τ_L), S(T), C(T) with S(t) = sin(ω_ρt/2), C(t) = cos(ω_ρt/2).
    pub sl: f64,
    pub st: f64,
    pub ct: f64,
    /// sin ω_ρτ_L, cos ω_ρτ_L, sin ω_ρT, cos ω_ρT.
    pub s2l: f64,
    pub c2l: f64,
    pub s2t: f64,
    pub c2t: f64,
}

impl CatalogInputs {
    pub fn new(
        grad: &GradiometerConfig,
        species: &AtomSpecies,
        dilaton: &DilatonParams,
        pert: &PerturbationParameters,
    ) -> Result<Self> {
        grad.validate()?;
        let geom = &grad.geom;
        let cp = Couplings::resolve(geom.diffraction, species, dilaton, pert);
        let w = dilaton.omega_rho;
        let t = geom.t_half;
        let tau_l = grad.light_delay(species);
        let (s2l, c2l) = (w * tau_l).sin_cos();
        let (s2t, c2t) = (w * t).sin_cos();
        let (st, ct) = (0.5 * w * t).sin_cos();
        Ok(Self {
            w,
            t,
            k: geom.k,
            g: geom.g0,
            c: species.constants().c,
            z0: geom.z0,
            baseline: grad.baseline,
            omega_c: cp.compton_frequency,
            omega_k: geom.recoil_frequency(species),
            delta_omega: cp.delta_omega,
            mu: cp.mu_bar,
            delta_mu: cp.delta_mu,
            gamma: cp.gamma_dm,
            phi_s: dilaton.phi_s,
            wp_bar: grad.mean_momentum_ratio(species),
            wp_diff: grad.momentum_difference_ratio(species),
            sl: (0.5 * w * tau_l).sin(),
            st,
            ct,
            s2l,
            c2l,
            s2t,
            c2t,
        })
    }

    /// S(τ_L)² S(T)⁴
    fn base(&self) -> f64 {
        self.sl * self.sl * self.st.powi(4)
    }

    fn value(&self, key: PairKey) -> Option<f64> {
        let Self { w, t, k, g, c, z0, baseline, omega_c, omega_k, delta_omega, mu, delta_mu, gamma, phi_s, .. } = *self;
        let Self { wp_bar, wp_diff, sl, st, ct, s2l, c2l, s2t, c2t, .. } = *self;
        let wt = w * t;
        let base = self.base();
        let a = delta_omega / w;
        let kg2 = k * k * g * g / w.powi(4);
        let (sin_s, cos_s) = phi_s.sin_cos();
        let v = match (key.i.index(), key.j.index()) {
            (0, 0) => 32.0 * a * a * base,
            (0, 1) => -32.0 * a * (omega_k / w) * mu * (1.0 + 2.0 * wp_bar) * base,
            (0, 2) => 32.0 * a * (k * g * t / w) * mu * base,
            (0, 4) => {
                -8.0 * a * (omega_k / w) * delta_mu * (2.0 + 4.0 * wp_bar * (1.0 + wp_bar) + wp_diff * wp_diff) * base
            }
            (0, 5) | (0, 13) => {
                4.0 * a
                    * (k * g / (w * w))
                    * delta_mu
                    * st
                    * st
                    * (2.0 * (1.0 + 2.0 * wp_bar) * wt * (2.0 * sl * sl) * st * st
                        + wp_diff * s2l * (c2t + wt * s2t - 1.0))
            }
            (0, 6) | (0, 14) => {
                8.0 * a * (g * g / (c * c * w * w)) * (omega_c / w) * delta_mu * sl * sl * st * st * compton_bracket(wt)
            }
            (0, 9) => -32.0 * a * (k * g / (w * w)) * gamma * sin_s * base,
            (0, 12) => 16.0 * a * (g * (2.0 * z0 + baseline) / (c * c)) * (omega_c / w) * delta_mu * base,
            (9, 9) => 32.0 * kg2 * gamma * gamma * base,
            (9, 10) => 32.0 * kg2 * mu * gamma * cos_s * base,
            (1, 9) => {
                -16.0
                    * (k * g / (w * w))
                    * (omega_k / w)
                    * mu
                    * gamma
                    * st.powi(4)
                    * (wp_diff * cos_s * s2l - 2.0 * (1.0 + 2.0 * wp_bar) * sin_s * sl * sl)
            }
            (2, 9) => {
                32.0 * kg2 * mu * gamma * sl * sl * (st.powi(4) * (cos_s - wt * sin_s) - wt * st.powi(3) * ct * cos_s)
            }
            (10, 10) => 32.0 * kg2 * mu * mu * base,
            (1, 10) => -16.0 * (k * g / (w * w)) * (omega_k / w) * mu * mu * wp_diff * s2l * st.powi(4),
            (2, 10) => 32.0 * kg2 * mu * mu * sl * sl * st.powi(3) * (st - wt * ct),
            (1, 1) => {
                16.0 * (omega_k / w).powi(2)
                    * mu
                    * mu
                    * st.powi(4)
                    * ((2.0 * sl * sl) * (1.0 + 4.0 * wp_bar * (1.0 + wp_bar)) + wp_diff * wp_diff * (1.0 + c2l))
            }
            (1, 2) => {
                -8.0 * (k * g / (w * w))
                    * (omega_k / w)
                    * mu
                    * mu
                    * st
                    * st
                    * (4.0 * (1.0 + 2.0 * wp_bar) * wt * sl * sl * st * st + wp_diff * s2l * (1.0 - c2t - wt * s2t))
            }
            (2, 2) => 16.0 * kg2 * mu * mu * sl * sl * st * st * (2.0 * st * st + 2.0 * wt * x_minus_sin(wt)),
            _ => return None,
        };
        Some(v)
    }
}

/// 2 + 2(x² − 1) cos x − x² − 2x sin x, which starts at −3x⁴/4.
fn compton_bracket(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // Σ_{n≥2} (−1)^{n−1} 2(2n − 1)² x^{2n}/(2n)!
        let x2 = x * x;
        let mut pow_fact = x2 * x2 / 24.0;
        let mut sum = 0.0;
        for n in 2..40 {
            let nf = n as f64;
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            let term = sign * 2.0 * (2.0 * nf - 1.0).powi(2) * pow_fact;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pow_fact *= x2 / ((2.0 * nf + 1.0) * (2.0 * nf + 2.0));
        }
        sum
    } else {
        let (s, c) = x.sin_cos();
        let h = (0.5 * x).sin();
        4.0 * h * h + x * x * (2.0 * c - 1.0) - 2.0 * x * s
    }
}

/// x − sin x without cancellation at small x.
fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // Σ_{n≥1} (−1)^{n+1} x^{2n+1}/(2n+1)!
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum = 0.0;
        for n in 1..30 {
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            let nf = n as f64;
            term *= -x2 / ((2.0 * nf + 2.0) * (2.0 * nf + 3.0));
        }
        sum
    } else {
        x - x.sin()
    }
}

/// Closed-form ⟨Δφ_i Δφ_j⟩, or [`Error::NotCataloged`] for pairs without one.
pub fn correlation_analytic(
    i: PhaseLabel,
    j: PhaseLabel,
    grad: &GradiometerConfig,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<f64> {
    let key = PairKey::new(i, j);
    CatalogInputs::new(grad, species, dilaton, pert)?.value(key).ok_or_else(|| Error::NotCataloged(key.to_string()))
}

/// Φ_S² restricted to the cataloged pairs.
pub fn signal_amplitude_analytic(
    grad: &GradiometerConfig,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<SignalBreakdown> {
    let inputs = CatalogInputs::new(grad, species, dilaton, pert)?;
    let correlations = catalog_pairs().into_iter().map(|k| (k, inputs.value(k).expect("cataloged pair"))).collect();
    Ok(SignalBreakdown::from_correlations(correlations, SignalMethod::AnalyticCatalog))
}

/// Limiting cases with a compact signal amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Δε = 0: the transition-frequency term.
    MeanOnly,
    /// ε̄ = 0: the Compton-frequency term.
    DiffOnly,
    /// Bragg diffraction without gravity: the recoil term.
    BraggZeroG,
}

impl Regime {
    pub const ALL: [Self; 3] = [Self::MeanOnly, Self::DiffOnly, Self::BraggZeroG];

    pub fn name(self) -> &'static str {
        match self {
            Self::MeanOnly => "mean_only",
            Self::DiffOnly => "diff_only",
            Self::BraggZeroG => "bragg_zero_g",
        }
    }

    /// Whether the inputs satisfy the assumptions of the regime.
    pub fn applies(self, grad: &GradiometerConfig, species: &AtomSpecies) -> bool {
        match self {
            Self::MeanOnly => species.delta_eps() == 0.0,
            Self::DiffOnly => species.eps_bar() == 0.0,
            Self::BraggZeroG => grad.geom.diffraction.preserves_state() && grad.geom.g0 == 0.0,
        }
    }
}

/// Compact Φ_S² of a limiting regime.
pub fn regime_amplitude(
    regime: Regime,
    grad: &GradiometerConfig,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
    pert: &PerturbationParameters,
) -> Result<f64> {
    grad.validate()?;
    if !regime.applies(grad, species) {
        let why = match regime {
            Regime::MeanOnly => format!("requires delta_eps = 0, got {}", species.delta_eps()),
            Regime::DiffOnly => format!("requires eps_bar = 0, got {}", species.eps_bar()),
            Regime::BraggZeroG => "requires Bragg diffraction and g0 = 0".to_string(),
        };
        return Err(Error::Regime(format!("{}: {why}", regime.name())));
    }
    let inp = CatalogInputs::new(grad, species, dilaton, pert)?;
    let rho2 = dilaton.rho_0 * dilaton.rho_0;
    let w2 = inp.w * inp.w;
    Ok(match regime {
        Regime::MeanOnly => {
            let om = species.transition_frequency();
            64.0 * om * om / w2 * species.eps_bar().powi(2) * rho2 * inp.base()
        }
        Regime::DiffOnly => 64.0 * inp.omega_c * inp.omega_c / w2 * species.delta_eps().powi(2) * rho2 * inp.base(),
        Regime::BraggZeroG => {
            32.0 * inp.omega_k * inp.omega_k / w2
                * species.eps_bar().powi(2)
                * rho2
                * bragg_interferometric_factor(&inp)
        }
    })
}

/// Interferometric factor of ⟨Δφ₁²⟩.
fn bragg_interferometric_factor(inp: &CatalogInputs) -> f64 {
    let p = inp.wp_bar;
    let d = inp.wp_diff;
    inp.st.powi(4) * (2.0 * inp.sl * inp.sl * (1.0 + 4.0 * p * (1.0 + p)) + d * d * (1.0 + inp.c2l))
}

/// First-order deviation Φ_S²/(2⟨Δφ_m²⟩) − 1 for Δε = 0, from the (m,1),
/// (m,2) and (m,9) correlations.
pub fn next_order_ratio(grad: &GradiometerConfig, species: &AtomSpecies, dilaton: &DilatonParams) -> Result<f64> {
    let (om, wk, kg, a) = next_order_scales(grad, species, dilaton)?;
    Ok(-2.0 * (wk / om) * (1.0 + 2.0 * grad.mean_momentum_ratio(species)) + 2.0 * kg * grad.geom.t_half / om - a)
}

fn next_order_scales(
    grad: &GradiometerConfig,
    species: &AtomSpecies,
    dilaton: &DilatonParams,
) -> Result<(f64, f64, f64, f64)> {
    grad.validate()?;
    let om = species.transition_frequency();
    if om == 0.0 || species.eps_bar() == 0.0 {
        return Err(Error::Regime("next-order ratio needs a nonzero transition frequency and eps_bar".into()));
    }
    let kg = grad.geom.k * grad.geom.g0;
    let gravity = 2.0 * kg / (om * dilaton.omega_rho) * (dilaton.eps_s / species.eps_bar()) * dilaton.phi_s.sin();
    Ok((om, grad.geom.recoil_frequency(species), kg, gravity))
}

/// [⟨Δφ_m²⟩ at Δε = 0] / ⟨Δφ_m²⟩ = (a/(a + r))² on a grid of a = Ω/ω_c
/// (rows) and r = Δε/ε̄ (columns).
pub fn coupling_ratio_map(omega_over_omegac: &[f64], deltaeps_over_bareps: &[f64]) -> Vec<Vec<f64>> {
    omega_over_omegac.iter().map(|&a| deltaeps_over_bareps.iter().map(|&r| coupling_ratio(a, r)).collect()).collect()
}

pub fn coupling_ratio(omega_over_omegac: f64, deltaeps_over_bareps: f64) -> f64 {
    let q = omega_over_omegac / (omega_over_omegac + deltaeps_over_bareps);
    q * q
}

/// 64(δΩ/ω_ρ)², the clock-term Φ_S² without its interferometric factor.
pub fn clock_envelope(species: &AtomSpecies, dilaton: &DilatonParams) -> f64 {
    let a = crate::model::transition_modulation_amplitude(species, dilaton.rho_0) / dilaton.omega_rho;
    64.0 * a * a
}

/// The three correlations and the next-order ratio as they appear in print.
///
/// They disagree with a direct average of the catalog phases and are kept
/// only for comparison; see the tests below.
pub mod printed {
    use super::*;

    /// ⟨Δφ_{m,1}⟩ with the factor −16 (1 + 4℘̄₀).
    pub fn correlation_m1(
        grad: &GradiometerConfig,
        species: &AtomSpecies,
        dilaton: &DilatonParams,
        pert: &PerturbationParameters,
    ) -> Result<f64> {
        let i = CatalogInputs::new(grad, species, dilaton, pert)?;
        Ok(-16.0 * (i.delta_omega / i.w) * (i.omega_k / i.w) * i.mu * (1.0 + 4.0 * i.wp_bar) * i.base())
    }

    /// ⟨Δφ_{m,5}⟩ with the bracket [C(2τ_L) − 1] in its first term.
    pub fn correlation_m5(
        grad: &GradiometerConfig,
        species: &AtomSpecies,
        dilaton: &DilatonParams,
        pert: &PerturbationParameters,
    ) -> Result<f64> {
        let i = CatalogInputs::new(grad, species, dilaton, pert)?;
        let wt = i.w * i.t;
        Ok(4.0
            * (i.delta_omega / i.w)
            * (i.k * i.g / (i.w * i.w))
            * i.delta_mu
            * i.st
            * i.st
            * (2.0 * (1.0 + 2.0 * i.wp_bar) * wt * (i.c2l - 1.0) * i.st * i.st
                + i.wp_diff * i.s2l * (i.c2t + wt * i.s2t - 1.0)))
    }

    /// ⟨Δφ_{1,1}⟩ with C(2L) read as cos(ω_ρL) and Δ℘₀ to the first power.
    pub fn correlation_11(
        grad: &GradiometerConfig,
        species: &AtomSpecies,
        dilaton: &DilatonParams,
        pert: &PerturbationParameters,
    ) -> Result<f64> {
        let i = CatalogInputs::new(grad, species, dilaton, pert)?;
        let c2 = (i.w * i.baseline).cos();
        Ok(16.0
            * (i.omega_k / i.w).powi(2)
            * i.mu
            * i.mu
            * i.st.powi(4)
            * ((1.0 - c2) * (1.0 + 4.0 * i.wp_bar * (1.0 + i.wp_bar)) + i.wp_diff * (1.0 + c2)))
    }

    /// −(ω_k/Ω)(1 + 4℘̄₀) + 2kg₀T/Ω − 2(kg₀/(Ωω_ρ))(ε_S/ε̄) sin φ_S
    pub fn next_order_ratio(grad: &GradiometerConfig, species: &AtomSpecies, dilaton: &DilatonParams) -> Result<f64> {
        let (om, wk, kg, a) = next_order_scales(grad, species, dilaton)?;
        Ok(-(wk / om) * (1.0 + 4.0 * grad.mean_momentum_ratio(species)) + 2.0 * kg * grad.geom.t_half / om - a)
    }
}

/// |a − b| relative to the larger magnitude; zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
