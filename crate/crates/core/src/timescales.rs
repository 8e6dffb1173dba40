//! The five oscillatory time scales of a Mach-Zehnder sequence.
//!
//! With ϑ(t) = ω_ρ t + φ_ρ and s = t − t₀:
//!
//! | kind      | definition                                                        |
//! |-----------|-------------------------------------------------------------------|
//! | `Tau1`    | ∫₀ᵀ cos ϑ ds − ∫ᵀ²ᵀ cos ϑ ds                                        |
//! | `Tau2Sq`  | ∫₀ᵀ s cos ϑ ds − ∫ᵀ²ᵀ s cos ϑ ds                                    |
//! | `Tau3Cu`  | ∫₀ᵀ s² cos ϑ ds − ∫ᵀ²ᵀ s² cos ϑ ds                                  |
//! | `TauSSq`  | ∫₀ᵀ s cos(ϑ+φ_S) ds + ∫ᵀ²ᵀ (2T − s) cos(ϑ+φ_S) ds                   |
//! | `TauEpSq` | ∫₀ᵀ s cos ϑ ds + ∫ᵀ²ᵀ (2T − s) cos ϑ ds                             |
//!
//! Centering on the mirror pulse, u = (t − t₀ − T)/T ∈ [−1, 1], reduces all
//! of them to the moments c_n(x) = ∫₀¹ uⁿ cos(xu) du and
//! s_n(x) = ∫₀¹ uⁿ sin(xu) du with x = ω_ρT, multiplied by cos ψ or sin ψ
//! where ψ = ω_ρ(t₀ + T) + φ_ρ.
//!
//! The moments are taken from their Taylor series below
//! [`SERIES_CROSSOVER`] and from half-angle closed forms above it; only s₂
//! cancels badly in closed form, roughly as 1e-16/x².

use crate::error::{Error, Result};
use crate::quadrature::PanelQuadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimescaleKind {
    Tau1,
    Tau2Sq,
    Tau3Cu,
    TauSSq,
    TauEpSq,
}

impl TimescaleKind {
    pub const ALL: [Self; 5] = [Self::Tau1, Self::Tau2Sq, Self::Tau3Cu, Self::TauSSq, Self::TauEpSq];

    /// Power of seconds carried by the value.
    pub fn time_power(self) -> i32 {
        match self {
            Self::Tau1 => 1,
            Self::Tau2Sq | Self::TauSSq | Self::TauEpSq => 2,
            Self::Tau3Cu => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Tau1 => "tau1",
            Self::Tau2Sq => "tau2_sq",
            Self::Tau3Cu => "tau3_cu",
            Self::TauSSq => "tauS_sq",
            Self::TauEpSq => "tauEP_sq",
        }
    }
}

/// Below this value of ω_ρT the moments are summed from their series.
pub const SERIES_CROSSOVER: f64 = 0.5;

/// Moments of cos(xu) and sin(xu) on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub c0: f64,
    pub c1: f64,
    /// c₀ − c₁ = ∫₀¹ (1 − u) cos(xu) du, kept separately to avoid the subtraction.
    pub c0_minus_c1: f64,
    pub s0: f64,
    pub s2: f64,
}

impl Moments {
    pub fn new(x: f64) -> Self {
        if x.abs() < SERIES_CROSSOVER {
            Self::series(x)
        } else {
            Self::closed(x)
        }
    }

    pub fn series(x: f64) -> Self {
        let x2 = x * x;
        // a_k = (−1)^k x^{2k}/(2k)!, b_k = (−1)^k x^{2k+1}/(2k+1)!
        let mut a = 1.0;
        let mut b = x;
        let (mut c0, mut c1, mut cm, mut s0, mut s2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for k in 0..40 {
            let kk = 2.0 * k as f64;
            let dc0 = a / (kk + 1.0);
            c0 += dc0;
            c1 += a / (kk + 2.0);
            cm += a / ((kk + 1.0) * (kk + 2.0));
            s0 += b / (kk + 2.0);
            s2 += b / (kk + 4.0);
            if dc0.abs() < 1e-18 * c0.abs() && (b / (kk + 2.0)).abs() <= 1e-18 * s0.abs() {
                break;
            }
            a *= -x2 / ((kk + 1.0) * (kk + 2.0));
            b *= -x2 / ((kk + 2.0) * (kk + 3.0));
        }
        Self { c0, c1, c0_minus_c1: cm, s0, s2 }
    }

    pub fn closed(x: f64) -> Self {
        let (sin, cos) = x.sin_cos();
        let half = (0.5 * x).sin();
        let c0 = sin / x;
        let c0_minus_c1 = 2.0 * half * half / (x * x);
        let c1 = c0 - c0_minus_c1;
        let s0 = 2.0 * half * half / x;
        let s2 = (2.0 * c1 - cos) / x;
        Self { c0, c1, c0_minus_c1, s0, s2 }
    }
}

/// All five time scales of one interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timescales {
    pub tau1: f64,
    pub tau2_sq: f64,
    pub tau3_cu: f64,
    pub tau_s_sq: f64,
    pub tau_ep_sq: f64,
}

impl Timescales {
    pub fn evaluate(t0: f64, t_half: f64, omega_rho: f64, phi_rho: f64, phi_s: f64) -> Result<Self> {
        check_args(t0, t_half, omega_rho, phi_rho, phi_s)?;
        let x = omega_rho * t_half;
        let m = Moments::new(x);
        let psi = omega_rho * (t0 + t_half) + phi_rho;
        let (sin_psi, cos_psi) = psi.sin_cos();
        let cos_psi_s = (psi + phi_s).cos();
        let t2 = t_half * t_half;
        Ok(Self {
            tau1: t_half * 2.0 * sin_psi * m.s0,
            tau2_sq: t2 * 2.0 * (sin_psi * m.s0 - cos_psi * m.c1),
            tau3_cu: t2 * t_half * 2.0 * (sin_psi * (m.s0 + m.s2) - 2.0 * cos_psi * m.c1),
            tau_s_sq: t2 * 2.0 * cos_psi_s * m.c0_minus_c1,
            tau_ep_sq: t2 * 2.0 * cos_psi * m.c0_minus_c1,
        })
    }

    pub fn get(&self, kind: TimescaleKind) -> f64 {
        match kind {
            TimescaleKind::Tau1 => self.tau1,
            TimescaleKind::Tau2Sq => self.tau2_sq,
            TimescaleKind::Tau3Cu => self.tau3_cu,
            TimescaleKind::TauSSq => self.tau_s_sq,
            TimescaleKind::TauEpSq => self.tau_ep_sq,
        }
    }
}

fn check_args(t0: f64, t_half: f64, omega_rho: f64, phi_rho: f64, phi_s: f64) -> Result<()> {
    if !(t_half.is_finite() && t_half >= 0.0) {
        return Err(Error::domain(format!("interrogation time must be non-negative, got {t_half}")));
    }
    if !(omega_rho.is_finite() && omega_rho >= 0.0) {
        return Err(Error::domain(format!("omega_rho must be non-negative, got {omega_rho}")));
    }
    if !(t0.is_finite() && phi_rho.is_finite() && phi_s.is_finite()) {
        return Err(Error::domain("time-scale arguments must be finite"));
    }
    Ok(())
}

/// Closed-form value of one time scale. `phi_s` only enters `TauSSq`.
pub fn timescale(kind: TimescaleKind, t0: f64, t_half: f64, omega_rho: f64, phi_rho: f64, phi_s: f64) -> Result<f64> {
    Timescales::evaluate(t0, t_half, omega_rho, phi_rho, phi_s).map(|t| t.get(kind))
}

/// Quadrature of the defining integral with the shared panel engine.
pub fn timescale_quadrature(
    kind: TimescaleKind,
    t0: f64,
    t_half: f64,
    omega_rho: f64,
    phi_rho: f64,
    phi_s: f64,
) -> Result<f64> {
    timescale_quadrature_with(PanelQuadrature::shared(), kind, t0, t_half, omega_rho, phi_rho, phi_s)
}

/// Quadrature of the defining integral.
///
/// The two windows are folded onto s ∈ [0, T] (second window shifted by T).
/// For the sign-alternating kinds the paired cosines are combined as
/// cos a − cos(a + x) = 2 sin(a + x/2) sin(x/2) before integrating, which
/// keeps full relative accuracy when ω_ρT is tiny.
pub fn timescale_quadrature_with(
    engine: &PanelQuadrature,
    kind: TimescaleKind,
    t0: f64,
    t_half: f64,
    omega_rho: f64,
    phi_rho: f64,
    phi_s: f64,
) -> Result<f64> {
    check_args(t0, t_half, omega_rho, phi_rho, phi_s)?;
    let theta0 = (omega_rho * t0 + phi_rho).rem_euclid(std::f64::consts::TAU);
    let x = omega_rho * t_half;
    let half_sin = (0.5 * x).sin();
    let t = t_half;
    let diff = move |a: f64| 2.0 * (a + 0.5 * x).sin() * half_sin;
    match kind {
        TimescaleKind::Tau1 => engine.integrate(0.0, t, omega_rho, |s| diff(theta0 + omega_rho * s)),
        TimescaleKind::Tau2Sq => engine.integrate(0.0, t, omega_rho, |s| {
            let a = theta0 + omega_rho * s;
            s * diff(a) - t * (a + x).cos()
        }),
        TimescaleKind::Tau3Cu => engine.integrate(0.0, t, omega_rho, |s| {
            let a = theta0 + omega_rho * s;
            s * s * diff(a) - (2.0 * s * t + t * t) * (a + x).cos()
        }),
        TimescaleKind::TauSSq | TimescaleKind::TauEpSq => {
            let shift = if kind == TimescaleKind::TauSSq { phi_s } else { 0.0 };
            engine.integrate(0.0, t, omega_rho, |s| {
                let a = theta0 + omega_rho * s + shift;
                s * a.cos() + (t - s) * (a + x).cos()
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    #[test]
    fn tau1_vanishes_over_full_period() {
        let t = 1.7;
        for (t0, phi) in [(0.0, 0.0), (3.3, 1.1), (-2.0, 5.9)] {
            let v = timescale(TimescaleKind::Tau1, t0, t, TAU / t, phi, 0.0).unwrap();
            assert!(v.abs() < 1e-15 * t, "{v}");
        }
    }

    #[test]
    fn tau1_scales_inversely_with_frequency() {
        // hold ω t₀, ω T and φ fixed
        let (wt0, wt, phi) = (2.3, 0.9, 0.4);
        let base = timescale(TimescaleKind::Tau1, wt0, wt, 1.0, phi, 0.0).unwrap();
        for w in [1e-3, 0.5, 7.0, 1e4] {
            let v = timescale(TimescaleKind::Tau1, wt0 / w, wt / w, w, phi, 0.0).unwrap();
            assert_relative_eq!(v * w, base, max_relative = 1e-13);
        }
    }

    #[test]
    fn negative_time_is_rejected() {
        assert!(matches!(timescale(TimescaleKind::Tau2Sq, 0.0, -1.0, 1.0, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(timescale_quadrature(TimescaleKind::Tau1, 0.0, -1.0, 1.0, 0.0, 0.0).is_err());
        assert!(timescale(TimescaleKind::Tau1, 0.0, 1.0, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn quadrature_static_limits() {
        let t = 1.3;
        let v = timescale_quadrature(TimescaleKind::Tau1, 0.5, t, 0.0, 0.7, 0.0).unwrap();
        assert_eq!(v, 0.0);
        let v = timescale_quadrature(TimescaleKind::TauEpSq, 0.5, t, 0.0, 0.7, 0.0).unwrap();
        assert_relative_eq!(v, t * t * 0.7f64.cos(), max_relative = 1e-14);
        let v = timescale(TimescaleKind::TauEpSq, 0.5, t, 0.0, 0.7, 0.0).unwrap();
        assert_relative_eq!(v, t * t * 0.7f64.cos(), max_relative = 1e-15);
    }

    #[test]
    fn static_limits_of_the_odd_kinds() {
        // ω = 0: τ₂² = −T², τ₃³ = −2T³ times cos φ
        let (t, phi) = (0.8, 0.3);
        assert_relative_eq!(
            timescale(TimescaleKind::Tau2Sq, 0.0, t, 0.0, phi, 0.0).unwrap(),
            -t * t * phi.cos(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            timescale(TimescaleKind::Tau3Cu, 0.0, t, 0.0, phi, 0.0).unwrap(),
            -2.0 * t * t * t * phi.cos(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn series_meets_closed_form_at_crossover() {
        for x in [SERIES_CROSSOVER, SERIES_CROSSOVER * (1.0 - 1e-12), 0.45, 0.6] {
            let a = Moments::series(x);
            let b = Moments::closed(x);
            for (u, v) in [(a.c0, b.c0), (a.c1, b.c1), (a.c0_minus_c1, b.c0_minus_c1), (a.s0, b.s0), (a.s2, b.s2)] {
                assert!((u - v).abs() <= 1e-12 * u.abs(), "x={x}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn s_phase_shift_reduces_to_ep() {
        let a = timescale(TimescaleKind::TauSSq, 0.4, 1.1, 2.7, 0.9, 0.0).unwrap();
        let b = timescale(TimescaleKind::TauEpSq, 0.4, 1.1, 2.7, 0.9, 1.234).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn closed_form_matches_quadrature(
            log_x in -8.0f64..3.0,
            t in 0.05f64..5.0,
            t0 in -10.0f64..10.0,
            phi in 0.0f64..TAU,
            phi_s in 0.0f64..TAU,
            k in 0usize..5,
        ) {
            let kind = TimescaleKind::ALL[k];
            let w = 10f64.powf(log_x) / t;
            let closed = timescale(kind, t0, t, w, phi, phi_s).unwrap();
            let quad = timescale_quadrature(kind, t0, t, w, phi, phi_s).unwrap();
            let floor = 1e-4 * t.powi(kind.time_power());
            prop_assert!((closed - quad).abs() <= 1e-10 * closed.abs().max(floor),
                "{kind:?} x={} closed={closed} quad={quad}", w * t);
        }

        #[test]
        fn small_argument_regime_is_relatively_accurate(
            log_x in -8.0f64..-4.0,
            t in 0.05f64..5.0,
            t0 in -1.0f64..1.0,
            phi in 0.0f64..TAU,
            k in 0usize..5,
        ) {
            let kind = TimescaleKind::ALL[k];
            let w = 10f64.powf(log_x) / t;
            let closed = timescale(kind, t0, t, w, phi, 0.7).unwrap();
            let quad = timescale_quadrature(kind, t0, t, w, phi, 0.7).unwrap();
            prop_assert!((closed - quad).abs() <= 1e-10 * closed.abs(),
                "{kind:?} x={} closed={closed} quad={quad}", w * t);
        }

        #[test]
        fn periodic_in_dilaton_phase(
            w in 0.0f64..50.0, t in 0.1f64..3.0, t0 in 0.0f64..5.0, phi in 0.0f64..TAU, k in 0usize..5,
        ) {
            let kind = TimescaleKind::ALL[k];
            let a = timescale(kind, t0, t, w, phi, 0.3).unwrap();
            let b = timescale(kind, t0, t, w, phi + TAU, 0.3).unwrap();
            let scale = t.powi(kind.time_power()) * 4.0;
            prop_assert!((a - b).abs() <= 1e-14 * scale.max(scale * w * t0));
        }
    }
}
