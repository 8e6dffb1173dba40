//! Composite Gauss-Legendre quadrature for smooth oscillatory integrands.
//!
//! The interval is cut into equal panels, at least `panels_per_period` per
//! oscillation period of the carrier frequency handed in by the caller. The
//! panel count is doubled until two successive estimates agree to
//! `rel_tol` relative to the integral of |f|, or the panel budget runs out.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PanelQuadrature {
    nodes: Vec<(f64, f64)>,
    pub min_panels: usize,
    pub panels_per_period: usize,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl PanelQuadrature {
    pub fn new(degree: usize, rel_tol: f64) -> Result<Self> {
        let degree = NonZeroUsize::new(degree).ok_or_else(|| Error::domain("quadrature degree must be >= 1"))?;
        if rel_tol.is_nan() || rel_tol <= 0.0 {
            return Err(Error::domain("quadrature tolerance must be positive"));
        }
        let rule = GaussLegendre::new(degree);
        let nodes = rule.as_node_weight_pairs().to_vec();
        Ok(Self { nodes, min_panels: 2, panels_per_period: 8, rel_tol, max_panels: 1 << 21 })
    }

    /// Shared default engine: degree 20 panels, tolerance 1e-14.
    pub fn shared() -> &'static PanelQuadrature {
        static ENGINE: OnceLock<PanelQuadrature> = OnceLock::new();
        ENGINE.get_or_init(Self::default)
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over [a, b]. `omega` is the angular frequency of the
    /// fastest oscillation in `f` and fixes the initial panel count.
    pub fn integrate<F>(&self, a: f64, b: f64, omega: f64, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("integration bounds must be finite"));
        }
        if a == b {
            return Ok(0.0);
        }
        let periods = omega.abs() * (b - a).abs() / std::f64::consts::TAU;
        let mut panels = ((periods * self.panels_per_period as f64).ceil() as usize).max(self.min_panels);
        if panels > self.max_panels {
            return Err(Error::NonConvergence { a, b, panels, delta: f64::INFINITY, target: 0.0 });
        }
        let (mut prev, _) = self.fixed(a, b, panels, &f);
        loop {
            panels *= 2;
            let (next, magnitude) = self.fixed(a, b, panels, &f);
            let delta = (next - prev).abs();
            let target = self.rel_tol * magnitude;
            if delta <= target || magnitude == 0.0 {
                return Ok(next);
            }
            if panels * 2 > self.max_panels || !next.is_finite() {
                return Err(Error::NonConvergence { a, b, panels, delta, target });
            }
            prev = next;
        }
    }

    /// Fixed-panel rule. Returns the integral and the integral of |f|.
    pub fn fixed<F>(&self, a: f64, b: f64, panels: usize, f: &F) -> (f64, f64)
    where
        F: Fn(f64) -> f64,
    {
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut sum = Neumaier::default();
        let mut abs = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            let mut panel = 0.0;
            let mut panel_abs = 0.0;
            for &(x, w) in &self.nodes {
                let v = f(mid + half * x) * w;
                panel += v;
                panel_abs += v.abs();
            }
            sum.add(panel * half);
            abs += panel_abs * half.abs();
        }
        (sum.value(), abs)
    }
}

impl Default for PanelQuadrature {
    fn default() -> Self {
        Self::new(20, 1e-14).expect("valid default quadrature")
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
