//! Quadrature rules and the node-count settings shared by the oracles.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigRule, Error, Result};

/// How the inner momentum integral of a Duhamel coefficient is done.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiMode {
    /// Exact complex Gaussian moments, one factor per Cartesian axis.
    ClosedForm,
    /// Composite Gauss-Legendre per axis; slow, kept as a cross-check.
    Quadrature,
}

/// Node counts for the (s, polar, azimuth) quadrature of a coefficient.
///
/// Lengths are measured in units of the natural stationary-phase scale,
/// `eps / v0` in time and `eps / (v0 * tau_j)` in polar angle, so one set of
/// counts serves every `eps`. The coarse rule uses these counts; the reported
/// value comes from the rule with every count doubled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSpec {
    /// Gauss-Legendre nodes per time panel.
    pub s_nodes: usize,
    /// Gauss-Legendre nodes per polar-angle panel.
    pub munu_nodes: usize,
    /// Azimuthal trapezoid nodes on top of the harmonic-content estimate.
    pub azimuth_nodes: usize,
    /// Panel width in natural units.
    pub panel_width: f64,
    pub xi_mode: XiMode,
    /// Nodes per unit panel in `XiMode::Quadrature`.
    pub xi_nodes: usize,
    /// Half-width of the per-axis window in `XiMode::Quadrature`, in units of the Gaussian width.
    pub xi_cutoff: f64,
    /// Relative tolerance for the doubled-vs-base difference; applied per
    /// coefficient and to grid-weighted study errors.
    pub target_tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            s_nodes: 6,
            munu_nodes: 6,
            azimuth_nodes: 12,
            panel_width: 2.0,
            xi_mode: XiMode::ClosedForm,
            xi_nodes: 24,
            xi_cutoff: 10.0,
            target_tol: 1e-4,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |d: &str| Err(Error::config(ConfigRule::Quadrature, d));
        if self.s_nodes < 2 || self.munu_nodes < 2 || self.azimuth_nodes < 4 {
            return bad("node counts must be at least 2 (azimuth at least 4)");
        }
        if !(self.panel_width > 0.0) || !self.panel_width.is_finite() {
            return bad("panel_width must be positive");
        }
        if self.xi_nodes < 2 || !(self.xi_cutoff > 0.0) {
            return bad("xi_nodes must be at least 2 and xi_cutoff positive");
        }
        if !(self.target_tol > 0.0 && self.target_tol < 1.0) {
            return bad("target_tol must lie in (0, 1)");
        }
        Ok(())
    }

    /// The same spec with every node count doubled.
    pub fn doubled(&self) -> QuadSpec {
        QuadSpec {
            s_nodes: 2 * self.s_nodes,
            munu_nodes: 2 * self.munu_nodes,
            azimuth_nodes: 2 * self.azimuth_nodes,
            xi_nodes: 2 * self.xi_nodes,
            ..*self
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n).expect("rule size must be positive");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)`.
pub fn hermite(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n).expect("rule size must be positive");
    GaussHermite::new(n).as_node_weight_pairs().to_vec()
}

/// Composite Gauss-Legendre rule on `[a, b]` with panels no wider than `width`.
pub fn composite(a: f64, b: f64, width: f64, rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if !(b > a) {
        return Vec::new();
    }
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}
