//! Direct evaluation of the first-order Duhamel coefficients
//!
//! `I_{j,n}(t, x) = -(i N_eps / eps^{5/2}) int_0^t ds int dxi int_{region} du
//!                  exp(i xi.x + i s xi^2 / 2) g_{n,0}(xi) f(x + s xi) exp(i Phi / eps)`
//!
//! with `Phi = -xi.a_j + v0 u.(x + s xi) + |n| s`.
//!
//! Every factor of the momentum integrand is a Gaussian times a monomial along
//! each Cartesian axis, so the `xi` integral collapses to three complex
//! Gaussian moments. What remains is a three-dimensional integral over time
//! and direction, done in the frame where `a_j` is the pole: composite
//! Gauss-Legendre in `s` and polar angle with panels sized to the
//! stationary-phase scale, and a trapezoid rule in azimuth sized to the
//! harmonic content of the integrand.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{pair_coefficient, potential_prefactor};
use crate::model::{abs_n, derive_geometry, normalization_constant, Geometry, ModelConfig, Multi, Vec3};
use crate::quad::{self, QuadSpec, XiMode};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Smallest admissible `Re(alpha)` in a Gaussian moment.
pub const ALPHA_FLOOR: f64 = 0.05;

/// Nodes whose magnitude bound falls this far (natural log) below the peak are skipped.
const SKIP_LOG: f64 = -34.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Directions inside the cone `C_j`.
    Cone,
    /// The whole sphere.
    Sphere,
    /// The sphere minus `C_j`.
    Complement,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::Cone => "cone",
            Region::Sphere => "sphere",
            Region::Complement => "complement",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffResult {
    pub n: Multi,
    pub region: Region,
    pub value: C64,
    /// Difference between the rule with doubled node counts and the base rule.
    pub est_error: f64,
    /// Whether `est_error <= target_tol * |value|`.
    pub converged: bool,
}

/// Moments `int xi^m exp(-alpha xi^2 + beta xi) dxi` for `m = 0 ..= m_max`.
pub fn axis_integral(m_max: usize, alpha: C64, beta: C64) -> Result<Vec<C64>> {
    if alpha.re < ALPHA_FLOOR {
        return Err(Error::numerical(format!(
            "Gaussian moment with Re(alpha) = {} below {ALPHA_FLOOR}",
            alpha.re
        )));
    }
    let mut out = Vec::with_capacity(m_max + 1);
    ratios_into(m_max, beta, 0.5 / alpha, &mut out);
    let i0 = (PI / alpha).sqrt() * (beta * beta * 0.25 / alpha).exp();
    Ok(out.into_iter().map(|r| r * i0).collect())
}

/// Ratios `I_m / I_0` of the Gaussian moments, `m = 0 ..= m_max`.
#[inline]
fn ratios_into(m_max: usize, beta: C64, inv_2a: C64, out: &mut Vec<C64>) {
    out.clear();
    out.push(C64::new(1.0, 0.0));
    if m_max >= 1 {
        out.push(beta * inv_2a);
    }
    for m in 2..=m_max {
        let v = ((m - 1) as f64 * out[m - 2] + beta * out[m - 1]) * inv_2a;
        out.push(v);
    }
}

/// Same moments by composite Gauss-Legendre around the Gaussian's centre.
fn moments_by_quadrature(
    m_max: usize,
    alpha: C64,
    beta: C64,
    shift: C64,
    rule: &[(f64, f64)],
    cutoff: f64,
    out: &mut Vec<C64>,
) {
    let width = alpha.re.sqrt().recip();
    let centre = beta.re / (2.0 * alpha.re);
    let nodes = quad::composite(centre - cutoff * width, centre + cutoff * width, width, rule);
    out.clear();
    out.resize(m_max + 1, C64::new(0.0, 0.0));
    for &(xi, w) in &nodes {
        let e = (-alpha * xi * xi + beta * xi + shift).exp() * w;
        let mut p = 1.0;
        for slot in out.iter_mut() {
            *slot += e * p;
            p *= xi;
        }
    }
}

struct Setup<'a> {
    eps: f64,
    v0: f64,
    width: f64,
    tau: f64,
    theta0: f64,
    a: Vec3,
    x: Vec3,
    /// `x` in the frame where `a_j` is the pole.
    xr: Vec3,
    rot_t: Matrix3<f64>,
    channels: &'a [Multi],
    coef: Vec<C64>,
    axis_max: [usize; 3],
    abs_max: usize,
}

fn polar_ranges(region: Region, theta0: f64) -> Vec<(f64, f64)> {
    match region {
        Region::Cone => vec![(0.0, theta0)],
        Region::Complement => vec![(theta0, PI)],
        Region::Sphere => vec![(0.0, theta0), (theta0, PI)],
    }
}

/// One pass of the rule; returns one integral per channel, without the global prefactor.
fn integrate(st: &Setup, t: f64, region: Region, q: &QuadSpec) -> Vec<C64> {
    let (eps, v0) = (st.eps, st.v0);
    let nch = st.channels.len();
    let mut acc = vec![C64::new(0.0, 0.0); nch];
    let s_nodes = quad::composite(0.0, t, q.panel_width * eps / v0, &quad::legendre(q.s_nodes));
    let th_rule = quad::legendre(q.munu_nodes);
    let mut th_nodes = Vec::new();
    for (lo, hi) in polar_ranges(region, st.theta0) {
        th_nodes.extend(quad::composite(lo, hi, q.panel_width * eps / (v0 * st.tau), &th_rule));
    }
    if s_nodes.is_empty() || th_nodes.is_empty() {
        return acc;
    }

    let xn = st.x.norm();
    let xperp = st.xr.x.hypot(st.xr.y);
    let anorm = st.a.norm();
    let base = 0.25 + 0.5 * st.width * st.width;

    struct SNode {
        s: f64,
        w: f64,
        alpha: C64,
        c4: C64,
        sqrt_pi_alpha3: C64,
        inv_2a: C64,
    }
    let snodes: Vec<SNode> = s_nodes
        .iter()
        .map(|&(s, w)| {
            let alpha = C64::new(base + 0.5 * s * s, -0.5 * s);
            SNode {
                s,
                w,
                alpha,
                c4: 0.25 / alpha,
                sqrt_pi_alpha3: (PI / alpha).sqrt().powu(3),
                inv_2a: 0.5 / alpha,
            }
        })
        .collect();

    // Log-magnitude bound of the integrand at each (s, theta); the azimuth only
    // enters through a cross term bounded by Cauchy-Schwarz.
    let mut bounds = Vec::with_capacity(snodes.len() * th_nodes.len());
    let mut peak = f64::NEG_INFINITY;
    for sn in &snodes {
        let (p, qi) = (sn.c4.re, sn.c4.im);
        let s = sn.s;
        let const_part = (p * (s * s - 1.0) + 2.0 * qi * s - 0.5) * xn * xn
            + 1.5 * (PI / sn.alpha.norm()).ln();
        for &(th, _) in &th_nodes {
            let d2 = (v0 * v0 * s * s + anorm * anorm - 2.0 * v0 * s * anorm * th.cos()).max(0.0)
                / (eps * eps);
            let d = d2.sqrt();
            let slack = st.abs_max as f64
                * (1.0 + (xn * (1.0 + s) + d) / (2.0 * sn.alpha.norm()) + 1.0 / sn.alpha.norm()).ln();
            let b = -p * d2 + 2.0 * (qi * s - p).abs() * xn * d + const_part + slack + th.sin().max(1e-300).ln();
            peak = peak.max(b);
            bounds.push(b);
        }
    }

    let xi_rule = match q.xi_mode {
        XiMode::Quadrature => quad::legendre(q.xi_nodes),
        XiMode::ClosedForm => Vec::new(),
    };
    let mut ax: [Vec<C64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut es = vec![C64::new(0.0, 0.0); st.abs_max + 1];
    let half_x2: [f64; 3] = [0.5 * st.x.x * st.x.x, 0.5 * st.x.y * st.x.y, 0.5 * st.x.z * st.x.z];

    for (si, sn) in snodes.iter().enumerate() {
        let s = sn.s;
        for (m, e) in es.iter_mut().enumerate() {
            *e = C64::from_polar(1.0, m as f64 * s / eps);
        }
        let amp_s = (2.0 * sn.c4 * (I - s) * I).norm() * v0 * s / eps;
        for (ti, &(th, wth)) in th_nodes.iter().enumerate() {
            if bounds[si * th_nodes.len() + ti] < peak + SKIP_LOG {
                continue;
            }
            let (sth, cth) = th.sin_cos();
            let harmonics = sth * xperp * (v0 / eps + amp_s);
            let m_az = q.azimuth_nodes + (1.15 * harmonics).ceil() as usize + 2 * st.abs_max;
            let w_node = sn.w * wth * sth * 2.0 * PI / m_az as f64;
            for k in 0..m_az {
                let phi = 2.0 * PI * k as f64 / m_az as f64;
                let (sp, cp) = phi.sin_cos();
                let u = st.rot_t * Vec3::new(sth * cp, sth * sp, cth);
                let mut betas = [C64::new(0.0, 0.0); 3];
                for axis in 0..3 {
                    let dk = (v0 * s * u[axis] - st.a[axis]) / eps;
                    betas[axis] = C64::new(-s * st.x[axis], st.x[axis] + dk);
                }
                let phase = C64::new(0.0, v0 * u.dot(&st.x) / eps);
                let common = match q.xi_mode {
                    XiMode::ClosedForm => {
                        // One exponential for all three axes; per-axis moments are
                        // carried as ratios I_m / I_0.
                        let mut e = phase;
                        for axis in 0..3 {
                            e += betas[axis] * betas[axis] * sn.c4 - half_x2[axis];
                            ratios_into(st.axis_max[axis], betas[axis], sn.inv_2a, &mut ax[axis]);
                        }
                        sn.sqrt_pi_alpha3 * e.exp() * w_node
                    }
                    XiMode::Quadrature => {
                        for axis in 0..3 {
                            moments_by_quadrature(
                                st.axis_max[axis],
                                sn.alpha,
                                betas[axis],
                                C64::new(-half_x2[axis], 0.0),
                                &xi_rule,
                                q.xi_cutoff,
                                &mut ax[axis],
                            );
                        }
                        phase.exp() * w_node
                    }
                };
                for (c, n) in st.channels.iter().enumerate() {
                    acc[c] += common * es[abs_n(n)] * st.coef[c] * ax[0][n[0]] * ax[1][n[1]] * ax[2][n[2]];
                }
            }
        }
    }
    acc
}

/// Coefficients of several channels at one point `x` (rescaled units, lab frame).
///
/// `gauge` rotates the chart about the pole; results must not depend on it
/// beyond quadrature error.
pub fn first_order_coeffs(
    cfg: &ModelConfig,
    geom: &Geometry,
    j: usize,
    channels: &[Multi],
    t: f64,
    x: &Vec3,
    region: Region,
    gauge: f64,
) -> Result<Vec<CoeffResult>> {
    if !x.iter().all(|v| v.is_finite()) || !t.is_finite() {
        return Err(Error::numerical("non-finite coefficient input"));
    }
    if j >= geom.tau.len() {
        return Err(Error::numerical(format!("oscillator index {j} out of range")));
    }
    let spin = Matrix3::new(
        gauge.cos(), -gauge.sin(), 0.0,
        gauge.sin(), gauge.cos(), 0.0,
        0.0, 0.0, 1.0,
    );
    let rot = spin * geom.rotations[j];
    let mut axis_max = [0usize; 3];
    for n in channels {
        for k in 0..3 {
            axis_max[k] = axis_max[k].max(n[k]);
        }
    }
    let st = Setup {
        eps: cfg.epsilon,
        v0: cfg.v0,
        width: cfg.potential_width,
        tau: geom.tau[j],
        theta0: geom.theta0,
        a: cfg.oscillators[j].position,
        x: *x,
        xr: rot * x,
        rot_t: rot.transpose(),
        channels,
        coef: channels
            .iter()
            .map(|n| (0..3).map(|k| pair_coefficient(n[k])).product())
            .collect(),
        axis_max,
        abs_max: channels.iter().map(abs_n).max().unwrap_or(0),
    };
    let eps = cfg.epsilon;
    let pre = -I * normalization_constant(eps, cfg.v0) * eps.powf(-2.5)
        * potential_prefactor(cfg.potential_width)
        * PI.powf(-0.75);
    let coarse = integrate(&st, t, region, &cfg.quad);
    let fine = integrate(&st, t, region, &cfg.quad.doubled());
    Ok(channels
        .iter()
        .enumerate()
        .map(|(c, n)| {
            let value = pre * fine[c];
            let est_error = (pre * (fine[c] - coarse[c])).norm();
            CoeffResult {
                n: *n,
                region,
                value,
                est_error,
                converged: est_error <= cfg.quad.target_tol * value.norm(),
            }
        })
        .collect())
}

/// `I_{j,n}(t, x)` over `region`, with `j` zero-based.
pub fn first_order_coeff(
    cfg: &ModelConfig,
    j: usize,
    n: &Multi,
    t: f64,
    x: &Vec3,
    region: Region,
) -> Result<CoeffResult> {
    let geom = derive_geometry(cfg)?;
    let mut v = first_order_coeffs(cfg, &geom, j, &[*n], t, x, region, 0.0)?;
    Ok(v.remove(0))
}
