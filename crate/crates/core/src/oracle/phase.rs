use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernels::coupling_g;
use crate::model::{
    abs_n, derive_geometry, in_cone, normalization_constant, ModelConfig, Multi, Vec3,
};
use crate::packet::{make_packet, packet_eval};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Phase `-xi.a_j + v0 u.(x + s xi) + |n| s` of the first-order integrand.
pub fn phase_value(
    cfg: &ModelConfig,
    j: usize,
    n: &Multi,
    xi: &Vec3,
    u: &Vec3,
    s: f64,
    x: &Vec3,
) -> f64 {
    let a = cfg.oscillators[j].position;
    -xi.dot(&a) + cfg.v0 * u.dot(&(x + xi * s)) + abs_n(n) as f64 * s
}

/// A point of the reduced phase: momentum in the rotated frame, cone chart `(mu, nu)`, time `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub xi: Vec3,
    pub munu: [f64; 2],
    pub s: f64,
}

/// Phase in the frame where `a_j` points along `e3`, with `u = (mu, nu, sqrt(1 - mu^2 - nu^2))`.
pub fn reduced_phase(cfg: &ModelConfig, j: usize, n: &Multi, p: &PhasePoint, x: &Vec3) -> f64 {
    let xr = derive_geometry(cfg).map(|g| g.rotations[j] * x).unwrap_or(*x);
    reduced_phase_rotated(cfg, j, n, p, &xr)
}

fn reduced_phase_rotated(cfg: &ModelConfig, j: usize, n: &Multi, p: &PhasePoint, xr: &Vec3) -> f64 {
    let a = cfg.oscillators[j].position.norm();
    let [mu, nu] = p.munu;
    let w = (1.0 - mu * mu - nu * nu).sqrt();
    let y = xr + p.xi * p.s;
    -a * p.xi.z + cfg.v0 * (mu * y.x + nu * y.y + w * y.z) + abs_n(n) as f64 * p.s
}

/// Unique stationary point of the reduced phase inside the cone chart.
pub fn critical_point(cfg: &ModelConfig, j: usize, n: &Multi, x: &Vec3) -> Result<PhasePoint> {
    let geom = derive_geometry(cfg)?;
    let tau = geom.tau[j];
    let xr = geom.rotations[j] * x;
    Ok(PhasePoint {
        xi: Vec3::new(-xr.x / tau, -xr.y / tau, -(abs_n(n) as f64) / cfg.v0),
        munu: [0.0, 0.0],
        s: tau,
    })
}

/// Central-difference gradient of the reduced phase in `(xi, mu, nu, s)`.
pub fn reduced_phase_gradient(
    cfg: &ModelConfig,
    j: usize,
    n: &Multi,
    p: &PhasePoint,
    x: &Vec3,
    h: f64,
) -> Result<[f64; 6]> {
    let geom = derive_geometry(cfg)?;
    let xr = geom.rotations[j] * x;
    let mut out = [0.0; 6];
    for (k, slot) in out.iter_mut().enumerate() {
        let shifted = |d: f64| {
            let mut q = *p;
            match k {
                0..=2 => q.xi[k] += d,
                3 => q.munu[0] += d,
                4 => q.munu[1] += d,
                _ => q.s += d,
            }
            reduced_phase_rotated(cfg, j, n, &q, &xr)
        };
        *slot = (shifted(h) - shifted(-h)) / (2.0 * h);
    }
    Ok(out)
}

/// The leading stationary-phase term next to `eps^2 P_{n,j}(eps x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingCheck {
    pub leading: C64,
    pub packet: C64,
}

impl LeadingCheck {
    pub fn rel_diff(&self) -> f64 {
        let scale = self.packet.norm().max(self.leading.norm());
        if scale == 0.0 { 0.0 } else { (self.leading - self.packet).norm() / scale }
    }
}

/// Evaluates the stationary-phase leading term from the amplitude at the
/// critical point and compares it with the packet built by `make_packet`.
pub fn leading_consistency(cfg: &ModelConfig, j: usize, n: &Multi, x: &Vec3) -> Result<LeadingCheck> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::numerical("non-finite evaluation point"));
    }
    let geom = derive_geometry(cfg)?;
    let (eps, v0, tau) = (cfg.epsilon, cfg.v0, geom.tau[j]);
    let rot = geom.rotations[j];
    let xr = rot * x;
    let c = critical_point(cfg, j, n, x)?;
    // F at the critical point; the cone-chart Jacobian is 1 there.
    let xi_lab = rot.transpose() * c.xi;
    let shifted = xr + c.xi * tau;
    let f = PI.powf(-0.75) * (-0.5 * shifted.norm_squared()).exp();
    let amp = C64::from_polar(1.0, c.xi.dot(&xr) + 0.5 * tau * c.xi.norm_squared())
        * coupling_g(n, &xi_lab, cfg.potential_width)
        * f;
    let phase = (cfg.v0 * xr.z + abs_n(n) as f64 * tau) / eps;
    let nrm = normalization_constant(eps, v0);
    let leading = -I * nrm * eps.sqrt() / (v0.powi(3) * tau * tau)
        * C64::from_polar(1.0, phase)
        * (2.0 * PI).powi(3)
        * amp;
    let p = make_packet(cfg, j, *n)?;
    let packet = packet_eval(&p, &(x * eps)) * eps * eps;
    Ok(LeadingCheck { leading, packet })
}

/// Smallest squared gradient of the second-order phases over the sampled sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBound {
    pub min_grad_sq: f64,
    /// `Delta^2 = (v0 tau_1 sin theta0)^2`.
    pub delta_sq: f64,
    /// Oscillator pair (zero-based) attaining the minimum.
    pub pair: (usize, usize),
    pub argmin: Vec3,
}

/// Minimises `v0^2 |sigma u - tau_l a_l|^2 + v0^2 |s u - tau_k a_k|^2` over
/// `s, sigma` in `[0, t]` and `u` on a Fibonacci sphere of `samples` points.
/// For `k = l` only directions outside the cone `C_k` count.
///
/// The minimisation in `s` and `sigma` is exact: the optimum is the clamped
/// projection of `tau a` on the ray.
pub fn second_order_phase_bound(cfg: &ModelConfig, t: f64, samples: usize) -> Result<PhaseBound> {
    let geom = derive_geometry(cfg)?;
    let v0 = cfg.v0;
    let golden = PI * (3.0 - 5f64.sqrt());
    // tau_k a_k / |a_k| = a_k / v0
    let targets: Vec<Vec3> = cfg.oscillators.iter().map(|o| o.position / v0).collect();
    let line_min = |u: &Vec3, a: &Vec3| {
        let s = u.dot(a).clamp(0.0, t);
        v0 * v0 * (u * s - a).norm_squared()
    };
    let nosc = targets.len();
    let mut best = PhaseBound {
        min_grad_sq: f64::INFINITY,
        delta_sq: geom.delta * geom.delta,
        pair: (0, 0),
        argmin: Vec3::z(),
    };
    for i in 0..samples {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / samples as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = golden * i as f64;
        let u = Vec3::new(r * phi.cos(), r * phi.sin(), z);
        let d: Vec<f64> = targets.iter().map(|b| line_min(&u, b)).collect();
        for k in 0..nosc {
            for l in 0..nosc {
                if k == l && in_cone(&u, k, &geom) {
                    continue;
                }
                let g = d[k] + d[l];
                if g < best.min_grad_sq {
                    best.min_grad_sq = g;
                    best.pair = (k, l);
                    best.argmin = u;
                }
            }
        }
    }
    Ok(best)
}
