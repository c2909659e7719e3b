//! The outgoing wave packets `P_{n,j}` that the first-order Duhamel term
//! reduces to, plus their norms, moments, transforms and free evolution.
//!
//! A packet leaves oscillator `j` in state `n` along `a_j / |a_j|` with speed
//! `V = v0 - eps |n| / v0`, and its longitudinal centre sits at
//! `Z = eps |n| tau_j / v0`:
//!
//! `P(R) = C eps^{-3/2} A((R - (a.R) a) / eps) exp(-(a.R - Z)^2 / (2 eps^2) + i V a.R / eps^2)`

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kernels::{coupling_g, pair_coefficient, potential_prefactor};
use crate::model::{
    abs_n, derive_geometry, multi_indices, normalization_constant, validate_config, ModelConfig,
    Multi, Vec3,
};
use crate::quad;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct PacketDesc {
    pub j: usize,
    pub n: Multi,
    pub eps: f64,
    pub v0: f64,
    pub width: f64,
    pub tau: f64,
    /// Unit direction of travel.
    pub dir: Vec3,
    /// Rotation taking `dir` to `e3`; its first two rows span the transverse plane.
    pub rot: Matrix3<f64>,
    /// Amplitude `C`.
    pub amplitude: C64,
    /// Longitudinal centre `Z`.
    pub z_shift: f64,
    /// Group speed `V`.
    pub momentum: f64,
}

impl PacketDesc {
    /// Transverse unit vectors.
    pub fn transverse_axes(&self) -> [Vec3; 2] {
        [
            self.rot.row(0).transpose().into_owned(),
            self.rot.row(1).transpose().into_owned(),
        ]
    }

    fn abs_n(&self) -> f64 {
        abs_n(&self.n) as f64
    }
}

/// Builds `P_{n,j}` for oscillator `j` (zero-based) and excitation `n`.
pub fn make_packet(cfg: &ModelConfig, j: usize, n: Multi) -> Result<PacketDesc> {
    let geom = derive_geometry(cfg)?;
    if j >= geom.tau.len() {
        return Err(Error::config(
            crate::ConfigRule::Field,
            format!("oscillator index {j} out of range"),
        ));
    }
    let (eps, v0, tau) = (cfg.epsilon, cfg.v0, geom.tau[j]);
    let m = abs_n(&n) as f64;
    let n_eps = normalization_constant(eps, v0);
    let phase = m * tau / eps + m * m * tau / (2.0 * v0 * v0);
    let amplitude = -I * 8.0 * PI.powf(2.25) * n_eps / (v0.powi(3) * tau * tau)
        * C64::from_polar(1.0, phase);
    Ok(PacketDesc {
        j,
        n,
        eps,
        v0,
        width: cfg.potential_width,
        tau,
        dir: geom.directions[j],
        rot: geom.rotations[j],
        amplitude,
        z_shift: eps * m * tau / v0,
        momentum: v0 - eps * m / v0,
    })
}

/// `A(y) = exp(-i |y|^2 / (2 tau)) g_{n,0}(-y / tau - (|n| / v0) a)` for `y` transverse to `a`.
///
/// Fails when `y` has a component along `a` above `1e-10 (1 + |y|)`.
pub fn transverse_profile(desc: &PacketDesc, y: &Vec3) -> Result<C64> {
    let along = desc.dir.dot(y);
    if along.abs() > 1e-10 * (1.0 + y.norm()) {
        return Err(Error::Numerical(format!("transverse point has axial component {along:e}")));
    }
    Ok(profile(desc, y))
}

fn profile(desc: &PacketDesc, y: &Vec3) -> C64 {
    let xi = -y / desc.tau - desc.dir * (desc.abs_n() / desc.v0);
    C64::from_polar(1.0, -y.norm_squared() / (2.0 * desc.tau)) * coupling_g(&desc.n, &xi, desc.width)
}

pub fn packet_eval(desc: &PacketDesc, r: &Vec3) -> C64 {
    let eps = desc.eps;
    let par = desc.dir.dot(r);
    let y = (r - desc.dir * par) / eps;
    let d = par - desc.z_shift;
    let env = C64::new(-d * d / (2.0 * eps * eps), desc.momentum * par / (eps * eps)).exp();
    desc.amplitude * eps.powf(-1.5) * profile(desc, &y) * env
}

/// Gradient of the coupling amplitude with respect to its argument.
fn coupling_grad(n: &Multi, xi: &Vec3, width: f64) -> [C64; 3] {
    let b = 0.5 * width * width + 0.25;
    let gauss = potential_prefactor(width) * (-b * xi.norm_squared()).exp();
    let mono = |k: usize, p: usize| pair_coefficient(n[k]) * xi[k].powi(p as i32);
    let mut out = [C64::new(0.0, 0.0); 3];
    for k in 0..3 {
        let others: C64 = (0..3).filter(|&l| l != k).map(|l| mono(l, n[l])).product();
        let mut d = mono(k, n[k]) * (-2.0 * b * xi[k]);
        if n[k] > 0 {
            d += mono(k, n[k] - 1) * n[k] as f64;
        }
        out[k] = gauss * others * d;
    }
    out
}

/// Scale `lambda` with `|A(lambda u)|^2 ~ exp(-|u|^2)` up to a polynomial.
fn plane_scale(desc: &PacketDesc) -> f64 {
    desc.tau / (desc.width * desc.width + 0.5).sqrt()
}

/// Gauss-Hermite integral over the transverse plane of `f(y) |A|^2`-type integrands.
///
/// The callback receives the transverse point and must return the integrand
/// already divided by nothing; the weight `exp(-|u|^2)` is undone here.
fn plane_sum<T, F>(desc: &PacketDesc, order: usize, mut f: F) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    F: FnMut(&Vec3) -> T,
{
    let [e1, e2] = desc.transverse_axes();
    let lam = plane_scale(desc);
    let rule = quad::hermite(order);
    let mut acc = T::default();
    for &(u1, w1) in &rule {
        for &(u2, w2) in &rule {
            let y = (e1 * u1 + e2 * u2) * lam;
            let w = w1 * w2 * (u1 * u1 + u2 * u2).exp() * lam * lam;
            acc = acc + f(&y) * w;
        }
    }
    acc
}

const PLANE_ORDER: usize = 32;

/// `int |A(y)|^2 dy` over the transverse plane.
pub fn profile_mass(desc: &PacketDesc) -> f64 {
    plane_sum(desc, PLANE_ORDER, |y| profile(desc, y).norm_sqr())
}

/// `||P||^2 = sqrt(pi) |C|^2 int |A|^2`.
pub fn packet_norm_sq(desc: &PacketDesc) -> f64 {
    PI.sqrt() * desc.amplitude.norm_sqr() * profile_mass(desc)
}

/// Channel weight `eps^4 ||P||^2`.
pub fn channel_weight(desc: &PacketDesc) -> f64 {
    desc.eps.powi(4) * packet_norm_sq(desc)
}

/// Unitary two-dimensional transform of `A` in transverse coordinates `k`.
pub fn transverse_ft(desc: &PacketDesc, k: [f64; 2]) -> C64 {
    let [e1, e2] = desc.transverse_axes();
    let lam = plane_scale(desc);
    let nodes = quad::composite(-7.0, 7.0, 0.5, &quad::legendre(12));
    let mut acc = C64::new(0.0, 0.0);
    for &(u1, w1) in &nodes {
        for &(u2, w2) in &nodes {
            let (y1, y2) = (lam * u1, lam * u2);
            let y = e1 * y1 + e2 * y2;
            acc += profile(desc, &y)
                * C64::from_polar(w1 * w2, -(k[0] * y1 + k[1] * y2));
        }
    }
    acc * (lam * lam / (2.0 * PI))
}

/// Unitary transform `(2 pi)^{-3/2} int exp(-i K.R) P(R) dR`.
pub fn packet_ft(desc: &PacketDesc, kvec: &Vec3) -> C64 {
    let eps = desc.eps;
    let [e1, e2] = desc.transverse_axes();
    let kpar = desc.dir.dot(kvec);
    let k = [eps * e1.dot(kvec), eps * e2.dot(kvec)];
    let d = kpar - desc.momentum / (eps * eps);
    let z = desc.z_shift;
    let env = C64::new(
        -eps * eps * d * d / 2.0,
        -z * kpar + z * desc.momentum / (eps * eps),
    )
    .exp();
    eps.powf(1.5) * desc.amplitude * transverse_ft(desc, k) * env
}

/// Position and momentum statistics of `|P|^2` and `|P~|^2`.
///
/// Axis order is (first transverse, second transverse, longitudinal); the
/// axes themselves are in `frame`. Momentum is `eps^2 K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub frame: [Vec3; 3],
    pub pos_mean: [f64; 3],
    pub pos_std: [f64; 3],
    pub mom_mean: [f64; 3],
    pub mom_std: [f64; 3],
}

#[derive(Default, Clone, Copy)]
struct Acc([f64; 9]);

impl std::ops::Add for Acc {
    type Output = Acc;
    fn add(mut self, o: Acc) -> Acc {
        for i in 0..9 {
            self.0[i] += o.0[i];
        }
        self
    }
}

impl std::ops::Mul<f64> for Acc {
    type Output = Acc;
    fn mul(mut self, w: f64) -> Acc {
        for v in &mut self.0 {
            *v *= w;
        }
        self
    }
}

pub fn packet_moments(desc: &PacketDesc) -> MomentReport {
    let eps = desc.eps;
    let [e1, e2] = desc.transverse_axes();
    let tau = desc.tau;
    let c = desc.dir * (-desc.abs_n() / desc.v0);

    // mass, <y_a>, <y_a^2>, <k_a>, <k_a^2>
    let acc: Acc = plane_sum(desc, PLANE_ORDER, |y| {
        let xi = -y / tau + c;
        let chirp = C64::from_polar(1.0, -y.norm_squared() / (2.0 * tau));
        let g = coupling_g(&desc.n, &xi, desc.width);
        let a = chirp * g;
        let grad = coupling_grad(&desc.n, &xi, desc.width);
        let mut out = [0.0; 9];
        let m = a.norm_sqr();
        out[0] = m;
        for (ax, e) in [e1, e2].iter().enumerate() {
            let ya = y.dot(e);
            let dg: C64 = (0..3).map(|l| grad[l] * e[l]).sum::<C64>() * (-1.0 / tau);
            let da = chirp * (-I * ya / tau * g + dg);
            out[1 + ax] = ya * m;
            out[3 + ax] = ya * ya * m;
            out[5 + ax] = (a.conj() * (-I) * da).re;
            out[7 + ax] = da.norm_sqr();
        }
        Acc(out)
    });
    let m = acc.0[0];
    let mut pos_mean = [0.0; 3];
    let mut pos_std = [0.0; 3];
    let mut mom_mean = [0.0; 3];
    let mut mom_std = [0.0; 3];
    for ax in 0..2 {
        let my = acc.0[1 + ax] / m;
        let vy = acc.0[3 + ax] / m - my * my;
        let mk = acc.0[5 + ax] / m;
        let vk = acc.0[7 + ax] / m - mk * mk;
        pos_mean[ax] = eps * my;
        pos_std[ax] = eps * vy.max(0.0).sqrt();
        mom_mean[ax] = eps * mk;
        mom_std[ax] = eps * vk.max(0.0).sqrt();
    }

    // Longitudinal factor exp(-(r - Z)^2 / (2 eps^2) + i V r / eps^2), r = Z + eps u.
    let (mut s0, mut s1, mut s2, mut p1, mut p2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(u, w) in &quad::hermite(16) {
        let r = desc.z_shift + eps * u;
        // -i eps^2 d/dr acting on the longitudinal factor gives V + i (r - Z).
        let dp = C64::new(desc.momentum, r - desc.z_shift);
        s0 += w;
        s1 += w * r;
        s2 += w * r * r;
        p1 += w * dp.re;
        p2 += w * dp.norm_sqr();
    }
    pos_mean[2] = s1 / s0;
    pos_std[2] = (s2 / s0 - pos_mean[2].powi(2)).max(0.0).sqrt();
    mom_mean[2] = p1 / s0;
    mom_std[2] = (p2 / s0 - mom_mean[2].powi(2)).max(0.0).sqrt();

    MomentReport { frame: [e1, e2, desc.dir], pos_mean, pos_std, mom_mean, mom_std }
}

/// `exp(-i t h0 / eps^2) P` with `h0 = -eps^4 Laplacian / 2`.
///
/// The longitudinal factor evolves in closed form; the transverse profile is
/// propagated on a periodic spectral grid.
#[derive(Debug, Clone)]
pub struct EvolvedPacket {
    desc: PacketDesc,
    t: f64,
    lo: f64,
    len: f64,
    n: usize,
    /// Evolved transverse spectrum in FFT order, already divided by `n^2`.
    spectrum: Vec<C64>,
}

fn fft_wavenumber(m: usize, n: usize, len: f64) -> f64 {
    let m = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
    2.0 * PI * m / len
}

fn fft2(data: &mut [C64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for row in data.chunks_mut(n) {
        plan.process(row);
    }
    let mut col = vec![C64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = data[r * n + c];
        }
        plan.process(&mut col);
        for r in 0..n {
            data[r * n + c] = col[r];
        }
    }
}

impl EvolvedPacket {
    pub fn new(desc: &PacketDesc, t: f64) -> Result<Self> {
        let mom = packet_moments(desc);
        let eps = desc.eps;
        let (mut half, mut kmax) = (0.0f64, 0.0f64);
        for ax in 0..2 {
            let (my, sy) = (mom.pos_mean[ax] / eps, mom.pos_std[ax] / eps);
            let (mk, sk) = (mom.mom_mean[ax] / eps, mom.mom_std[ax] / eps);
            half = half.max(my.abs() + 10.0 * sy + t.abs() * (mk.abs() + 10.0 * sk));
            kmax = kmax.max(mk.abs() + 12.0 * sk);
        }
        let len = 2.0 * half;
        let mut n = 64;
        while len / (n as f64) > PI / kmax {
            n *= 2;
        }
        let lo = -half;
        let h = len / n as f64;
        let [e1, e2] = desc.transverse_axes();
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                let y = e1 * (lo + h * r as f64) + e2 * (lo + h * c as f64);
                data[r * n + c] = profile(desc, &y);
            }
        }
        let mass0: f64 = data.iter().map(|z| z.norm_sqr()).sum();
        fft2(&mut data, n, false);
        let scale = 1.0 / (n * n) as f64;
        for r in 0..n {
            let k1 = fft_wavenumber(r, n, len);
            for c in 0..n {
                let k2 = fft_wavenumber(c, n, len);
                data[r * n + c] *= C64::from_polar(scale, -0.5 * t * (k1 * k1 + k2 * k2));
            }
        }
        let spectrum = data.clone();
        fft2(&mut data, n, true);
        let band = (n / 20).max(1);
        let mut edge = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r < band || c < band || r >= n - band || c >= n - band {
                    edge += data[r * n + c].norm_sqr();
                }
            }
        }
        if edge > 1e-10 * mass0 {
            return Err(Error::numerical(format!(
                "transverse profile escaped the spectral grid (edge mass fraction {:.2e})",
                edge / mass0
            )));
        }
        Ok(EvolvedPacket { desc: desc.clone(), t, lo, len, n, spectrum })
    }

    /// Evolved transverse profile at transverse plane coordinates.
    pub fn profile(&self, y: [f64; 2]) -> C64 {
        let n = self.n;
        let d1 = y[0] - self.lo;
        let d2 = y[1] - self.lo;
        let ph2: Vec<C64> = (0..n)
            .map(|c| C64::from_polar(1.0, fft_wavenumber(c, n, self.len) * d2))
            .collect();
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..n {
            let row: C64 = (0..n).map(|c| self.spectrum[r * n + c] * ph2[c]).sum();
            acc += row * C64::from_polar(1.0, fft_wavenumber(r, n, self.len) * d1);
        }
        acc
    }

    /// Squared norm of the evolved packet, from the grid.
    pub fn norm_sq(&self) -> f64 {
        let h = self.len / self.n as f64;
        let grid_mass: f64 = self.spectrum.iter().map(|z| z.norm_sqr()).sum::<f64>()
            * (self.n * self.n) as f64
            * h
            * h;
        PI.sqrt() * self.desc.amplitude.norm_sqr() * grid_mass
    }

    pub fn eval(&self, r: &Vec3) -> C64 {
        let d = &self.desc;
        let eps = d.eps;
        let [e1, e2] = d.transverse_axes();
        let par = d.dir.dot(r);
        let y = [e1.dot(r) / eps, e2.dot(r) / eps];
        let w = C64::new(1.0, self.t);
        let shift = par - d.z_shift - d.momentum * self.t;
        let long = (-shift * shift / (2.0 * eps * eps) / w
            + I * (d.momentum * par - 0.5 * d.momentum * d.momentum * self.t) / (eps * eps))
            .exp()
            / w.sqrt();
        d.amplitude * eps.powf(-1.5) * self.profile(y) * long
    }
}

/// One-shot evaluation of the freely evolved packet at `r`.
pub fn packet_evolve(desc: &PacketDesc, t: f64, r: &Vec3) -> Result<C64> {
    Ok(EvolvedPacket::new(desc, t)?.eval(r))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackRow {
    /// Zero-based oscillator index.
    pub j: usize,
    pub n: Multi,
    pub dir: Vec3,
    pub momentum: f64,
    pub z_shift: f64,
    pub weight: f64,
}

/// Every channel with `|n| <= n_max`, heaviest first.
pub fn track_report(cfg: &ModelConfig) -> Result<Vec<TrackRow>> {
    validate_config(cfg)?;
    let mut rows = Vec::new();
    for j in 0..cfg.oscillators.len() {
        for n in multi_indices(cfg.n_max) {
            let p = make_packet(cfg, j, n)?;
            rows.push(TrackRow {
                j,
                n,
                dir: p.dir,
                momentum: p.momentum,
                z_shift: p.z_shift,
                weight: channel_weight(&p),
            });
        }
    }
    rows.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then(a.j.cmp(&b.j))
            .then(a.n.cmp(&b.n))
    });
    Ok(rows)
}
