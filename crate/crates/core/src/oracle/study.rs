use std::f64::consts::PI;

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigRule, Error, Result};
use crate::model::{derive_geometry, Geometry, ModelConfig, Multi, Vec3};
use crate::oracle::coeff::{first_order_coeffs, CoeffResult, Region};
use crate::packet::{channel_weight, make_packet, packet_eval};

/// Cylindrical sample grid around a track, in rescaled units `x = R / eps`.
///
/// Midpoint rule in radius, azimuth and along the axis; `z` runs along `a_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TubeGrid {
    pub radius: f64,
    pub n_radial: usize,
    pub n_azimuth: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub n_long: usize,
}

impl Default for TubeGrid {
    fn default() -> Self {
        TubeGrid { radius: 6.0, n_radial: 4, n_azimuth: 5, z_min: -4.0, z_max: 8.0, n_long: 10 }
    }
}

impl TubeGrid {
    pub fn validate(&self) -> Result<()> {
        let ok = self.radius > 0.0
            && self.z_max > self.z_min
            && self.n_radial > 0
            && self.n_azimuth > 0
            && self.n_long > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::config(ConfigRule::Field, "x_grid needs positive sizes and z_max > z_min"))
        }
    }

    pub fn len(&self) -> usize {
        self.n_radial * self.n_azimuth * self.n_long
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lab-frame points and cell volumes for a track whose rotation is `rot`.
    pub fn points(&self, rot: &Matrix3<f64>) -> Vec<(Vec3, f64)> {
        let rot_t = rot.transpose();
        let dr = self.radius / self.n_radial as f64;
        let dphi = 2.0 * PI / self.n_azimuth as f64;
        let dz = (self.z_max - self.z_min) / self.n_long as f64;
        let mut out = Vec::with_capacity(self.len());
        for iz in 0..self.n_long {
            let z = self.z_min + dz * (iz as f64 + 0.5);
            for ir in 0..self.n_radial {
                let r = dr * (ir as f64 + 0.5);
                for ip in 0..self.n_azimuth {
                    let phi = dphi * (ip as f64 + 0.5);
                    let local = Vec3::new(r * phi.cos(), r * phi.sin(), z);
                    out.push((rot_t * local, r * dr * dphi * dz));
                }
            }
        }
        out
    }
}

/// Coefficients over a grid, one inner vector per point, in grid order.
fn coeff_field(
    cfg: &ModelConfig,
    geom: &Geometry,
    j: usize,
    channels: &[Multi],
    t: f64,
    pts: &[(Vec3, f64)],
    region: Region,
) -> Result<Vec<Vec<CoeffResult>>> {
    pts.par_iter()
        .map(|(x, _)| first_order_coeffs(cfg, geom, j, channels, t, x, region, 0.0))
        .collect()
}

/// Discrete `L^2` proxy of the remainder `I - eps^2 P` at one `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPoint {
    pub eps: f64,
    /// `(eps^3 sum_x w_x sum_n |I - eps^2 P(eps x)|^2)^{1/2}`.
    pub residual: f64,
    /// Same proxy of `eps^2 P` alone.
    pub reference: f64,
    /// Share of the exact packet mass the grid proxy recovers.
    pub coverage: f64,
    /// Grid proxy of the quadrature error estimates, relative to the reference proxy.
    pub quad_error: f64,
    /// Whether `quad_error <= target_tol`.
    pub converged: bool,
}

/// Grid proxies of the off-cone and on-cone first-order terms at one `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioPoint {
    pub eps: f64,
    pub complement: f64,
    pub cone: f64,
    /// Grid proxy of the quadrature error of both terms, relative to the cone proxy.
    pub quad_error: f64,
    pub converged: bool,
}

impl RatioPoint {
    pub fn ratio(&self) -> f64 {
        self.complement / self.cone
    }
}

/// Everything one `eps` of a study produces.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyPoint {
    pub residual: ResidualPoint,
    /// Present when the complement term was requested.
    pub ratio: Option<RatioPoint>,
}

/// `(eps^3 sum_x w_x sum_n |I|^2)^{1/2}` and the same proxy of the error estimates.
fn proxy(eps: f64, pts: &[(Vec3, f64)], field: &[Vec<CoeffResult>]) -> (f64, f64) {
    let (mut sum, mut err) = (0.0, 0.0);
    for ((_, w), coeffs) in pts.iter().zip(field) {
        for c in coeffs {
            sum += w * c.value.norm_sqr();
            err += w * c.est_error * c.est_error;
        }
    }
    let e3 = eps.powi(3);
    ((e3 * sum).sqrt(), (e3 * err).sqrt())
}

/// Cone coefficients on the tube grid against `eps^2 P`, and optionally the
/// complement coefficients on the same grid. The cone field is shared.
pub fn study_point(
    cfg: &ModelConfig,
    j: usize,
    t: f64,
    grid: &TubeGrid,
    channels: &[Multi],
    with_complement: bool,
) -> Result<StudyPoint> {
    let geom = derive_geometry(cfg)?;
    grid.validate()?;
    if j >= geom.tau.len() {
        return Err(Error::config(ConfigRule::Field, format!("oscillator {} does not exist", j + 1)));
    }
    let eps = cfg.epsilon;
    let tol = cfg.quad.target_tol;
    let pts = grid.points(&geom.rotations[j]);
    let cone = coeff_field(cfg, &geom, j, channels, t, &pts, Region::Cone)?;
    let packets: Vec<_> = channels
        .iter()
        .map(|n| make_packet(cfg, j, *n))
        .collect::<Result<_>>()?;
    let (mut res, mut refr) = (0.0, 0.0);
    for ((x, w), coeffs) in pts.iter().zip(&cone) {
        for (c, p) in coeffs.iter().zip(&packets) {
            let lead = packet_eval(p, &(x * eps)) * eps * eps;
            res += w * (c.value - lead).norm_sqr();
            refr += w * lead.norm_sqr();
        }
    }
    let e3 = eps.powi(3);
    let exact: f64 = packets.iter().map(channel_weight).sum();
    let (cone_norm, cone_err) = proxy(eps, &pts, &cone);
    let reference = (e3 * refr).sqrt();
    let quad_error = cone_err / reference;
    let residual = ResidualPoint {
        eps,
        residual: (e3 * res).sqrt(),
        reference,
        coverage: e3 * refr / exact,
        quad_error,
        converged: quad_error <= tol,
    };
    let ratio = if with_complement {
        let field = coeff_field(cfg, &geom, j, channels, t, &pts, Region::Complement)?;
        let (complement, comp_err) = proxy(eps, &pts, &field);
        let quad_error = comp_err.hypot(cone_err) / cone_norm;
        Some(RatioPoint { eps, complement, cone: cone_norm, quad_error, converged: quad_error <= tol })
    } else {
        None
    };
    Ok(StudyPoint { residual, ratio })
}

pub fn residual_norm(
    cfg: &ModelConfig,
    j: usize,
    t: f64,
    grid: &TubeGrid,
    channels: &[Multi],
) -> Result<ResidualPoint> {
    Ok(study_point(cfg, j, t, grid, channels, false)?.residual)
}

pub fn nonstationary_ratio(
    cfg: &ModelConfig,
    j: usize,
    t: f64,
    grid: &TubeGrid,
    channels: &[Multi],
) -> Result<RatioPoint> {
    let p = study_point(cfg, j, t, grid, channels, true)?;
    Ok(p.ratio.expect("complement requested"))
}
