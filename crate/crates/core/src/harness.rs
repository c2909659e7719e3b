//! Verification campaigns: identity suites, eps-scaling studies and the
//! non-stationary suppression study.

use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigRule, Error, Result};
use crate::kernels::{
    conjugated_shift, mehler_eigensum_complex, mehler_kernel_complex, pair_sum, zeta,
    zeta_by_quadrature, Grid1d,
};
use crate::model::{derive_geometry, multi_indices, validate_config, ModelConfig, Multi, Vec3};
use crate::oracle::{
    critical_point, first_order_coeffs, leading_consistency, reduced_phase_gradient,
    second_order_phase_bound, study_point, RatioPoint, Region, ResidualPoint, TubeGrid,
};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::numerical(format!("slope fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::numerical(format!("slope fit needs positive data, got ({x}, {y})")));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::numerical("slope fit needs at least two distinct x values"));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(SlopeFit { slope, intercept: my - slope * mx, r2 })
}

/// One named check of a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    /// An error measure that must not exceed `tolerance`.
    fn error(name: &str, measured: f64, tolerance: f64) -> Self {
        CheckRow {
            name: name.into(),
            measured,
            expected: 0.0,
            tolerance,
            pass: measured <= tolerance,
        }
    }

    /// `measured >= expected - tolerance`.
    fn at_least(name: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        CheckRow {
            name: name.into(),
            measured,
            expected,
            tolerance,
            pass: measured >= expected - tolerance,
        }
    }

    /// `measured <= expected + tolerance`.
    fn at_most(name: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        CheckRow {
            name: name.into(),
            measured,
            expected,
            tolerance,
            pass: measured <= expected + tolerance,
        }
    }

    /// A check that could not be evaluated.
    fn failed(name: &str, err: &Error) -> Self {
        log::warn!("{name}: {err}");
        CheckRow { name: name.into(), measured: f64::NAN, expected: 0.0, tolerance: 0.0, pass: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<CheckRow>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Sample sizes and truncations of the identity suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSpec {
    pub seed: u64,
    pub pair_n_max: usize,
    pub pair_samples: usize,
    pub mehler_n_max: usize,
    /// Imaginary part `eta` of the time `t - i eta` at which the eigen-sum is compared.
    pub mehler_damping: f64,
    pub zeta_samples: usize,
    pub shift_samples: usize,
    pub leading_samples: usize,
    pub bound_samples: usize,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            seed: 20,
            pair_n_max: 40,
            pair_samples: 20,
            mehler_n_max: 60,
            mehler_damping: 0.5,
            zeta_samples: 10,
            shift_samples: 50,
            leading_samples: 100,
            bound_samples: 20_000,
        }
    }
}

fn cube(rng: &mut ChaCha8Rng, half: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-half..half),
        rng.random_range(-half..half),
        rng.random_range(-half..half),
    )
}

/// Largest relative pair-sum truncation error over random momenta in `[-3, 3]^3`.
pub fn pair_sum_error(spec: &SuiteSpec, width: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.pair_samples)
        .map(|_| {
            let a = cube(&mut rng, 3.0);
            let b = cube(&mut rng, 3.0);
            pair_sum(&a, &b, spec.pair_n_max, width).rel_error()
        })
        .fold(0.0, f64::max)
}

/// Largest relative gap between the propagator and its eigen-sum on the
/// 9x9 grid of `[-2, 2]^2`, at times `t - i eta`.
pub fn mehler_error(times: &[f64], eta: f64, n_max: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in times {
        let tau = C64::new(t, -eta);
        for i in 0..9 {
            for k in 0..9 {
                let (x, y) = (-2.0 + 0.5 * i as f64, -2.0 + 0.5 * k as f64);
                let exact = mehler_kernel_complex(tau, x, y)?;
                let sum = mehler_eigensum_complex(tau, x, y, n_max);
                worst = worst.max((exact - sum).norm() / exact.norm());
            }
        }
    }
    Ok(worst)
}

/// Largest gap between closed-form `zeta` and the propagator double quadrature.
pub fn zeta_error(spec: &SuiteSpec) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed + 1);
    let samples: Vec<(f64, Vec3, Vec3)> = (0..spec.zeta_samples)
        .map(|_| (rng.random_range(0.3..2.8), cube(&mut rng, 1.5), cube(&mut rng, 1.5)))
        .collect();
    let errs = samples
        .par_iter()
        .map(|(t, a, b)| Ok((zeta(*t, a, b) - zeta_by_quadrature(*t, a, b)?).norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Largest `|zeta|` over random times in `[-10, 10]` and momenta in `[-4, 4]^3`.
pub fn zeta_sup(spec: &SuiteSpec, samples: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed + 2);
    (0..samples)
        .map(|_| {
            let t = rng.random_range(-10.0..10.0);
            zeta(t, &cube(&mut rng, 4.0), &cube(&mut rng, 4.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// Largest sup-norm gap between the two sides of the conjugated-shift identity.
pub fn shift_error(spec: &SuiteSpec) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed + 3);
    let grid = Grid1d { lo: -20.0, hi: 20.0, n: 1024 };
    let g = |x: f64| C64::new(1.0, 0.3 * x) * (-0.5 * x * x).exp();
    let mut worst: f64 = 0.0;
    for _ in 0..spec.shift_samples {
        let s = rng.random_range(0.0..2.0);
        let xi = rng.random_range(-2.0..2.0);
        let eps = rng.random_range(0.1..0.5);
        worst = worst.max(conjugated_shift(&g, &grid, s, xi, eps)?.sup_diff());
    }
    Ok(worst)
}

/// Largest relative gap between the stationary-phase leading term and the packet.
pub fn leading_error(cfg: &ModelConfig, spec: &SuiteSpec) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed + 4);
    let channels = multi_indices(cfg.n_max);
    let mut worst: f64 = 0.0;
    for _ in 0..spec.leading_samples {
        let j = rng.random_range(0..cfg.oscillators.len());
        let n = channels[rng.random_range(0..channels.len())];
        let x = cube(&mut rng, 3.0);
        worst = worst.max(leading_consistency(cfg, j, &n, &x)?.rel_diff());
    }
    Ok(worst)
}

/// Largest reduced-phase gradient at the critical point.
pub fn critical_gradient(cfg: &ModelConfig, spec: &SuiteSpec) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed + 5);
    let mut worst: f64 = 0.0;
    for j in 0..cfg.oscillators.len() {
        for n in multi_indices(cfg.n_max) {
            let x = cube(&mut rng, 3.0);
            let p = critical_point(cfg, j, &n, &x)?;
            let g = reduced_phase_gradient(cfg, j, &n, &p, &x, 1e-5)?;
            worst = worst.max(g.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
    }
    Ok(worst)
}

/// Relative change of cone coefficients when the chart is spun about the pole.
pub fn gauge_error(cfg: &ModelConfig) -> Result<f64> {
    let geom = derive_geometry(cfg)?;
    let channels: Vec<Multi> = multi_indices(cfg.n_max.min(1));
    let x = geom.rotations[0].transpose() * Vec3::new(0.6, -0.4, 1.0);
    let t = geom.tau[0] + 1.0;
    let a = first_order_coeffs(cfg, &geom, 0, &channels, t, &x, Region::Cone, 0.0)?;
    let b = first_order_coeffs(cfg, &geom, 0, &channels, t, &x, Region::Cone, 1.1)?;
    let scale = a.iter().map(|c| c.value.norm()).fold(0.0, f64::max);
    let diff = a.iter().zip(&b).map(|(p, q)| (p.value - q.value).norm()).fold(0.0, f64::max);
    Ok(diff / scale)
}

/// Runs every identity check; failures are recorded, not returned.
pub fn run_identity_suite(cfg: &ModelConfig, spec: &SuiteSpec) -> Result<SuiteReport> {
    validate_config(cfg)?;
    let tol = cfg.quad.target_tol;
    let row = |name: &str, r: Result<f64>, tolerance: f64| match r {
        Ok(v) => CheckRow::error(name, v, tolerance),
        Err(e) => CheckRow::failed(name, &e),
    };
    let mut rows = vec![
        row("pair_sum", Ok(pair_sum_error(spec, cfg.potential_width)), 1e-6),
        row(
            "mehler_eigensum",
            mehler_error(&[0.4, 0.7, 1.3], spec.mehler_damping, spec.mehler_n_max),
            1e-6,
        ),
        row("zeta_quadrature", zeta_error(spec), 1e-6),
        CheckRow::at_most("zeta_bound", zeta_sup(spec, 10_000), 1.0, 1e-12),
        row("conjugated_shift", shift_error(spec), 1e-6),
        row("leading_consistency", leading_error(cfg, spec), 1e-10),
        row("critical_gradient", critical_gradient(cfg, spec), 1e-7),
        row("gauge_invariance", gauge_error(cfg), tol.min(1e-9)),
    ];
    rows.push(match second_order_phase_bound(cfg, cfg.t_final, spec.bound_samples) {
        Ok(b) => CheckRow::at_least("second_order_bound", b.min_grad_sq, b.delta_sq, 1e-6),
        Err(e) => CheckRow::failed("second_order_bound", &e),
    });
    for r in &rows {
        log::info!("{}: measured {:.3e} pass {}", r.name, r.measured, r.pass);
    }
    Ok(SuiteReport { rows })
}

/// What a scaling or suppression study samples at each `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySpec {
    /// Zero-based oscillator index.
    pub oscillator: usize,
    pub t: f64,
    pub grid: TubeGrid,
    pub channels: Vec<Multi>,
}

impl StudySpec {
    /// First oscillator, `t = t_final`, default grid, every channel up to `n_max`.
    pub fn for_config(cfg: &ModelConfig) -> Self {
        StudySpec {
            oscillator: 0,
            t: cfg.t_final,
            grid: TubeGrid::default(),
            channels: multi_indices(cfg.n_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    /// Strictly decreasing.
    pub eps_list: Vec<f64>,
    pub points: Vec<ResidualPoint>,
    /// Slope of the residual proxy in `eps`.
    pub fit_abs: SlopeFit,
    /// Slope of residual over reference.
    pub fit_rel: SlopeFit,
    /// Slope of the reference `eps^2 P` proxy.
    pub fit_ref: SlopeFit,
}

impl ScalingStudy {
    pub fn converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonstationaryStudy {
    pub eps_list: Vec<f64>,
    pub points: Vec<RatioPoint>,
    pub fit: SlopeFit,
}

impl NonstationaryStudy {
    pub fn converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }
}

/// Sorts decreasing and checks the desk-scale range.
fn normalize_eps(eps_list: &[f64]) -> Result<Vec<f64>> {
    let mut v = eps_list.to_vec();
    if let Some(e) = v.iter().find(|e| !(**e >= 0.1 && **e < 1.0)) {
        return Err(Error::config(ConfigRule::EpsilonRange, format!("study eps {e} outside [0.1, 1)")));
    }
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    if v.len() < 3 {
        return Err(Error::config(ConfigRule::Field, "a study needs at least 3 distinct eps values"));
    }
    Ok(v)
}

fn check_spec(cfg: &ModelConfig, spec: &StudySpec) -> Result<()> {
    validate_config(cfg)?;
    spec.grid.validate()?;
    if spec.oscillator >= cfg.oscillators.len() {
        return Err(Error::config(
            ConfigRule::Field,
            format!("study oscillator {} does not exist", spec.oscillator + 1),
        ));
    }
    if spec.channels.is_empty() {
        return Err(Error::config(ConfigRule::Field, "study needs at least one channel"));
    }
    let tau = derive_geometry(cfg)?.tau[spec.oscillator];
    if !(spec.t > tau) {
        return Err(Error::config(
            ConfigRule::FinalTime,
            format!("study time {} does not exceed the flight time {tau}", spec.t),
        ));
    }
    Ok(())
}

fn scaling_from(eps_list: Vec<f64>, points: Vec<ResidualPoint>) -> Result<ScalingStudy> {
    let pts = |f: &dyn Fn(&ResidualPoint) -> f64| -> Vec<(f64, f64)> {
        points.iter().map(|p| (p.eps, f(p))).collect()
    };
    Ok(ScalingStudy {
        fit_abs: fit_slope(&pts(&|p| p.residual))?,
        fit_rel: fit_slope(&pts(&|p| p.residual / p.reference))?,
        fit_ref: fit_slope(&pts(&|p| p.reference))?,
        eps_list,
        points,
    })
}

fn nonstationary_from(eps_list: Vec<f64>, points: Vec<RatioPoint>) -> Result<NonstationaryStudy> {
    let data: Vec<(f64, f64)> = points.iter().map(|p| (p.eps, p.ratio())).collect();
    Ok(NonstationaryStudy { fit: fit_slope(&data)?, eps_list, points })
}

fn run_points(
    cfg: &ModelConfig,
    spec: &StudySpec,
    eps_list: &[f64],
    with_complement: bool,
) -> Result<(Vec<f64>, Vec<crate::oracle::StudyPoint>)> {
    check_spec(cfg, spec)?;
    let eps = normalize_eps(eps_list)?;
    let points = eps
        .par_iter()
        .map(|&e| {
            let c = cfg.with_epsilon(e);
            validate_config(&c)?;
            let p = study_point(&c, spec.oscillator, spec.t, &spec.grid, &spec.channels, with_complement)?;
            log::info!("eps {e}: residual {:.3e} reference {:.3e}", p.residual.residual, p.residual.reference);
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((eps, points))
}

/// Residual proxy of the first-order expansion at each `eps`, and its fitted exponents.
pub fn run_scaling_study(cfg: &ModelConfig, spec: &StudySpec, eps_list: &[f64]) -> Result<ScalingStudy> {
    let (eps, points) = run_points(cfg, spec, eps_list, false)?;
    scaling_from(eps, points.into_iter().map(|p| p.residual).collect())
}

/// Ratio of off-cone to on-cone first-order terms at each `eps`, and its fitted exponent.
pub fn run_nonstationary_study(
    cfg: &ModelConfig,
    spec: &StudySpec,
    eps_list: &[f64],
) -> Result<NonstationaryStudy> {
    let (eps, points) = run_points(cfg, spec, eps_list, true)?;
    nonstationary_from(eps, points.into_iter().filter_map(|p| p.ratio).collect())
}

/// Both studies from one pass; the cone coefficients are computed once per `eps`.
pub fn run_combined_study(
    cfg: &ModelConfig,
    spec: &StudySpec,
    eps_list: &[f64],
) -> Result<(ScalingStudy, NonstationaryStudy)> {
    let (eps, points) = run_points(cfg, spec, eps_list, true)?;
    let (res, ratio): (Vec<_>, Vec<_>) = points.into_iter().map(|p| (p.residual, p.ratio)).unzip();
    let ratio = ratio.into_iter().flatten().collect();
    Ok((scaling_from(eps.clone(), res)?, nonstationary_from(eps, ratio)?))
}

/// The desk-scale eps list used by the default studies.
pub const DEFAULT_EPS: [f64; 5] = [0.4, 0.3, 0.2, 0.15, 0.1];
