//! Model parameters, admissibility checks and derived geometry.
//!
//! Units are the scaled ones: hbar = eps^2, particle mass 1, oscillator mass
//! and width eps, frequency 1/eps, coupling eps^2. Oscillator `j` sits at
//! `a_j`; the particle starts at the origin in an isotropic outgoing state of
//! speed `v0`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::error::{ConfigRule, Error, Result};
use crate::quad::QuadSpec;

pub type Vec3 = Vector3<f64>;

/// Excitation multi-index of one oscillator, one entry per Cartesian axis.
pub type Multi = [usize; 3];

/// Total excitation `|n| = n1 + n2 + n3`.
pub fn abs_n(n: &Multi) -> usize {
    n.iter().sum()
}

/// All multi-indices with `|n| <= n_max`, in lexicographic order.
pub fn multi_indices(n_max: usize) -> Vec<Multi> {
    let mut out = Vec::new();
    for n1 in 0..=n_max {
        for n2 in 0..=n_max - n1 {
            for n3 in 0..=n_max - n1 - n2 {
                out.push([n1, n2, n3]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub epsilon: f64,
    pub v0: f64,
    pub oscillators: Vec<Oscillator>,
    /// Width `w` of the Gaussian coupling `V(y) = exp(-|y|^2 / (2 w^2))`.
    pub potential_width: f64,
    pub t_final: f64,
    pub n_max: usize,
    pub quad: QuadSpec,
}

impl ModelConfig {
    pub fn new(epsilon: f64, v0: f64, positions: &[[f64; 3]], t_final: f64) -> Self {
        ModelConfig {
            epsilon,
            v0,
            oscillators: positions
                .iter()
                .map(|p| Oscillator { position: Vec3::from(*p) })
                .collect(),
            potential_width: 1.0,
            t_final,
            n_max: 2,
            quad: QuadSpec::default(),
        }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        ModelConfig { epsilon, ..self.clone() }
    }
}

/// Quantities derived once from a validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    /// Arrival times `|a_j| / v0`.
    pub tau: Vec<f64>,
    /// Unit directions `a_j / |a_j|`.
    pub directions: Vec<Vec3>,
    /// Minimal rotations with `R_j a_j / |a_j| = e3`.
    pub rotations: Vec<Matrix3<f64>>,
    /// Oscillator period `2 pi eps`.
    pub t_osc: f64,
    /// Time to cross one oscillator width, `eps / v0`.
    pub t_transit: f64,
    /// `t_transit / t_osc = 1 / (2 pi v0)`.
    pub ratio: f64,
    /// Half the smallest pairwise opening angle, capped at `pi / 2`.
    pub theta0: f64,
    /// Lower bound `v0 tau_1 sin(theta0)` on phase gradients off the cones.
    pub delta: f64,
}

fn check(ok: bool, rule: ConfigRule, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(rule, detail()))
    }
}

/// Checks every admissibility rule; the first violation is returned.
pub fn validate_config(cfg: &ModelConfig) -> Result<()> {
    let eps = cfg.epsilon;
    check(eps > 0.0 && eps < 1.0, ConfigRule::EpsilonRange, || {
        format!("epsilon = {eps} is outside (0, 1)")
    })?;
    check(cfg.v0 > 0.0 && cfg.v0.is_finite(), ConfigRule::SpeedPositive, || {
        format!("v0 = {} must be positive", cfg.v0)
    })?;
    check(!cfg.oscillators.is_empty(), ConfigRule::NoOscillators, || {
        "no oscillators given".into()
    })?;
    check(
        cfg.potential_width > 0.0 && cfg.potential_width.is_finite(),
        ConfigRule::WidthPositive,
        || format!("potential_width = {} must be positive", cfg.potential_width),
    )?;
    for (i, o) in cfg.oscillators.iter().enumerate() {
        check(o.position.norm() > 0.0, ConfigRule::ZeroPosition, || {
            format!("oscillator {} sits at the origin", i + 1)
        })?;
    }
    for (i, w) in cfg.oscillators.windows(2).enumerate() {
        let (a, b) = (w[0].position.norm(), w[1].position.norm());
        check(b - a > 1e-9 * b, ConfigRule::NormOrdering, || {
            format!(
                "|a_{}| = {a} is not strictly below |a_{}| = {b}",
                i + 1,
                i + 2
            )
        })?;
    }
    let dirs: Vec<Vec3> = cfg
        .oscillators
        .iter()
        .map(|o| o.position.normalize())
        .collect();
    for i in 0..dirs.len() {
        for k in i + 1..dirs.len() {
            check(1.0 - dirs[i].dot(&dirs[k]) > 1e-9, ConfigRule::Alignment, || {
                format!("oscillators {} and {} are aligned with the origin", i + 1, k + 1)
            })?;
        }
    }
    let tau_last = cfg.oscillators.last().unwrap().position.norm() / cfg.v0;
    check(cfg.t_final > tau_last, ConfigRule::FinalTime, || {
        format!("t_final = {} does not exceed tau_N = {tau_last}", cfg.t_final)
    })?;
    cfg.quad.validate()
}

/// `N_eps` making the initial state a unit vector.
///
/// The norm of the unnormalised state is `(16 pi^2 / v0^2) (1 - exp(-v0^2 / eps^2))`.
pub fn normalization_constant(eps: f64, v0: f64) -> f64 {
    let tail = -(-(v0 * v0) / (eps * eps)).exp_m1();
    v0 / (4.0 * PI) / tail.sqrt()
}

/// Oscillator energy `eps (|n| + 3/2)`.
pub fn energy_level(n: &Multi, eps: f64) -> f64 {
    eps * (abs_n(n) as f64 + 1.5)
}

/// Minimal rotation taking the unit vector `dir` to `e3`.
///
/// For `dir = -e3` the rotation by pi about `e1` is used.
pub fn rotation_to_e3(dir: &Vec3) -> Matrix3<f64> {
    let e3 = Vec3::z();
    match Rotation3::rotation_between(dir, &e3) {
        Some(r) if dir.dot(&e3) > -1.0 + 1e-12 => *r.matrix(),
        _ => Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0)),
    }
}

pub fn derive_geometry(cfg: &ModelConfig) -> Result<Geometry> {
    if cfg.oscillators.is_empty() {
        return Err(Error::config(ConfigRule::NoOscillators, "no oscillators given"));
    }
    let mut tau = Vec::new();
    let mut directions = Vec::new();
    for (i, o) in cfg.oscillators.iter().enumerate() {
        let r = o.position.norm();
        if !(r > 0.0) {
            return Err(Error::config(
                ConfigRule::ZeroPosition,
                format!("oscillator {} sits at the origin", i + 1),
            ));
        }
        tau.push(r / cfg.v0);
        directions.push(o.position / r);
    }
    let mut min_angle = PI;
    for i in 0..directions.len() {
        for k in i + 1..directions.len() {
            let c = directions[i].dot(&directions[k]).clamp(-1.0, 1.0);
            min_angle = min_angle.min(c.acos());
        }
    }
    let theta0 = 0.5 * min_angle;
    let rotations = directions.iter().map(rotation_to_e3).collect();
    let eps = cfg.epsilon;
    Ok(Geometry {
        delta: cfg.v0 * tau[0] * theta0.sin(),
        tau,
        directions,
        rotations,
        t_osc: 2.0 * PI * eps,
        t_transit: eps / cfg.v0,
        ratio: 1.0 / (2.0 * PI * cfg.v0),
        theta0,
    })
}

/// Whether the unit vector `u` lies in the open cone around direction `j`.
pub fn in_cone(u: &Vec3, j: usize, geom: &Geometry) -> bool {
    let r = geom.rotations[j] * u;
    let s = geom.theta0.sin();
    r.z > 0.0 && r.x * r.x + r.y * r.y < s * s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> ModelConfig {
        ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0], [2.5, 0.0, 0.0]], 3.0)
    }

    #[test]
    fn normalization_example() {
        let n = normalization_constant(0.5, 1.0);
        let expect = 1.0 / (4.0 * PI) / (1.0 - (-4.0f64).exp()).sqrt();
        assert!((n - expect).abs() < 1e-15);
        assert!((n - 0.08032).abs() < 1e-5);
    }

    #[test]
    fn normalization_tends_to_limit() {
        let n = normalization_constant(0.01, 2.0);
        assert!((n - 2.0 / (4.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn energy_example() {
        assert!((energy_level(&[1, 0, 2], 0.1) - 0.45).abs() < 1e-15);
    }

    #[test]
    fn single_oscillator_geometry() {
        let cfg = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0]], 3.0);
        let g = derive_geometry(&cfg).unwrap();
        assert_eq!(g.tau, vec![2.0]);
        assert!((g.theta0 - PI / 2.0).abs() < 1e-15);
        assert!((g.t_osc - 2.0 * PI * 0.2).abs() < 1e-15);
        assert!((g.ratio - g.t_transit / g.t_osc).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_pair_has_quarter_pi_opening() {
        let g = derive_geometry(&two()).unwrap();
        assert!((g.theta0 - PI / 4.0).abs() < 1e-15);
        assert!((g.delta - 2.0 * (PI / 4.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn rotation_of_minus_e3() {
        let r = rotation_to_e3(&Vec3::new(0.0, 0.0, -1.0));
        assert!((r * Vec3::new(0.0, 0.0, -1.0) - Vec3::z()).norm() < 1e-15);
        assert!((r.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rules_are_reported() {
        let mut c = two();
        c.oscillators.swap(0, 1);
        let e = validate_config(&c).unwrap_err();
        assert!(matches!(e, Error::Config { rule: ConfigRule::NormOrdering, .. }));

        let c = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 1.0], [0.0, 0.0, 2.0]], 3.0);
        let e = validate_config(&c).unwrap_err();
        assert!(matches!(e, Error::Config { rule: ConfigRule::Alignment, .. }));
        assert!(e.to_string().contains("assumption (B)"));

        let mut c = two();
        c.t_final = 2.5;
        let e = validate_config(&c).unwrap_err();
        assert!(matches!(e, Error::Config { rule: ConfigRule::FinalTime, .. }));

        let c = ModelConfig::new(1.0, 1.0, &[[0.0, 0.0, 1.0]], 3.0);
        assert!(validate_config(&c).is_err());
        assert!(validate_config(&two()).is_ok());
    }

    #[test]
    fn zero_position_fails_geometry() {
        let c = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 0.0]], 3.0);
        assert!(derive_geometry(&c).is_err());
    }

    #[test]
    fn cones_contain_their_axis() {
        let g = derive_geometry(&two()).unwrap();
        assert!(in_cone(&Vec3::z(), 0, &g));
        assert!(in_cone(&Vec3::x(), 1, &g));
        assert!(!in_cone(&Vec3::x(), 0, &g));
        assert!(!in_cone(&-Vec3::z(), 0, &g));
    }

    #[test]
    fn multi_index_count() {
        assert_eq!(multi_indices(2).len(), 10);
        assert_eq!(multi_indices(40).len(), 12341);
    }

    /// `||psi||^2` from the radial form of the initial state,
    /// `psi(R) = N eps^{-5/2} 4 pi sinc(v0 |R| / eps^2) f(R / eps)`.
    fn radial_norm_sq(eps: f64, v0: f64) -> f64 {
        let n = normalization_constant(eps, v0);
        let a = v0 / eps;
        let nodes = crate::quad::composite(0.0, 12.0, (0.5 / a).min(0.5), &crate::quad::legendre(12));
        let radial: f64 = nodes
            .iter()
            .map(|&(rho, w)| {
                let sinc = if rho == 0.0 { 1.0 } else { (a * rho).sin() / (a * rho) };
                w * rho * rho * sinc * sinc * (-rho * rho).exp()
            })
            .sum();
        n * n * 16.0 * PI * PI * 4.0 * radial / (PI.sqrt() * eps * eps)
    }

    #[test]
    fn normalization_oracle() {
        for &(eps, v0) in &[(0.5, 1.0), (0.1, 1.0), (0.3, 2.5), (0.9, 0.4)] {
            assert!((radial_norm_sq(eps, v0) - 1.0).abs() < 1e-10, "{eps} {v0} {}", radial_norm_sq(eps, v0));
        }
    }

    use proptest::prelude::*;

    fn unit() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, 0.0f64..2.0 * PI).prop_map(|(z, phi)| {
            let r = (1.0 - z * z).sqrt();
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
    }

    proptest! {
        #[test]
        fn normalization_any_scale(eps in 0.05f64..0.95, v0 in 0.3f64..3.0) {
            prop_assert!((radial_norm_sq(eps, v0) - 1.0).abs() < 1e-6);
        }

        #[test]
        fn rotation_is_proper(d in unit()) {
            let r = rotation_to_e3(&d);
            prop_assert!((r.transpose() * r - Matrix3::identity()).norm() < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
            prop_assert!((r * d - Vec3::z()).norm() < 1e-12);
        }

        #[test]
        fn cones_are_disjoint(
            dirs in proptest::collection::vec(unit(), 2..5),
            u in unit(),
        ) {
            let positions: Vec<[f64; 3]> = dirs
                .iter()
                .enumerate()
                .map(|(i, d)| (d * (1.0 + 0.5 * i as f64)).into())
                .collect();
            let cfg = ModelConfig::new(0.2, 1.0, &positions, 10.0);
            prop_assume!(validate_config(&cfg).is_ok());
            let g = derive_geometry(&cfg).unwrap();
            let hits = (0..positions.len()).filter(|&j| in_cone(&u, j, &g)).count();
            prop_assert!(hits <= 1);
        }
    }
}
