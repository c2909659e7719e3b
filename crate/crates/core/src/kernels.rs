//! Oscillator eigenfunctions, Fourier data of the coupling, and the kernel
//! identities the first-order expansion rests on.
//!
//! Fourier conventions: the potential carries `(2 pi)^-3` with kernel
//! `exp(-i xi.y)`, the oscillator pair transform carries no prefactor. With
//! these, `int phi_n phi_0(x) V(w - x) dx = int (phi_n phi_0)~(xi) V~(xi) exp(i xi.w) dxi`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::{Multi, Vec3};
use crate::quad;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Normalised Hermite functions `phi_0 .. phi_{n_max}` at `x`.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

pub fn hermite_function(n: usize, x: f64) -> f64 {
    hermite_functions(n, x)[n]
}

/// Product eigenfunction of the isotropic unit-frequency oscillator.
pub fn eigenfunction_3d(n: &Multi, x: &Vec3) -> f64 {
    (0..3).map(|k| hermite_function(n[k], x[k])).product()
}

/// `(phi_n phi_0)~(xi) = 2^{-n/2} (n!)^{-1/2} (-i xi)^n exp(-xi^2 / 4)`.
pub fn pair_ft_1d(n: usize, xi: f64) -> C64 {
    let mut mag = (-0.25 * xi * xi).exp();
    for k in 1..=n {
        mag *= xi / (2.0 * k as f64).sqrt();
    }
    (-I).powu(n as u32) * mag
}

/// Amplitude factor `(-i)^n / sqrt(2^n n!)` of the pair transform.
pub(crate) fn pair_coefficient(n: usize) -> C64 {
    let mut mag = 1.0;
    for k in 1..=n {
        mag /= (2.0 * k as f64).sqrt();
    }
    (-I).powu(n as u32) * mag
}

/// Prefactor `(2 pi)^-3 (2 pi w^2)^{3/2}` of the Gaussian potential transform.
pub(crate) fn potential_prefactor(width: f64) -> f64 {
    (2.0 * PI * width * width).powf(1.5) / (2.0 * PI).powi(3)
}

/// Transform of `V(y) = exp(-|y|^2 / (2 w^2))`.
pub fn potential_ft(xi: &Vec3, width: f64) -> f64 {
    potential_prefactor(width) * (-0.5 * width * width * xi.norm_squared()).exp()
}

/// Coupling amplitude `g_{n,0}(xi) = V~(xi) (phi_n phi_0)~(xi)`.
pub fn coupling_g(n: &Multi, xi: &Vec3, width: f64) -> C64 {
    let pair: C64 = (0..3).map(|k| pair_ft_1d(n[k], xi[k])).product();
    pair * potential_ft(xi, width)
}

/// Closed-form one-dimensional oscillator propagator.
///
/// Reproduces `sum_n phi_n(x) phi_n(y) exp(-i t (n + 1/2))`, including the
/// Maslov phase on each half period. Fails at caustics `sin t = 0`.
pub fn mehler_kernel(t: f64, x: f64, y: f64) -> Result<C64> {
    mehler_kernel_complex(C64::new(t, 0.0), x, y)
}

/// Propagator continued to complex time `tau = t - i eta`, `eta >= 0`.
///
/// For `eta > 0` the eigenfunction series converges geometrically, so this is
/// where the closed form and the truncated series can be compared pointwise.
pub fn mehler_kernel_complex(tau: C64, x: f64, y: f64) -> Result<C64> {
    let s = tau.sin();
    if s.norm() < 1e-12 {
        return Err(Error::numerical(format!("Mehler kernel caustic at t = {tau}")));
    }
    let k = (tau.re / PI).floor();
    let sign = if k.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
    let maslov = C64::from_polar(1.0, -k * PI / 2.0);
    let pre = maslov / (I * 2.0 * PI * sign * s).sqrt();
    Ok(pre * (I * ((x * x + y * y) * tau.cos() - 2.0 * x * y) / (2.0 * s)).exp())
}

/// Truncated eigenfunction expansion of the propagator.
///
/// For real `t` the series only converges conditionally (terms decay like
/// `n^{-1/2}`); use `mehler_eigensum_complex` for pointwise comparisons.
pub fn mehler_eigensum(t: f64, x: f64, y: f64, n_max: usize) -> C64 {
    mehler_eigensum_complex(C64::new(t, 0.0), x, y, n_max)
}

pub fn mehler_eigensum_complex(tau: C64, x: f64, y: f64, n_max: usize) -> C64 {
    let hx = hermite_functions(n_max, x);
    let hy = hermite_functions(n_max, y);
    (0..=n_max)
        .map(|n| hx[n] * hy[n] * (-I * tau * (n as f64 + 0.5)).exp())
        .sum()
}

/// Product propagator of the three-dimensional oscillator.
pub fn mehler_kernel_3d(t: f64, x: &Vec3, y: &Vec3) -> Result<C64> {
    let mut out = C64::new(1.0, 0.0);
    for k in 0..3 {
        out *= mehler_kernel(t, x[k], y[k])?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSum {
    /// `sum_{|n| <= n_max} g_n(xi) conj(g_n(xi'))`.
    pub lhs: C64,
    /// `V~(xi) V~(xi') exp(-|xi - xi'|^2 / 4)`.
    pub rhs: C64,
}

impl PairSum {
    pub fn rel_error(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.rhs.norm()
    }
}

/// Both sides of the completeness identity for the coupling amplitudes.
pub fn pair_sum(xi: &Vec3, xi2: &Vec3, n_max: usize, width: f64) -> PairSum {
    let axis: Vec<Vec<C64>> = (0..3)
        .map(|k| {
            (0..=n_max)
                .map(|m| pair_ft_1d(m, xi[k]) * pair_ft_1d(m, xi2[k]).conj())
                .collect()
        })
        .collect();
    let mut lhs = C64::new(0.0, 0.0);
    for n1 in 0..=n_max {
        for n2 in 0..=n_max - n1 {
            for n3 in 0..=n_max - n1 - n2 {
                lhs += axis[0][n1] * axis[1][n2] * axis[2][n3];
            }
        }
    }
    let v = potential_ft(xi, width) * potential_ft(xi2, width);
    lhs *= v;
    let rhs = C64::new(v * (-0.25 * (xi - xi2).norm_squared()).exp(), 0.0);
    PairSum { lhs, rhs }
}

/// One axis of `zeta_t(xi, xi') = <phi_0, exp(i xi'.y) U(t) exp(-i xi.y) phi_0>`.
pub fn zeta_1d(t: f64, xi: f64, xi2: f64) -> C64 {
    let e = C64::from_polar(1.0, -t);
    (-0.25 * (xi * xi + xi2 * xi2) + 0.5 * xi * xi2 * e).exp() * C64::from_polar(1.0, -0.5 * t)
}

/// Coherent-state closed form of `zeta_t`; `|zeta| <= 1` and `zeta_0 = exp(-|xi - xi'|^2 / 4)`.
pub fn zeta(t: f64, xi: &Vec3, xi2: &Vec3) -> C64 {
    (0..3).map(|k| zeta_1d(t, xi[k], xi2[k])).product()
}

/// `zeta_t` by double quadrature against the closed-form propagator.
pub fn zeta_by_quadrature(t: f64, xi: &Vec3, xi2: &Vec3) -> Result<C64> {
    let nodes = quad::composite(-9.0, 9.0, 0.2, &quad::legendre(10));
    let phi0: Vec<f64> = nodes.iter().map(|&(x, _)| hermite_function(0, x)).collect();
    let mut out = C64::new(1.0, 0.0);
    for k in 0..3 {
        let mut total = C64::new(0.0, 0.0);
        for (a, &(x, wx)) in nodes.iter().enumerate() {
            let mut inner = C64::new(0.0, 0.0);
            for (b, &(y, wy)) in nodes.iter().enumerate() {
                let u = mehler_kernel(t, x, y)?;
                inner += u * C64::from_polar(wy * phi0[b], -xi[k] * y);
            }
            total += inner * C64::from_polar(wx * phi0[a], xi2[k] * x);
        }
        out *= total;
    }
    Ok(out)
}

/// Uniform periodic grid `lo + k (hi - lo) / n`, `k = 0 .. n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1d {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid1d {
    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.lo + self.step() * k as f64).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let l = self.hi - self.lo;
        (0..self.n)
            .map(|m| {
                let m = if m < self.n / 2 { m as f64 } else { m as f64 - self.n as f64 };
                2.0 * PI * m / l
            })
            .collect()
    }
}

/// Conjugated translation evaluated by symbol multiplication and by its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftComparison {
    pub x: Vec<f64>,
    /// `exp(i s xi^2 / 2) exp(i xi x / eps) g(x + eps s xi)`.
    pub closed: Vec<C64>,
    /// `exp(i s h0 / eps^2) exp(i xi x / eps) exp(-i s h0 / eps^2) g` with `h0 = -eps^4 d^2 / 2`.
    pub spectral: Vec<C64>,
}

impl ShiftComparison {
    pub fn sup_diff(&self) -> f64 {
        self.closed
            .iter()
            .zip(&self.spectral)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn edge_fraction(v: &[C64]) -> f64 {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let band = (v.len() / 50).max(1);
    let edge = v[..band]
        .iter()
        .chain(&v[v.len() - band..])
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if peak > 0.0 { edge / peak } else { 0.0 }
}

/// Compares both sides of the conjugated-shift identity on a periodic grid.
pub fn conjugated_shift(
    g: &dyn Fn(f64) -> C64,
    grid: &Grid1d,
    s: f64,
    xi: f64,
    eps: f64,
) -> Result<ShiftComparison> {
    let x = grid.points();
    let k = grid.wavenumbers();
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let scale = 1.0 / n as f64;
    let evolve = |v: &mut Vec<C64>, sign: f64| {
        fwd.process(v);
        for (z, &km) in v.iter_mut().zip(&k) {
            *z *= C64::from_polar(scale, sign * 0.5 * s * eps * eps * km * km);
        }
        inv.process(v);
    };

    let mut v: Vec<C64> = x.iter().map(|&xv| g(xv)).collect();
    let check = |v: &[C64], what: &str| -> Result<()> {
        let f = edge_fraction(v);
        if f > 1e-10 {
            return Err(Error::numerical(format!(
                "{what} reaches the grid edge (relative size {f:.2e})"
            )));
        }
        Ok(())
    };
    check(&v, "profile")?;
    evolve(&mut v, -1.0);
    check(&v, "backward-evolved profile")?;
    for (z, &xv) in v.iter_mut().zip(&x) {
        *z *= C64::from_polar(1.0, xi * xv / eps);
    }
    evolve(&mut v, 1.0);
    check(&v, "shifted profile")?;

    let closed: Vec<C64> = x
        .iter()
        .map(|&xv| C64::from_polar(1.0, 0.5 * s * xi * xi + xi * xv / eps) * g(xv + eps * s * xi))
        .collect();
    Ok(ShiftComparison { x, closed, spectral: v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_value() {
        assert!((hermite_function(0, 0.0) - PI.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn hermite_orthonormal() {
        let nodes = quad::composite(-12.0, 12.0, 0.5, &quad::legendre(12));
        for a in 0..8 {
            for b in 0..8 {
                let ip: f64 = nodes
                    .iter()
                    .map(|&(x, w)| {
                        let h = hermite_functions(8, x);
                        w * h[a] * h[b]
                    })
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-12, "{a} {b} {ip}");
            }
        }
    }

    #[test]
    fn pair_ft_matches_quadrature() {
        let nodes = quad::composite(-12.0, 12.0, 0.5, &quad::legendre(12));
        for n in 0..5 {
            for &xi in &[-1.3, 0.0, 0.4, 2.2] {
                let q: C64 = nodes
                    .iter()
                    .map(|&(x, w)| {
                        let h = hermite_functions(n, x);
                        C64::from_polar(w * h[n] * h[0], -xi * x)
                    })
                    .sum();
                assert!((q - pair_ft_1d(n, xi)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn pair_ft_examples() {
        assert!((pair_ft_1d(0, 0.0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        let v = pair_ft_1d(1, 2.0);
        assert!((v - C64::new(0.0, -2f64.sqrt() * (-1.0f64).exp())).norm() < 1e-15);
    }

    #[test]
    fn potential_ft_at_zero() {
        let v = potential_ft(&Vec3::zeros(), 1.0);
        assert!((v - (2.0 * PI).powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn mehler_quarter_period() {
        let u = mehler_kernel(PI / 2.0, 0.7, -0.3).unwrap();
        let expect = C64::new(0.0, 2.0 * PI).powf(-0.5) * C64::from_polar(1.0, 0.21);
        assert!((u - expect).norm() < 1e-14);
    }

    #[test]
    fn mehler_rejects_caustic() {
        assert!(mehler_kernel(PI, 0.1, 0.2).is_err());
        assert!(mehler_kernel(0.0, 0.1, 0.2).is_err());
    }

    #[test]
    fn mehler_damped_series() {
        for &t in &[0.5, 2.9, 3.6, 5.0, -0.8] {
            let tau = C64::new(t, -0.3);
            let a = mehler_kernel_complex(tau, 0.4, -0.9).unwrap();
            let b = mehler_eigensum_complex(tau, 0.4, -0.9, 90);
            assert!((a - b).norm() < 1e-9, "t={t} {a} {b}");
        }
    }

    #[test]
    fn mehler_half_period_shift() {
        let a = mehler_kernel(PI + 0.6, 0.4, -0.9).unwrap();
        let b = mehler_kernel(0.6, 0.4, 0.9).unwrap() * (-I);
        assert!((a - b).norm() < 1e-13);
        let c = mehler_kernel(-0.6, 0.4, -0.9).unwrap();
        assert!((c - mehler_kernel(0.6, 0.4, -0.9).unwrap().conj()).norm() < 1e-14);
    }

    #[test]
    fn zeta_at_time_zero() {
        let a = Vec3::new(0.3, -1.0, 2.0);
        let b = Vec3::new(-0.5, 0.2, 1.1);
        let z = zeta(0.0, &a, &b);
        assert!((z - C64::new((-0.25 * (a - b).norm_squared()).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pair_sum_diagonal_monotone() {
        let xi = Vec3::new(1.0, -2.0, 0.5);
        let mut last = 0.0;
        for n in 0..12 {
            let p = pair_sum(&xi, &xi, n, 1.0);
            assert!(p.lhs.re >= last);
            last = p.lhs.re;
        }
    }

    #[test]
    fn shift_detects_escape() {
        let grid = Grid1d { lo: -2.0, hi: 2.0, n: 128 };
        let g = |x: f64| C64::new((-x * x).exp(), 0.0);
        assert!(conjugated_shift(&g, &grid, 0.5, 1.0, 0.3).is_err());
    }

    #[test]
    fn mehler_propagates_ground_state() {
        let nodes = quad::composite(-12.0, 12.0, 0.1, &quad::legendre(12));
        for &t in &[0.4, 1.3, 2.2, 4.0] {
            for &x in &[-1.2, 0.0, 0.7] {
                let v: C64 = nodes
                    .iter()
                    .map(|&(y, w)| mehler_kernel(t, x, y).unwrap() * w * hermite_function(0, y))
                    .sum();
                let expect = C64::from_polar(hermite_function(0, x), -0.5 * t);
                assert!((v - expect).norm() < 1e-8, "t={t} x={x} {v} {expect}");
            }
        }
    }

    #[test]
    fn conjugated_shift_gaussian() {
        let grid = Grid1d { lo: -20.0, hi: 20.0, n: 1024 };
        let g = |x: f64| C64::new((-0.5 * x * x).exp(), 0.0);
        let c = conjugated_shift(&g, &grid, 1.3, -0.7, 0.2).unwrap();
        assert!(c.sup_diff() < 1e-10);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pair_ft_parity(n in 0usize..12, xi in -5.0f64..5.0) {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((pair_ft_1d(n, -xi) - pair_ft_1d(n, xi) * sign).norm() < 1e-14);
        }

        #[test]
        fn zeta_is_bounded(
            t in -20.0f64..20.0,
            a in proptest::array::uniform3(-5.0f64..5.0),
            b in proptest::array::uniform3(-5.0f64..5.0),
        ) {
            prop_assert!(zeta(t, &Vec3::from(a), &Vec3::from(b)).norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn mehler_symmetric(t in 0.05f64..3.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let u = mehler_kernel(t, x, y).unwrap();
            let v = mehler_kernel(t, y, x).unwrap();
            prop_assert!((u - v).norm() < 1e-13 * u.norm());
        }

        #[test]
        fn pair_sum_converges(
            a in proptest::array::uniform3(-2.0f64..2.0),
            b in proptest::array::uniform3(-2.0f64..2.0),
        ) {
            prop_assert!(pair_sum(&Vec3::from(a), &Vec3::from(b), 40, 1.0).rel_error() < 1e-6);
        }
    }
}
