//! Track formation from a spherical wave scattering off harmonic oscillators.
//!
//! A test particle starts in an isotropic superposition of plane waves and
//! interacts weakly with `N` three-dimensional oscillators. To first order in
//! the coupling, each oscillator `j` left in state `n` emits a Gaussian packet
//! `P_{n,j}` travelling along `a_j / |a_j|`. This crate builds those packets,
//! evaluates the first-order Duhamel coefficients they approximate by direct
//! quadrature, and measures how fast the remainder vanishes with `eps`.
//!
//! Modules:
//!
//! - [`model`]: configuration, admissibility rules, derived geometry.
//! - [`kernels`]: Hermite functions, coupling amplitudes, Mehler kernel, `zeta`, conjugated shifts.
//! - [`packet`]: outgoing packets, their moments, norms and free evolution.
//! - [`oracle`]: direct evaluation of first-order coefficients and the phase analysis around them.
//! - [`harness`]: identity suites and eps-scaling studies.
//! - [`config`], [`cli`]: JSON run files and the `mott` command.
//!
//! Examples (`cargo run --release --example <name>`):
//!
//! | example | shows |
//! |---|---|
//! | `geometry` | validation and the derived flight times, cones and time scales |
//! | `packet_anatomy` | one packet's amplitude, moments, norm and evolution |
//! | `track_report` | channel weights of every outgoing track |
//! | `kernel_identities` | the identity suite and the Mehler eigen-sum convergence |
//! | `duhamel_coefficient` | a coefficient next to the packet it reduces to |
//! | `scaling_study` | residual norm versus eps and its fitted exponent |
//! | `nonstationary_study` | off-cone suppression versus eps |
//! | `phase_bound` | second-order phase gradient bound for several layouts |

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod packet;
pub mod quad;

pub use error::{ConfigRule, Error, Result};
