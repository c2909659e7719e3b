//! Stationary-phase objects and direct numerical evaluation of the first-order
//! Duhamel coefficients, used to check the packet expansion.

pub mod coeff;
pub mod phase;
pub mod study;

pub use coeff::{axis_integral, first_order_coeff, first_order_coeffs, CoeffResult, Region};
pub use phase::{
    critical_point, leading_consistency, phase_value, reduced_phase, reduced_phase_gradient,
    second_order_phase_bound, LeadingCheck, PhaseBound, PhasePoint,
};
pub use study::{nonstationary_ratio, residual_norm, study_point, RatioPoint, ResidualPoint, StudyPoint, TubeGrid};
