//! Variable-step, variable-order BDF integration of the semi-discrete
//! device equations.

mod bdf;
mod integrate;

pub use bdf::{bdf_coefficients, divided_difference, error_constant, error_estimate, lte_coefficient, predict, wrms};
pub use integrate::{consistent_initial, integrate, BdfOptions, BdfState, IntegrationStats, StepRecord};
