//! Residual/Jacobian assembly of the coupled device equations and the
//! scaled, damped quasi-Newton corrector.

mod device;
mod newton;
mod scaling;
mod system;

pub use device::{Device, FullModel, ReducedModel};
pub(crate) use device::modified_rates_at;
pub use newton::{newton_solve, NewtonOptions, NewtonOutcome, NewtonReport};
pub use scaling::ScalingSet;
pub use system::{fd_jacobian_column, DaeSystem, StepContext};
