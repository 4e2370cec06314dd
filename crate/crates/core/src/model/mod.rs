//! Physical constants, parameter records and the pointwise constitutive laws
//! shared by every solver.

mod constitutive;
mod params;

pub mod constants;

pub use constitutive::{
    braun_onsager_kdiss, braun_series, einstein_diffusion, exciton_tau, langevin_gamma,
    thermal_voltage, xi, KDISS_SERIES_RTOL,
};
pub use params::{
    BoundaryMode, ContactParams, Contacts, DeviceGeometry, MaterialParams, StateVector,
};
