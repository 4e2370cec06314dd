//! One-dimensional drift-diffusion simulation of bulk-heterojunction organic
//! solar cells with exciton kinetics.

pub mod discretization;
pub mod error;
pub mod integrator;
pub mod model;
pub mod reduced;
pub mod scenario;
pub mod solver;

pub use discretization::{CurrentProfile, Mesh1D};
pub use error::{Error, Result};
pub use model::{BoundaryMode, ContactParams, Contacts, DeviceGeometry, MaterialParams, StateVector};
pub use solver::{Device, FullModel, ReducedModel};
