//! 1D mesh, Scharfetter-Gummel flux, banded linear algebra and the
//! assembly of the Poisson and continuity equations.

mod assembly;
mod banded;
mod current;
mod flux;
mod mesh;

pub use assembly::{assemble_continuity, assemble_poisson, BandedSystem, Carrier, ContinuityInputs};
pub use banded::{BandLu, BandMatrix};
pub use current::{compute_current, displacement_rate, CurrentProfile};
pub use flux::{bernoulli, bernoulli_derivative, sg_edge_flux, EdgeFlux, FluxJacobian};
pub use mesh::Mesh1D;
