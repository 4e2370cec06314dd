//! Stationary elimination of the pair density, the Slotboom steady solver,
//! the lumped transient rates and diagnostics of the memory approximation.

mod memory;
mod slotboom;
mod stationary;

pub use memory::{memory_diagnostics, MemoryCoefficients, MemoryDiagnostics};
pub use slotboom::{steady_solve, GummelOptions, SlotboomState, SteadyReport, SteadySolution};
pub use stationary::{reference_density, stationary_rates, stationary_x, StationaryBounds};
pub use crate::scenario::reduced_transient_solve;

use crate::model::xi;

/// Modified generation `G~` and recombination term `R~ p n` of the lumped
/// model at every node. `x0` and `np0` are the pair density and `p n` when
/// the light is switched on.
#[allow(clippy::too_many_arguments)]
pub fn modified_rates(t: f64, n: &[f64], p: &[f64], np0: &[f64], x0: &[f64], g: f64, kdiss: f64, k_rec: f64, gamma: f64) -> (Vec<f64>, Vec<f64>) {
    let mut gen = Vec::with_capacity(n.len());
    let mut rec = Vec::with_capacity(n.len());
    for i in 0..n.len() {
        let (gt, r) = crate::solver::modified_rates_at(t, x0[i], np0[i], g, kdiss, k_rec, gamma);
        gen.push(gt);
        rec.push(r * n[i] * p[i]);
    }
    (gen, rec)
}

/// Pair density driven by generation alone, at every node.
pub fn xi_field(t: f64, x0: &[f64], g: f64, tau: f64) -> Vec<f64> {
    x0.iter().map(|&x| xi(t, x, g, tau)).collect()
}
