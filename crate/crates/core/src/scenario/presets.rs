//! Built-in scenarios matching the bundled configuration files.

use super::config::{Coefficients, ModelKind, OutputSpec, ScenarioConfig, SweepAxes, SweepPoint, G_HIGH, G_LOW};
use crate::integrator::BdfOptions;
use crate::model::{ContactParams, Contacts, DeviceGeometry, MaterialParams};

pub const LENGTH: f64 = 70e-9;
pub const VOLTAGE: f64 = 0.5;
pub const INJECTION_DENSITY: f64 = 1e21;
pub const MU0: f64 = 2e-8;
/// Dissociation rate at the mean field with `MU0`.
pub const KDISS0: f64 = 5.52e6;
pub const KREC0: f64 = 1e6;
pub const MU_AXIS: [f64; 2] = [2e-9, 2e-8];
pub const KDISS_AXIS: [f64; 2] = [4.4e5, 8e6];
pub const KREC_AXIS: [f64; 2] = [1e5, 1e7];
pub const G_AXIS: [f64; 2] = [G_LOW, G_HIGH];

/// Dirichlet contacts injecting `nd` majority carriers, Boltzmann-consistent
/// with the applied voltage.
pub fn dirichlet_contacts(nd: f64, voltage: f64, vth: f64) -> Contacts {
    let lo = nd * (-voltage / vth).exp();
    Contacts {
        cathode: ContactParams::dirichlet(lo, nd, 0.0),
        anode: ContactParams::dirichlet(nd, lo, voltage),
    }
}

/// Baseline device of the parameter studies: 70 nm, 0.5 V, low light,
/// frozen coefficients with `k_diss = KDISS0`.
pub fn baseline() -> ScenarioConfig {
    let material = MaterialParams {
        mu_n: MU0,
        mu_p: MU0,
        eps_r: 4.0,
        temperature: 300.0,
        k_rec: KREC0,
        pair_distance: 1.5e-9,
        generation: G_LOW,
        gamma_override: None,
        kdiss_override: Some(KDISS0),
        v_max: None,
    };
    ScenarioConfig {
        geometry: DeviceGeometry::uniform(LENGTH, 201),
        contacts: dirichlet_contacts(INJECTION_DENSITY, VOLTAGE, material.thermal_voltage()),
        material,
        coefficients: Coefficients::Frozen,
        model: ModelKind::Full,
        bdf: BdfOptions::default(),
        output: OutputSpec {
            t_start: 1e-10,
            t_end: 1e-3,
            points_per_decade: 10,
            snapshots: Vec::new(),
            memory: false,
        },
        sweep: SweepAxes::default(),
    }
}

/// The 2 x 2 x 2 x 2 grid over mobility, `k_diss`, `k_rec` and `G`.
pub fn grid_axes() -> SweepAxes {
    SweepAxes {
        mu: MU_AXIS.to_vec(),
        k_diss: KDISS_AXIS.to_vec(),
        k_rec: KREC_AXIS.to_vec(),
        generation: G_AXIS.to_vec(),
    }
}

pub fn grid_points() -> Vec<SweepPoint> {
    grid_axes().points()
}
