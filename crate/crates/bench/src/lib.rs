//! Shared fixtures for the benchmarks.

use oscsim_core::scenario::{presets, ScenarioConfig, SweepPoint, G_HIGH};
use oscsim_core::solver::{Device, NewtonOptions};
use oscsim_core::StateVector;

/// Baseline scenario on `nodes` nodes, optionally at high light.
pub fn scenario(nodes: usize, high: bool) -> ScenarioConfig {
    let mut cfg = presets::baseline();
    if high {
        cfg = cfg.at_point(&SweepPoint { generation: Some(G_HIGH), ..Default::default() });
    }
    cfg.geometry.node_count = nodes;
    cfg
}

/// Device and its illuminated steady state.
pub fn steady_fixture(nodes: usize) -> (Device, StateVector) {
    let dev = scenario(nodes, false).device().expect("valid baseline");
    let s = oscsim_core::scenario::steady_state(&dev, &NewtonOptions::stationary()).expect("steady state");
    (dev, s)
}
