use super::assembly::Carrier;
use super::flux::sg_edge_flux;
use super::mesh::Mesh1D;
use crate::model::constants::Q;
use crate::model::MaterialParams;

/// Per-edge current densities (A/m^2) with the sign convention
/// `J = q (J_p - J_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentProfile {
    /// Conduction current on every edge.
    pub conduction: Vec<f64>,
    /// Conduction minus `eps dE/dt`; equals `conduction` when no field rate
    /// is supplied.
    pub total: Vec<f64>,
    /// Terminal value, taken on the edge adjacent to the cathode.
    pub contact: f64,
}

impl CurrentProfile {
    /// `max |J_e - J_contact| / |J_contact|` over edges.
    pub fn max_relative_variation(&self) -> f64 {
        let reference = self.contact.abs();
        self.total
            .iter()
            .map(|j| (j - self.contact).abs())
            .fold(0.0, f64::max)
            / reference
    }
}

/// Field rate `dE/dt` on each edge from the time-difference coefficients and
/// the potentials at `t_K, t_{K-1}, ...` (most recent first).
pub fn displacement_rate(mesh: &Mesh1D, theta: &[f64], phis: &[&[f64]]) -> Vec<f64> {
    let h = mesh.edges();
    (0..h.len())
        .map(|e| {
            theta
                .iter()
                .zip(phis)
                .map(|(t, phi)| -t * (phi[e + 1] - phi[e]) / h[e])
                .sum()
        })
        .collect()
}

/// Terminal and per-edge current of a state.
pub fn compute_current(
    mesh: &Mesh1D,
    phi: &[f64],
    n: &[f64],
    p: &[f64],
    material: &MaterialParams,
    field_rate: Option<&[f64]>,
) -> CurrentProfile {
    let vth = material.thermal_voltage();
    let h = mesh.edges();
    let eps = material.permittivity();
    let conduction: Vec<f64> = (0..h.len())
        .map(|e| {
            let jn = sg_edge_flux(n[e], n[e + 1], phi[e], phi[e + 1], material.mu_n, vth, h[e], Carrier::Electron, material.v_max);
            let jp = sg_edge_flux(p[e], p[e + 1], phi[e], phi[e + 1], material.mu_p, vth, h[e], Carrier::Hole, material.v_max);
            Q * (jp.flux.value - jn.flux.value)
        })
        .collect();
    let total: Vec<f64> = match field_rate {
        Some(rate) => conduction.iter().zip(rate).map(|(j, r)| j - eps * r).collect(),
        None => conduction.clone(),
    };
    let contact = total[0];
    CurrentProfile {
        conduction,
        total,
        contact,
    }
}
