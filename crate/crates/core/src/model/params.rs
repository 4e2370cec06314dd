use serde::{Deserialize, Serialize};

use super::constants::EPS0;
use super::constitutive::{braun_onsager_kdiss, einstein_diffusion, langevin_gamma, thermal_voltage};
use crate::error::{validation, Error, Result};

/// Device thickness and mesh resolution. The cathode sits at `x = 0`, the
/// anode at `x = length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceGeometry {
    pub length: f64,
    pub node_count: usize,
    /// Geometric grading ratio toward both contacts; 1.0 means uniform.
    pub grading: f64,
}

impl DeviceGeometry {
    pub fn uniform(length: f64, node_count: usize) -> Self {
        Self {
            length,
            node_count,
            grading: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(validation("device.length", "must be > 0"));
        }
        if self.node_count < 3 {
            return Err(validation("device.nodes", "must be >= 3"));
        }
        if !(self.grading >= 1.0 && self.grading <= 1.1) {
            return Err(validation("device.grading", "must lie in [1.0, 1.1]"));
        }
        Ok(())
    }
}

/// Bulk material parameters, all SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub mu_n: f64,
    pub mu_p: f64,
    pub eps_r: f64,
    pub temperature: f64,
    pub k_rec: f64,
    pub pair_distance: f64,
    pub generation: f64,
    pub gamma_override: Option<f64>,
    pub kdiss_override: Option<f64>,
    pub v_max: Option<f64>,
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("material.mu_n", self.mu_n),
            ("material.mu_p", self.mu_p),
            ("material.eps_r", self.eps_r),
            ("material.temperature", self.temperature),
            ("material.k_rec", self.k_rec),
            ("material.pair_distance", self.pair_distance),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(validation(name, format!("must be > 0, got {v}")));
            }
        }
        if !(self.generation >= 0.0) {
            return Err(validation("illumination.G", "must be >= 0"));
        }
        let optional = [
            ("material.gamma", self.gamma_override),
            ("material.k_diss", self.kdiss_override),
            ("material.v_max", self.v_max),
        ];
        for (name, v) in optional {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(validation(name, format!("must be > 0 when set, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn permittivity(&self) -> f64 {
        self.eps_r * EPS0
    }

    pub fn thermal_voltage(&self) -> f64 {
        thermal_voltage(self.temperature).expect("validated temperature")
    }

    pub fn diffusivity_n(&self) -> f64 {
        einstein_diffusion(self.mu_n, self.thermal_voltage()).expect("validated mobility")
    }

    pub fn diffusivity_p(&self) -> f64 {
        einstein_diffusion(self.mu_p, self.thermal_voltage()).expect("validated mobility")
    }

    /// Bimolecular coefficient: the override when set, Langevin otherwise.
    pub fn gamma(&self) -> f64 {
        self.gamma_override.unwrap_or_else(|| {
            langevin_gamma(self.mu_n, self.mu_p, self.permittivity()).expect("validated")
        })
    }

    /// Dissociation rate at field magnitude `e_mag`.
    pub fn kdiss(&self, e_mag: f64) -> f64 {
        braun_onsager_kdiss(e_mag, self, self.gamma())
    }

    /// Copy with `gamma` and `k_diss` pinned to their values at the given
    /// field, so every coefficient is spatially constant.
    pub fn frozen_at(&self, e_mag: f64) -> Self {
        let gamma = self.gamma();
        let kdiss = braun_onsager_kdiss(e_mag, self, gamma);
        Self {
            gamma_override: Some(gamma),
            kdiss_override: Some(kdiss),
            ..*self
        }
    }

    pub fn has_constant_coefficients(&self) -> bool {
        self.kdiss_override.is_some()
    }
}

/// How the carrier boundary conditions are imposed at a contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    Robin,
    Dirichlet,
}

/// Per-contact boundary data: `kappa * J . nu = beta - alpha * eta` for each
/// carrier, plus the potential `psi_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactParams {
    pub kappa_n: f64,
    pub kappa_p: f64,
    pub alpha_n: f64,
    pub alpha_p: f64,
    pub beta_n: f64,
    pub beta_p: f64,
    pub psi_d: f64,
    pub mode: BoundaryMode,
}

impl ContactParams {
    /// Dirichlet contact pinning `n`, `p` and the potential.
    pub fn dirichlet(n_d: f64, p_d: f64, psi_d: f64) -> Self {
        Self {
            kappa_n: 0.0,
            kappa_p: 0.0,
            alpha_n: 1.0,
            alpha_p: 1.0,
            beta_n: n_d,
            beta_p: p_d,
            psi_d,
            mode: BoundaryMode::Dirichlet,
        }
    }

    pub fn n_d(&self) -> f64 {
        self.beta_n / self.alpha_n
    }

    pub fn p_d(&self) -> f64 {
        self.beta_p / self.alpha_p
    }

    /// True when the electron density is pinned at this contact.
    pub fn pins_n(&self) -> bool {
        self.mode == BoundaryMode::Dirichlet || self.kappa_n == 0.0
    }

    pub fn pins_p(&self) -> bool {
        self.mode == BoundaryMode::Dirichlet || self.kappa_p == 0.0
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let field = |f: &str| format!("contacts.{name}.{f}");
        if !(self.kappa_n >= 0.0) {
            return Err(validation(field("kappa_n"), "must be >= 0"));
        }
        if !(self.kappa_p >= 0.0) {
            return Err(validation(field("kappa_p"), "must be >= 0"));
        }
        if !(self.alpha_n > 0.0) {
            return Err(validation(field("alpha_n"), "must be > 0"));
        }
        if !(self.alpha_p > 0.0) {
            return Err(validation(field("alpha_p"), "must be > 0"));
        }
        if !(self.beta_n >= 0.0) {
            return Err(validation(field("beta_n"), "must be >= 0"));
        }
        if !(self.beta_p >= 0.0) {
            return Err(validation(field("beta_p"), "must be >= 0"));
        }
        if !self.psi_d.is_finite() {
            return Err(validation(field("psi"), "must be finite"));
        }
        if self.pins_n() && !(self.n_d() > 0.0) {
            return Err(validation(field("n"), "pinned density must be > 0"));
        }
        if self.pins_p() && !(self.p_d() > 0.0) {
            return Err(validation(field("p"), "pinned density must be > 0"));
        }
        Ok(())
    }
}

/// The two contacts of the 1D device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contacts {
    /// Contact at `x = 0`.
    pub cathode: ContactParams,
    /// Contact at `x = L`.
    pub anode: ContactParams,
}

impl Contacts {
    pub fn validate(&self) -> Result<()> {
        self.cathode.validate("cathode")?;
        self.anode.validate("anode")
    }

    pub fn all_dirichlet(&self) -> bool {
        self.cathode.pins_n() && self.cathode.pins_p() && self.anode.pins_n() && self.anode.pins_p()
    }

    /// Potential drop `psi(L) - psi(0)`.
    pub fn voltage_drop(&self) -> f64 {
        self.anode.psi_d - self.cathode.psi_d
    }
}

/// Nodal fields of the full model.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub phi: Vec<f64>,
    pub n: Vec<f64>,
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    pub t: f64,
}

impl StateVector {
    pub fn zeros(nodes: usize) -> Self {
        Self {
            phi: vec![0.0; nodes],
            n: vec![0.0; nodes],
            p: vec![0.0; nodes],
            x: vec![0.0; nodes],
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn check_len(&self, nodes: usize) -> Result<()> {
        for (what, f) in [("phi", &self.phi), ("n", &self.n), ("p", &self.p), ("X", &self.x)] {
            if f.len() != nodes {
                return Err(Error::SizeMismatch {
                    what,
                    got: f.len(),
                    expected: nodes,
                });
            }
        }
        Ok(())
    }

    /// All densities strictly positive.
    pub fn is_positive(&self) -> bool {
        self.n.iter().chain(&self.p).chain(&self.x).all(|&v| v > 0.0)
    }

    /// Interleaved `[phi, n, p, X]` per node.
    pub fn to_interleaved(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(4 * self.len());
        for i in 0..self.len() {
            y.extend_from_slice(&[self.phi[i], self.n[i], self.p[i], self.x[i]]);
        }
        y
    }

    pub fn from_interleaved(y: &[f64], t: f64) -> Self {
        let nodes = y.len() / 4;
        let mut s = Self::zeros(nodes);
        for i in 0..nodes {
            s.phi[i] = y[4 * i];
            s.n[i] = y[4 * i + 1];
            s.p[i] = y[4 * i + 2];
            s.x[i] = y[4 * i + 3];
        }
        s.t = t;
        s
    }
}
