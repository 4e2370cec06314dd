use super::system::{DaeSystem, StepContext};
use crate::discretization::{sg_edge_flux, BandMatrix, Carrier, FluxJacobian, Mesh1D};
use crate::error::Result;
use crate::model::constants::Q;
use crate::model::{exciton_tau, xi, Contacts, MaterialParams, StateVector};

/// Mesh, material and contacts of one simulated device.
#[derive(Debug, Clone)]
pub struct Device {
    pub mesh: Mesh1D,
    pub material: MaterialParams,
    pub contacts: Contacts,
}

impl Device {
    pub fn new(mesh: Mesh1D, material: MaterialParams, contacts: Contacts) -> Result<Self> {
        material.validate()?;
        contacts.validate()?;
        Ok(Self {
            mesh,
            material,
            contacts,
        })
    }

    pub fn with_generation(&self, g: f64) -> Self {
        let mut d = self.clone();
        d.material.generation = g;
        d
    }

    /// `|psi(L) - psi(0)| / L`.
    pub fn mean_field(&self) -> f64 {
        self.contacts.voltage_drop().abs() / self.mesh.length()
    }

    /// Copy whose `gamma` and `k_diss` are pinned at the mean field.
    pub fn frozen(&self) -> Self {
        let mut d = self.clone();
        d.material = self.material.frozen_at(self.mean_field());
        d
    }

    /// Field magnitude at each node (central differences inside, one-sided
    /// at the contacts).
    pub fn nodal_field(&self, phi: &[f64]) -> Vec<f64> {
        let x = self.mesh.nodes();
        let n = x.len();
        (0..n)
            .map(|i| {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                ((phi[b] - phi[a]) / (x[b] - x[a])).abs()
            })
            .collect()
    }

    /// Edge field `E = -phi'` on every edge.
    pub fn edge_field(&self, phi: &[f64]) -> Vec<f64> {
        let h = self.mesh.edges();
        (0..h.len()).map(|e| -(phi[e + 1] - phi[e]) / h[e]).collect()
    }

    /// Linear potential and log-linear densities between the contact values,
    /// with `X` at its stationary value. Exact thermal equilibrium when the
    /// contact data are Boltzmann-consistent and the device is neutral.
    pub fn equilibrium_guess(&self) -> StateVector {
        let x = self.mesh.nodes();
        let l = self.mesh.length();
        let (c0, c1) = (&self.contacts.cathode, &self.contacts.anode);
        let mut s = StateVector::zeros(x.len());
        let gamma = self.material.gamma();
        for (i, &xi) in x.iter().enumerate() {
            let f = xi / l;
            s.phi[i] = c0.psi_d + f * (c1.psi_d - c0.psi_d);
            s.n[i] = (c0.n_d().ln() * (1.0 - f) + c1.n_d().ln() * f).exp();
            s.p[i] = (c0.p_d().ln() * (1.0 - f) + c1.p_d().ln() * f).exp();
        }
        let field = self.nodal_field(&s.phi);
        for i in 0..x.len() {
            let tau = exciton_tau(self.material.kdiss(field[i]), self.material.k_rec).expect("positive rates");
            s.x[i] = tau * (self.material.generation + gamma * s.n[i] * s.p[i]);
        }
        s
    }

    fn pins(&self, node: usize, carrier: Carrier) -> bool {
        let last = self.mesh.len() - 1;
        let c = if node == 0 {
            &self.contacts.cathode
        } else if node == last {
            &self.contacts.anode
        } else {
            return false;
        };
        match carrier {
            Carrier::Electron => c.pins_n(),
            Carrier::Hole => c.pins_p(),
        }
    }

    /// Whether the continuity row of `carrier` at `node` is a balance
    /// equation (as opposed to a pinned Dirichlet row).
    pub fn is_balance_row(&self, node: usize, carrier: Carrier) -> bool {
        !self.pins(node, carrier)
    }
}

/// Shared Poisson + carrier transport part of both models. Components 0, 1,
/// 2 are `phi`, `n`, `p`; `nc` is the number of components per node.
struct Transport<'a> {
    dev: &'a Device,
    nc: usize,
}

impl<'a> Transport<'a> {
    fn fluxes(&self, y: &[f64], carrier: Carrier) -> Vec<FluxJacobian> {
        let m = &self.dev.material;
        let vth = m.thermal_voltage();
        let h = self.dev.mesh.edges();
        let (comp, mu) = match carrier {
            Carrier::Electron => (1, m.mu_n),
            Carrier::Hole => (2, m.mu_p),
        };
        let nc = self.nc;
        (0..h.len())
            .map(|e| {
                sg_edge_flux(
                    y[nc * e + comp],
                    y[nc * (e + 1) + comp],
                    y[nc * e],
                    y[nc * (e + 1)],
                    mu,
                    vth,
                    h[e],
                    carrier,
                    m.v_max,
                )
            })
            .collect()
    }

    fn residual(&self, y: &[f64], ctx: &StepContext<'_>, out: &mut [f64], mut mag: Option<&mut [f64]>) {
        let dev = self.dev;
        let nc = self.nc;
        let nodes = dev.mesh.len();
        let h = dev.mesh.edges();
        let w = dev.mesh.volumes();
        let eps = dev.material.permittivity();
        let jn = self.fluxes(y, Carrier::Electron);
        let jp = self.fluxes(y, Carrier::Hole);
        let mut put = |k: usize, v: f64, m: f64| {
            out[k] = v;
            if let Some(mm) = mag.as_deref_mut() {
                mm[k] = m;
            }
        };
        for i in 0..nodes {
            let phi = y[nc * i];
            // Poisson
            if i == 0 || i == nodes - 1 {
                let psi = if i == 0 { dev.contacts.cathode.psi_d } else { dev.contacts.anode.psi_d };
                put(nc * i, phi - psi, phi.abs() + psi.abs());
            } else {
                let (l, r) = (y[nc * (i - 1)], y[nc * (i + 1)]);
                let (gl, gr) = (eps / h[i - 1], eps / h[i]);
                let (n, p) = (y[nc * i + 1], y[nc * i + 2]);
                let v = gl * (phi - l) + gr * (phi - r) - Q * w[i] * (p - n);
                let m = gl * (phi.abs() + l.abs()) + gr * (phi.abs() + r.abs()) + Q * w[i] * (p.abs() + n.abs());
                put(nc * i, v, m);
            }
            for (comp, carrier, flux) in [(1, Carrier::Electron, &jn), (2, Carrier::Hole, &jp)] {
                let k = nc * i + comp;
                let eta = y[k];
                let contact = if i == 0 {
                    Some(&dev.contacts.cathode)
                } else if i == nodes - 1 {
                    Some(&dev.contacts.anode)
                } else {
                    None
                };
                if !dev.is_balance_row(i, carrier) {
                    let c = contact.expect("pinned rows are contacts");
                    let target = match carrier {
                        Carrier::Electron => c.n_d(),
                        Carrier::Hole => c.p_d(),
                    };
                    put(k, eta - target, eta.abs() + target.abs());
                    continue;
                }
                let hist = ctx.history.map_or(0.0, |hs| hs[k]);
                let mut v = w[i] * (ctx.theta0 * eta + hist);
                let mut m = w[i] * ((ctx.theta0 * eta).abs() + hist.abs());
                let size = |f: &FluxJacobian, a: f64, b: f64| (f.flux.coeff_i * a).abs() + (f.flux.coeff_j * b).abs();
                if i + 1 < nodes {
                    v -= flux[i].flux.value;
                    m += size(&flux[i], eta, y[nc * (i + 1) + comp]);
                }
                if i > 0 {
                    v += flux[i - 1].flux.value;
                    m += size(&flux[i - 1], y[nc * (i - 1) + comp], eta);
                }
                if let Some(c) = contact {
                    let (kappa, alpha, beta) = match carrier {
                        Carrier::Electron => (c.kappa_n, c.alpha_n, c.beta_n),
                        Carrier::Hole => (c.kappa_p, c.alpha_p, c.beta_p),
                    };
                    v += (alpha * eta - beta) / kappa;
                    m += (alpha * eta).abs() / kappa + beta.abs() / kappa;
                }
                put(k, v, m);
            }
        }
    }

    fn jacobian(&self, y: &[f64], ctx: &StepContext<'_>, jac: &mut BandMatrix) {
        let dev = self.dev;
        let nc = self.nc;
        let nodes = dev.mesh.len();
        let h = dev.mesh.edges();
        let w = dev.mesh.volumes();
        let eps = dev.material.permittivity();
        let jn = self.fluxes(y, Carrier::Electron);
        let jp = self.fluxes(y, Carrier::Hole);
        for i in 0..nodes {
            let r = nc * i;
            if i == 0 || i == nodes - 1 {
                jac.add(r, r, 1.0);
            } else {
                let (gl, gr) = (eps / h[i - 1], eps / h[i]);
                jac.add(r, r - nc, -gl);
                jac.add(r, r, gl + gr);
                jac.add(r, r + nc, -gr);
                jac.add(r, r + 1, Q * w[i]);
                jac.add(r, r + 2, -Q * w[i]);
            }
            for (comp, carrier, flux) in [(1, Carrier::Electron, &jn), (2, Carrier::Hole, &jp)] {
                let k = r + comp;
                if !dev.is_balance_row(i, carrier) {
                    jac.add(k, k, 1.0);
                    continue;
                }
                jac.add(k, k, w[i] * ctx.theta0);
                if i + 1 < nodes {
                    let f = &flux[i];
                    jac.add(k, k, -f.flux.coeff_i);
                    jac.add(k, k + nc, -f.flux.coeff_j);
                    jac.add(k, r, -f.d_phi_i);
                    jac.add(k, r + nc, -f.d_phi_j);
                }
                if i > 0 {
                    let f = &flux[i - 1];
                    jac.add(k, k - nc, f.flux.coeff_i);
                    jac.add(k, k, f.flux.coeff_j);
                    jac.add(k, r - nc, f.d_phi_i);
                    jac.add(k, r, f.d_phi_j);
                }
                let contact = if i == 0 {
                    Some(&dev.contacts.cathode)
                } else if i == nodes - 1 {
                    Some(&dev.contacts.anode)
                } else {
                    None
                };
                if let Some(c) = contact {
                    let (kappa, alpha) = match carrier {
                        Carrier::Electron => (c.kappa_n, c.alpha_n),
                        Carrier::Hole => (c.kappa_p, c.alpha_p),
                    };
                    jac.add(k, k, alpha / kappa);
                }
            }
        }
    }
}

/// The coupled `phi, n, p, X` system with exciton kinetics.
#[derive(Debug, Clone)]
pub struct FullModel {
    pub device: Device,
}

impl FullModel {
    pub fn new(device: Device) -> Self {
        Self { device }
    }

    fn kdiss_nodes(&self, y: &[f64]) -> Vec<f64> {
        let m = &self.device.material;
        let nodes = self.device.mesh.len();
        if let Some(k) = m.kdiss_override {
            return vec![k; nodes];
        }
        let phi: Vec<f64> = (0..nodes).map(|i| y[4 * i]).collect();
        self.device.nodal_field(&phi).into_iter().map(|e| m.kdiss(e)).collect()
    }

    pub fn state_to_vec(&self, s: &StateVector) -> Vec<f64> {
        s.to_interleaved()
    }

    pub fn vec_to_state(&self, y: &[f64], t: f64) -> StateVector {
        StateVector::from_interleaved(y, t)
    }
}

impl DaeSystem for FullModel {
    fn components(&self) -> usize {
        4
    }

    fn nodes(&self) -> usize {
        self.device.mesh.len()
    }

    fn is_differential(&self, c: usize) -> bool {
        c != 0
    }

    fn is_density(&self, c: usize) -> bool {
        c != 0
    }

    fn residual(&self, y: &[f64], ctx: &StepContext<'_>, out: &mut [f64], mut mag: Option<&mut [f64]>) {
        Transport { dev: &self.device, nc: 4 }.residual(y, ctx, out, mag.as_deref_mut());
        let m = &self.device.material;
        let gamma = m.gamma();
        let g = m.generation;
        let w = self.device.mesh.volumes();
        let kd = self.kdiss_nodes(y);
        for i in 0..self.nodes() {
            let (n, p, x) = (y[4 * i + 1], y[4 * i + 2], y[4 * i + 3]);
            let diss = kd[i] * x;
            let bimol = gamma * n * p;
            for (comp, carrier) in [(1, Carrier::Electron), (2, Carrier::Hole)] {
                if self.device.is_balance_row(i, carrier) {
                    out[4 * i + comp] -= w[i] * (diss - bimol);
                    if let Some(mm) = mag.as_deref_mut() {
                        mm[4 * i + comp] += w[i] * (diss.abs() + bimol.abs());
                    }
                }
            }
            let k = 4 * i + 3;
            let hist = ctx.history.map_or(0.0, |hs| hs[k]);
            let loss = (kd[i] + m.k_rec) * x;
            out[k] = w[i] * (ctx.theta0 * x + hist - (g + bimol - loss));
            if let Some(mm) = mag.as_deref_mut() {
                mm[k] = w[i] * ((ctx.theta0 * x).abs() + hist.abs() + g + bimol.abs() + loss.abs());
            }
        }
    }

    fn jacobian(&self, y: &[f64], ctx: &StepContext<'_>, jac: &mut BandMatrix) {
        jac.clear();
        Transport { dev: &self.device, nc: 4 }.jacobian(y, ctx, jac);
        let m = &self.device.material;
        let gamma = m.gamma();
        let w = self.device.mesh.volumes();
        let kd = self.kdiss_nodes(y);
        for i in 0..self.nodes() {
            let r = 4 * i;
            let (n, p) = (y[r + 1], y[r + 2]);
            for (comp, carrier) in [(1, Carrier::Electron), (2, Carrier::Hole)] {
                if self.device.is_balance_row(i, carrier) {
                    let k = r + comp;
                    jac.add(k, r + 1, w[i] * gamma * p);
                    jac.add(k, r + 2, w[i] * gamma * n);
                    jac.add(k, r + 3, -w[i] * kd[i]);
                }
            }
            let k = r + 3;
            jac.add(k, r + 1, -w[i] * gamma * p);
            jac.add(k, r + 2, -w[i] * gamma * n);
            jac.add(k, k, w[i] * (ctx.theta0 + kd[i] + m.k_rec));
        }
    }
}

/// Two-carrier model with the exciton density eliminated and the memory
/// integral lumped; coefficients depend explicitly on the time since the
/// light was switched on.
#[derive(Debug, Clone)]
pub struct ReducedModel {
    pub device: Device,
    pub kdiss: f64,
    pub gamma: f64,
    pub tau: f64,
    /// Pair density at `t = 0`.
    pub x0: Vec<f64>,
    /// `p n` at `t = 0`.
    pub np0: Vec<f64>,
}

impl ReducedModel {
    /// Coefficients are frozen at the mean field unless the device already
    /// has constant ones.
    pub fn new(device: &Device, initial: &StateVector) -> Self {
        let device = if device.material.has_constant_coefficients() {
            device.clone()
        } else {
            device.frozen()
        };
        let kdiss = device.material.kdiss(device.mean_field());
        let gamma = device.material.gamma();
        let tau = exciton_tau(kdiss, device.material.k_rec).expect("positive rates");
        let np0 = initial.n.iter().zip(&initial.p).map(|(n, p)| n * p).collect();
        Self {
            device,
            kdiss,
            gamma,
            tau,
            x0: initial.x.clone(),
            np0,
        }
    }

    /// `(G~, r)` at node `i`, where the recombination term is `r p n`.
    pub fn rates(&self, t: f64, i: usize) -> (f64, f64) {
        modified_rates_at(t, self.x0[i], self.np0[i], self.device.material.generation, self.kdiss, self.device.material.k_rec, self.gamma)
    }

    /// Pair density implied by the lumped memory term.
    pub fn reconstruct_x(&self, t: f64, n: &[f64], p: &[f64]) -> Vec<f64> {
        let g = self.device.material.generation;
        let decay = (-t / self.tau).exp();
        (0..n.len())
            .map(|i| {
                let np = n[i] * p[i];
                xi(t, self.x0[i], g, self.tau)
                    + self.gamma * 0.5 * t * decay * (self.np0[i] - np)
                    + self.gamma * self.tau * (-(-t / self.tau).exp_m1()) * np
            })
            .collect()
    }

    pub fn to_vec(s: &StateVector) -> Vec<f64> {
        let mut y = Vec::with_capacity(3 * s.len());
        for i in 0..s.len() {
            y.extend_from_slice(&[s.phi[i], s.n[i], s.p[i]]);
        }
        y
    }

    pub fn to_state(&self, y: &[f64], t: f64) -> StateVector {
        let nodes = y.len() / 3;
        let mut s = StateVector::zeros(nodes);
        for i in 0..nodes {
            s.phi[i] = y[3 * i];
            s.n[i] = y[3 * i + 1];
            s.p[i] = y[3 * i + 2];
        }
        s.x = self.reconstruct_x(t, &s.n, &s.p);
        s.t = t;
        s
    }
}

/// Modified generation `G~` and the recombination prefactor `r` such that
/// the net rate is `G~ - r p n`.
pub(crate) fn modified_rates_at(t: f64, x0: f64, np0: f64, g: f64, kdiss: f64, k_rec: f64, gamma: f64) -> (f64, f64) {
    let tau = 1.0 / (kdiss + k_rec);
    let decay = (-t / tau).exp();
    let lump = 0.5 * t * decay;
    let gen = kdiss * xi(t, x0, g, tau) + gamma * kdiss * lump * np0;
    let rec = gamma * (tau * (k_rec + kdiss * decay) + kdiss * lump);
    (gen, rec)
}

impl DaeSystem for ReducedModel {
    fn components(&self) -> usize {
        3
    }

    fn nodes(&self) -> usize {
        self.device.mesh.len()
    }

    fn is_differential(&self, c: usize) -> bool {
        c != 0
    }

    fn is_density(&self, c: usize) -> bool {
        c != 0
    }

    fn residual(&self, y: &[f64], ctx: &StepContext<'_>, out: &mut [f64], mut mag: Option<&mut [f64]>) {
        Transport { dev: &self.device, nc: 3 }.residual(y, ctx, out, mag.as_deref_mut());
        let w = self.device.mesh.volumes();
        for i in 0..self.nodes() {
            let (gen, rec) = self.rates(ctx.t, i);
            let loss = rec * y[3 * i + 1] * y[3 * i + 2];
            for (comp, carrier) in [(1, Carrier::Electron), (2, Carrier::Hole)] {
                if self.device.is_balance_row(i, carrier) {
                    out[3 * i + comp] -= w[i] * (gen - loss);
                    if let Some(mm) = mag.as_deref_mut() {
                        mm[3 * i + comp] += w[i] * (gen.abs() + loss.abs());
                    }
                }
            }
        }
    }

    fn jacobian(&self, y: &[f64], ctx: &StepContext<'_>, jac: &mut BandMatrix) {
        jac.clear();
        Transport { dev: &self.device, nc: 3 }.jacobian(y, ctx, jac);
        let w = self.device.mesh.volumes();
        for i in 0..self.nodes() {
            let r = 3 * i;
            let (_, rec) = self.rates(ctx.t, i);
            let (n, p) = (y[r + 1], y[r + 2]);
            for (comp, carrier) in [(1, Carrier::Electron), (2, Carrier::Hole)] {
                if self.device.is_balance_row(i, carrier) {
                    jac.add(r + comp, r + 1, w[i] * rec * p);
                    jac.add(r + comp, r + 2, w[i] * rec * n);
                }
            }
        }
    }
}
