//! Stationary solve in Slotboom variables `n = n_r u exp(phi/Vth)`,
//! `p = n_r v exp(-phi/Vth)` with the pair density eliminated.

use super::stationary::{reference_density, StationaryBounds};
use crate::discretization::{bernoulli, compute_current, BandMatrix};
use crate::error::{Error, Result};
use crate::model::constants::Q;
use crate::model::{exciton_tau, StateVector};
use crate::solver::Device;

/// Potential and Slotboom densities on the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotboomState {
    pub phi: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub n_r: f64,
}

impl SlotboomState {
    pub fn from_densities(phi: &[f64], n: &[f64], p: &[f64], n_r: f64, vth: f64) -> Self {
        Self {
            phi: phi.to_vec(),
            u: n.iter().zip(phi).map(|(n, f)| n / n_r * (-f / vth).exp()).collect(),
            v: p.iter().zip(phi).map(|(p, f)| p / n_r * (f / vth).exp()).collect(),
            n_r,
        }
    }

    pub fn electrons(&self, vth: f64) -> Vec<f64> {
        self.u.iter().zip(&self.phi).map(|(u, f)| self.n_r * u * (f / vth).exp()).collect()
    }

    pub fn holes(&self, vth: f64) -> Vec<f64> {
        self.v.iter().zip(&self.phi).map(|(v, f)| self.n_r * v * (-f / vth).exp()).collect()
    }
}

/// Outer iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GummelOptions {
    /// Stop once `max |dphi| < tol_vth * Vth`.
    pub tol_vth: f64,
    pub max_outer: usize,
    pub max_poisson: usize,
}

impl Default for GummelOptions {
    fn default() -> Self {
        Self {
            tol_vth: 1e-7,
            max_outer: 200,
            max_poisson: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyReport {
    pub outer_iterations: usize,
    pub last_update: f64,
    pub within_bounds: bool,
    /// Terminal current (A/m^2).
    pub current: f64,
    pub current_variation: f64,
}

#[derive(Debug, Clone)]
pub struct SteadySolution {
    pub state: StateVector,
    pub slotboom: SlotboomState,
    pub bounds: StationaryBounds,
    pub report: SteadyReport,
}

/// Decoupled fixed point: nonlinear Poisson with `u, v` frozen, then the
/// linear `u` and `v` balances with `phi` frozen, until the potential
/// settles.
pub fn steady_solve(device: &Device, opts: &GummelOptions) -> Result<SteadySolution> {
    if !device.contacts.all_dirichlet() {
        return Err(Error::Domain("steady_solve needs Dirichlet contacts".into()));
    }
    if device.material.v_max.is_some() {
        return Err(Error::Domain("steady_solve does not support velocity saturation".into()));
    }
    let m = &device.material;
    let vth = m.thermal_voltage();
    let g = m.generation;
    let gamma = m.gamma();
    let kd_mean = m.kdiss(device.mean_field());
    let n_r = reference_density(g, kd_mean, m.k_rec, gamma, &device.contacts);
    let bounds = StationaryBounds::compute(&device.contacts, n_r, vth)?;

    let x = device.mesh.nodes();
    let nn = x.len();
    let l = device.mesh.length();
    let (c0, c1) = (&device.contacts.cathode, &device.contacts.anode);
    let slot = |c: &crate::model::ContactParams| {
        (
            c.n_d() / n_r * (-c.psi_d / vth).exp(),
            c.p_d() / n_r * (c.psi_d / vth).exp(),
        )
    };
    let (u0, v0) = slot(c0);
    let (u1, v1) = slot(c1);
    let mut st = SlotboomState {
        phi: x.iter().map(|xi| c0.psi_d + xi / l * (c1.psi_d - c0.psi_d)).collect(),
        u: x.iter().map(|xi| (u0.ln() + xi / l * (u1.ln() - u0.ln())).exp()).collect(),
        v: x.iter().map(|xi| (v0.ln() + xi / l * (v1.ln() - v0.ln())).exp()).collect(),
        n_r,
    };

    let mut update = f64::INFINITY;
    let mut outer = 0;
    while outer < opts.max_outer {
        outer += 1;
        let before = st.phi.clone();
        solve_poisson(device, &mut st, vth, opts)?;
        update = st.phi.iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let kd = node_kdiss(device, &st.phi);
        solve_carrier(device, &mut st, &kd, vth, true)?;
        solve_carrier(device, &mut st, &kd, vth, false)?;
        if update < opts.tol_vth * vth && outer > 1 {
            break;
        }
    }
    if !(update < opts.tol_vth * vth) {
        return Err(Error::OuterIterationFailed {
            iterations: outer,
            update,
        });
    }
    if st.u.iter().chain(&st.v).any(|&s| !(s > 0.0)) {
        return Err(Error::Domain("Slotboom densities lost positivity".into()));
    }

    let n = st.electrons(vth);
    let p = st.holes(vth);
    let kd = node_kdiss(device, &st.phi);
    let xs = (0..nn)
        .map(|i| {
            let tau = exciton_tau(kd[i], m.k_rec).expect("positive rates");
            tau * (g + gamma * n[i] * p[i])
        })
        .collect();
    let state = StateVector {
        phi: st.phi.clone(),
        n,
        p,
        x: xs,
        t: f64::INFINITY,
    };
    let profile = compute_current(&device.mesh, &state.phi, &state.n, &state.p, m, None);
    let report = SteadyReport {
        outer_iterations: outer,
        last_update: update,
        within_bounds: bounds.contains(&state),
        current: profile.contact,
        current_variation: profile.max_relative_variation(),
    };
    Ok(SteadySolution {
        state,
        slotboom: st,
        bounds,
        report,
    })
}

fn node_kdiss(device: &Device, phi: &[f64]) -> Vec<f64> {
    device.nodal_field(phi).into_iter().map(|e| device.material.kdiss(e)).collect()
}

fn solve_poisson(device: &Device, st: &mut SlotboomState, vth: f64, opts: &GummelOptions) -> Result<()> {
    let h = device.mesh.edges();
    let w = device.mesh.volumes();
    let nn = st.phi.len();
    let eps = device.material.permittivity();
    let (c0, c1) = (&device.contacts.cathode, &device.contacts.anode);
    st.phi[0] = c0.psi_d;
    st.phi[nn - 1] = c1.psi_d;
    for _ in 0..opts.max_poisson {
        let n = st.electrons(vth);
        let p = st.holes(vth);
        let mut jac = BandMatrix::zeros(nn, 1, 1);
        let mut rhs = vec![0.0; nn];
        jac.set(0, 0, 1.0);
        jac.set(nn - 1, nn - 1, 1.0);
        for i in 1..nn - 1 {
            let (a, b) = (eps / h[i - 1], eps / h[i]);
            let f = a * (st.phi[i] - st.phi[i - 1]) - b * (st.phi[i + 1] - st.phi[i]) - Q * w[i] * (p[i] - n[i]);
            rhs[i] = -f;
            if i > 1 {
                jac.set(i, i - 1, -a);
            }
            if i < nn - 2 {
                jac.set(i, i + 1, -b);
            }
            jac.set(i, i, a + b + Q * w[i] * (p[i] + n[i]) / vth);
        }
        let delta = jac.solve(&rhs)?;
        let mut largest: f64 = 0.0;
        for (f, d) in st.phi.iter_mut().zip(&delta) {
            // logarithmic damping of large corrections
            let step = d.signum() * vth * (d.abs() / vth).ln_1p();
            *f += step;
            largest = largest.max(d.abs());
        }
        if !largest.is_finite() {
            return Err(Error::Domain("non-finite potential update".into()));
        }
        if largest < 1e-3 * opts.tol_vth * vth {
            return Ok(());
        }
    }
    Ok(())
}

/// Linear balance for `u` (electrons) or `v` (holes):
/// `-(J_{i+1/2} - J_{i-1/2}) = w tau (k_diss G - gamma k_rec n_r^2 u v)`.
fn solve_carrier(device: &Device, st: &mut SlotboomState, kd: &[f64], vth: f64, electrons: bool) -> Result<()> {
    let m = &device.material;
    let h = device.mesh.edges();
    let w = device.mesh.volumes();
    let nn = st.phi.len();
    let gamma = m.gamma();
    let (mu, sign) = if electrons { (m.mu_n, 1.0) } else { (m.mu_p, -1.0) };
    let d = mu * vth;
    // edge conductances: J = c_e (s_{e+1} - s_e)
    let cond: Vec<f64> = (0..h.len())
        .map(|e| {
            let delta = (st.phi[e + 1] - st.phi[e]) / vth;
            d / h[e] * st.n_r * bernoulli(-sign * delta) * (sign * st.phi[e] / vth).exp()
        })
        .collect();
    let other = if electrons { &st.v } else { &st.u };
    let mut mat = BandMatrix::zeros(nn, 1, 1);
    let mut rhs = vec![0.0; nn];
    let (c0, c1) = (&device.contacts.cathode, &device.contacts.anode);
    let boundary = |c: &crate::model::ContactParams| {
        if electrons {
            c.n_d() / st.n_r * (-c.psi_d / vth).exp()
        } else {
            c.p_d() / st.n_r * (c.psi_d / vth).exp()
        }
    };
    mat.set(0, 0, 1.0);
    rhs[0] = boundary(c0);
    mat.set(nn - 1, nn - 1, 1.0);
    rhs[nn - 1] = boundary(c1);
    for i in 1..nn - 1 {
        let tau = exciton_tau(kd[i], m.k_rec)?;
        let sink = w[i] * tau * gamma * m.k_rec * st.n_r * st.n_r * other[i];
        rhs[i] = w[i] * tau * kd[i] * m.generation;
        // contact values go to the right-hand side so that pivoting cannot
        // perturb them
        if i == 1 {
            rhs[i] += cond[0] * rhs[0];
        } else {
            mat.set(i, i - 1, -cond[i - 1]);
        }
        if i == nn - 2 {
            rhs[i] += cond[i] * rhs[nn - 1];
        } else {
            mat.set(i, i + 1, -cond[i]);
        }
        mat.set(i, i, cond[i - 1] + cond[i] + sink);
    }
    let sol = mat.solve(&rhs)?;
    if electrons {
        st.u = sol;
    } else {
        st.v = sol;
    }
    Ok(())
}
