//! Exponentially fitted edge fluxes.
//!
//! With the sign convention `J_n = D n' - mu n phi'` and
//! `J_p = D p' + mu p phi'` the Scharfetter-Gummel fluxes on an edge
//! `(i, j)` of length `h` are
//!
//! ```text
//! J_n = D/h [ B(d) n_j - B(-d) n_i ],   J_p = D/h [ B(-d) p_j - B(d) p_i ]
//! ```
//!
//! with `d = (phi_j - phi_i) / Vth`. Both vanish on the discrete
//! Boltzmann equilibria `n ~ exp(phi/Vth)`, `p ~ exp(-phi/Vth)`.

use super::assembly::Carrier;

const SMALL: f64 = 1e-4;

/// `B(x) = x / (exp(x) - 1)`.
pub fn bernoulli(x: f64) -> f64 {
    if x.abs() < SMALL {
        let x2 = x * x;
        1.0 - 0.5 * x + x2 / 12.0 * (1.0 - x2 / 60.0)
    } else if x > 0.0 {
        // exp(-x) factored form, no overflow
        x * (-x).exp() / (-(-x).exp_m1())
    } else {
        x / x.exp_m1()
    }
}

/// `dB/dx`.
pub fn bernoulli_derivative(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        -0.5 + x / 6.0 - x.powi(3) / 180.0
    } else {
        let b = bernoulli(x);
        b * ((1.0 - b) / x - 1.0)
    }
}

/// One edge flux, linear in the two nodal densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFlux {
    pub value: f64,
    /// Coefficient multiplying the density at node `i`.
    pub coeff_i: f64,
    /// Coefficient multiplying the density at node `j`.
    pub coeff_j: f64,
}

/// Partial derivatives of an edge flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxJacobian {
    pub flux: EdgeFlux,
    pub d_phi_i: f64,
    pub d_phi_j: f64,
}

/// Scharfetter-Gummel flux from node `i` to node `j`. With `v_max` set the
/// potential difference entering the exponential is clamped so that the
/// drift speed `mu |E|` never exceeds `v_max`.
#[allow(clippy::too_many_arguments)]
pub fn sg_edge_flux(
    eta_i: f64,
    eta_j: f64,
    phi_i: f64,
    phi_j: f64,
    mu: f64,
    vth: f64,
    h: f64,
    carrier: Carrier,
    v_max: Option<f64>,
) -> FluxJacobian {
    let diff = mu * vth / h;
    let mut dphi = phi_j - phi_i;
    let mut clamped = false;
    if let Some(vm) = v_max {
        let limit = vm * h / mu;
        if dphi.abs() > limit {
            dphi = limit.copysign(dphi);
            clamped = true;
        }
    }
    let d = dphi / vth;
    let (bp, bm) = (bernoulli(d), bernoulli(-d));
    let (coeff_i, coeff_j) = match carrier {
        Carrier::Electron => (-diff * bm, diff * bp),
        Carrier::Hole => (-diff * bp, diff * bm),
    };
    let value = coeff_i * eta_i + coeff_j * eta_j;
    let d_phi_j = if clamped {
        0.0
    } else {
        let (dbp, dbm) = (bernoulli_derivative(d), bernoulli_derivative(-d));
        match carrier {
            Carrier::Electron => diff * (dbp * eta_j + dbm * eta_i) / vth,
            Carrier::Hole => -diff * (dbm * eta_j + dbp * eta_i) / vth,
        }
    };
    FluxJacobian {
        flux: EdgeFlux {
            value,
            coeff_i,
            coeff_j,
        },
        d_phi_i: -d_phi_j,
        d_phi_j,
    }
}
