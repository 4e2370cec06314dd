use crate::error::{Error, Result};
use crate::model::{Contacts, StateVector};

/// Stationary pair density `X = tau G + gamma tau p n`.
pub fn stationary_x(n: &[f64], p: &[f64], g: f64, gamma: f64, tau: f64) -> Vec<f64> {
    n.iter().zip(p).map(|(n, p)| tau * g + gamma * tau * p * n).collect()
}

/// Net stationary rate `tau (k_diss G - gamma k_rec p n)`, shared by both
/// carriers.
pub fn stationary_rates(n: &[f64], p: &[f64], g: f64, kdiss: f64, k_rec: f64, gamma: f64) -> Vec<f64> {
    let tau = 1.0 / (kdiss + k_rec);
    n.iter().zip(p).map(|(n, p)| tau * (kdiss * g - gamma * k_rec * p * n)).collect()
}

/// Reference density `n_r`: `gamma k_rec n_r^2 = k_diss G` under
/// illumination, `sqrt(n_D p_D)` of the first contact in the dark.
pub fn reference_density(g: f64, kdiss: f64, k_rec: f64, gamma: f64, contacts: &Contacts) -> f64 {
    if g > 0.0 {
        (kdiss * g / (gamma * k_rec)).sqrt()
    } else {
        (contacts.cathode.n_d() * contacts.cathode.p_d()).sqrt()
    }
}

/// A priori bounds on a stationary solution with Dirichlet data.
///
/// The density bounds are `n_r exp(-/+ psi_hat / Vth)` and the potential
/// bounds `min(inf psi_D, -psi_plus)`, `max(sup psi_D, psi_plus)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryBounds {
    pub density_lower: f64,
    pub density_upper: f64,
    pub potential_lower: f64,
    pub potential_upper: f64,
    pub psi_plus: f64,
    pub psi_hat: f64,
    /// Electron quasi-Fermi data at (cathode, anode).
    pub phi_n_d: [f64; 2],
    /// Hole quasi-Fermi data at (cathode, anode).
    pub phi_p_d: [f64; 2],
    pub n_r: f64,
}

impl StationaryBounds {
    pub fn compute(contacts: &Contacts, n_r: f64, vth: f64) -> Result<Self> {
        if !(n_r > 0.0) {
            return Err(Error::Domain(format!("reference density must be > 0, got {n_r}")));
        }
        let cs = [&contacts.cathode, &contacts.anode];
        let phi_n_d = cs.map(|c| c.psi_d - vth * (c.n_d() / n_r).ln());
        let phi_p_d = cs.map(|c| c.psi_d + vth * (c.p_d() / n_r).ln());
        let sup = (-phi_n_d[0]).max(-phi_n_d[1]).max(phi_p_d[0].max(phi_p_d[1]));
        let inf = (-phi_n_d[0]).min(-phi_n_d[1]).min(phi_p_d[0].min(phi_p_d[1]));
        let psi_plus = sup.max(-inf);
        let psi_sup = cs.iter().map(|c| c.psi_d).fold(f64::NEG_INFINITY, f64::max);
        let psi_inf = cs.iter().map(|c| c.psi_d).fold(f64::INFINITY, f64::min);
        let psi_abs = cs.iter().map(|c| c.psi_d.abs()).fold(0.0, f64::max);
        let psi_hat = psi_abs + psi_plus;
        Ok(Self {
            density_lower: n_r * (-psi_hat / vth).exp(),
            density_upper: n_r * (psi_hat / vth).exp(),
            potential_lower: psi_inf.min(-psi_plus),
            potential_upper: psi_sup.max(psi_plus),
            psi_plus,
            psi_hat,
            phi_n_d,
            phi_p_d,
            n_r,
        })
    }

    /// Slotboom boundary values lie in `[exp(-psi+/Vth), exp(psi+/Vth)]`.
    pub fn slotboom_data_within(&self, contacts: &Contacts, vth: f64) -> bool {
        let (lo, hi) = ((-self.psi_plus / vth).exp(), (self.psi_plus / vth).exp());
        let tol = 1e-12;
        [&contacts.cathode, &contacts.anode].iter().all(|c| {
            let u = c.n_d() / self.n_r * (-c.psi_d / vth).exp();
            let v = c.p_d() / self.n_r * (c.psi_d / vth).exp();
            [u, v].iter().all(|&s| s >= lo * (1.0 - tol) && s <= hi * (1.0 + tol))
        })
    }

    /// Nodewise containment of densities and potential.
    pub fn contains(&self, s: &StateVector) -> bool {
        let rel = 1e-9;
        let dens_ok = s
            .n
            .iter()
            .chain(&s.p)
            .all(|&d| d >= self.density_lower * (1.0 - rel) && d <= self.density_upper * (1.0 + rel));
        let span = (self.potential_upper - self.potential_lower).abs().max(1e-300);
        let pot_ok = s
            .phi
            .iter()
            .all(|&v| v >= self.potential_lower - rel * span && v <= self.potential_upper + rel * span);
        dens_ok && pot_ok
    }

    /// Text block for run logs.
    pub fn report(&self) -> String {
        format!(
            "n_r = {:.6e} m^-3\npsi_plus = {:.6e} V\npsi_hat = {:.6e} V\nphi_nD = [{:.6e}, {:.6e}] V\nphi_pD = [{:.6e}, {:.6e}] V\ndensity bounds = [{:.6e}, {:.6e}] m^-3\npotential bounds = [{:.6e}, {:.6e}] V\n",
            self.n_r,
            self.psi_plus,
            self.psi_hat,
            self.phi_n_d[0],
            self.phi_n_d[1],
            self.phi_p_d[0],
            self.phi_p_d[1],
            self.density_lower,
            self.density_upper,
            self.potential_lower,
            self.potential_upper
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ContactParams;
    use approx::assert_relative_eq;

    #[test]
    fn pair_density_cases() {
        let x = stationary_x(&[0.0], &[0.0], 1e28, 1e-16, 1e-7);
        assert_relative_eq!(x[0], 1e21);
        let x = stationary_x(&[3e20], &[3e20], 0.0, 1e-16, 1e-7);
        assert_relative_eq!(x[0], 1e-16 * 1e-7 * 9e40);
    }

    #[test]
    fn rate_vanishes_at_balance_product() {
        let (kd, kr, g, gamma): (f64, f64, f64, f64) = (5e6, 1e6, 4.3e28, 1.8e-16);
        let np = kd * g / (gamma * kr);
        let u = stationary_rates(&[np.sqrt()], &[np.sqrt()], g, kd, kr, gamma);
        assert!(u[0].abs() < 1e-12 * kd * g / (kd + kr));
        let u = stationary_rates(&[1e20], &[2e20], 0.0, kd, kr, gamma);
        assert!(u[0] < 0.0);
    }

    #[test]
    fn slotboom_rate_form() {
        // U = tau k_diss G (1 - u v) with n_r from the normalisation
        let (kd, kr, g, gamma): (f64, f64, f64, f64) = (5e6, 1e6, 4.3e28, 1.8e-16);
        let dummy = Contacts {
            cathode: ContactParams::dirichlet(1.0, 1.0, 0.0),
            anode: ContactParams::dirichlet(1.0, 1.0, 0.0),
        };
        let nr = reference_density(g, kd, kr, gamma, &dummy);
        let (u, v, phi, vth): (f64, f64, f64, f64) = (0.3, 1.7, 0.1, 0.025852);
        let n = nr * u * (phi / vth).exp();
        let p = nr * v * (-phi / vth).exp();
        let rate = stationary_rates(&[n], &[p], g, kd, kr, gamma)[0];
        let tau = 1.0 / (kd + kr);
        assert_relative_eq!(rate, tau * kd * g * (1.0 - u * v), max_relative = 1e-12);
        assert_relative_eq!(reference_density(0.0, kd, kr, gamma, &dummy), 1.0);
    }

    #[test]
    fn bounds_contain_boundary_data() {
        let vth = 0.025852;
        let contacts = Contacts {
            cathode: ContactParams::dirichlet(4e12, 1e21, 0.0),
            anode: ContactParams::dirichlet(1e21, 4e12, 0.5),
        };
        let b = StationaryBounds::compute(&contacts, 3e22, vth).unwrap();
        assert!(b.density_lower <= b.density_upper);
        assert!(b.potential_lower <= b.potential_upper);
        assert!(b.slotboom_data_within(&contacts, vth));
        assert!(b.potential_lower <= 0.0 && b.potential_upper >= 0.5);
        assert!(b.density_lower <= 4e12 && b.density_upper >= 1e21);
        assert!(b.report().contains("psi_plus"));
        assert!(StationaryBounds::compute(&contacts, 0.0, vth).is_err());
    }
}
