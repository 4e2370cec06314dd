use std::f64::consts::PI;

use super::constants::{KB, Q};
use super::params::MaterialParams;
use crate::error::{Error, Result};

/// Relative size of the last retained term of the field-enhancement series.
pub const KDISS_SERIES_RTOL: f64 = 1e-12;

/// `kB T / q`.
pub fn thermal_voltage(temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("temperature must be > 0, got {temperature}")));
    }
    Ok(KB * temperature / Q)
}

/// Einstein relation `D = Vth * mu`.
pub fn einstein_diffusion(mu: f64, vth: f64) -> Result<f64> {
    if !(mu > 0.0 && vth > 0.0) {
        return Err(Error::Domain(format!(
            "mobility and thermal voltage must be > 0 (mu = {mu}, Vth = {vth})"
        )));
    }
    Ok(vth * mu)
}

/// Langevin bimolecular coefficient `q (mu_n + mu_p) / eps`.
pub fn langevin_gamma(mu_n: f64, mu_p: f64, eps: f64) -> Result<f64> {
    if !(mu_n > 0.0 && mu_p > 0.0 && eps > 0.0) {
        return Err(Error::Domain(format!(
            "mobilities and permittivity must be > 0 (mu_n = {mu_n}, mu_p = {mu_p}, eps = {eps})"
        )));
    }
    Ok(Q * (mu_n + mu_p) / eps)
}

/// Field-enhancement factor `J1(2 sqrt(-2b)) / sqrt(-2b)` written as the
/// entire series `sum_k (2b)^k / (k! (k+1)!)`.
pub fn braun_series(b: f64) -> f64 {
    let x = 2.0 * b;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= x / (k * (k + 1.0));
        sum += term;
        if term.abs() <= KDISS_SERIES_RTOL * sum.abs() || k > 10_000.0 {
            break;
        }
    }
    sum
}

/// Braun's extension of Onsager's geminate dissociation rate.
///
/// `k(E) = 3 gamma / (4 pi a^3) * exp(-E_B / kT) * S(b)` with binding energy
/// `E_B = q^2 / (4 pi eps a)` and reduced field `b = q^3 E / (8 pi eps kB^2 T^2)`.
/// Returns the constant override when one is configured.
pub fn braun_onsager_kdiss(e_mag: f64, params: &MaterialParams, gamma: f64) -> f64 {
    if let Some(k) = params.kdiss_override {
        return k;
    }
    let eps = params.permittivity();
    let a = params.pair_distance;
    let kt = KB * params.temperature;
    let binding = Q * Q / (4.0 * PI * eps * a);
    let b = Q.powi(3) * e_mag.abs() / (8.0 * PI * eps * kt * kt);
    3.0 * gamma / (4.0 * PI * a.powi(3)) * (-binding / kt).exp() * braun_series(b)
}

/// Response time `1 / (k_diss + k_rec)`.
pub fn exciton_tau(k_diss: f64, k_rec: f64) -> Result<f64> {
    let total = k_diss + k_rec;
    if !(total > 0.0) || k_diss < 0.0 || k_rec < 0.0 {
        return Err(Error::Domain(format!(
            "rates must be >= 0 with positive sum (k_diss = {k_diss}, k_rec = {k_rec})"
        )));
    }
    Ok(1.0 / total)
}

/// Pair density driven by generation alone:
/// `X0 exp(-t/tau) + tau G (1 - exp(-t/tau))`.
pub fn xi(t: f64, x0: f64, g: f64, tau: f64) -> f64 {
    let decay = (-t / tau).exp();
    x0 * decay + tau * g * (-(-t / tau).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::constants::EPS0;
    use approx::assert_relative_eq;

    fn material() -> MaterialParams {
        MaterialParams {
            mu_n: 2e-8,
            mu_p: 2e-8,
            eps_r: 4.0,
            temperature: 300.0,
            k_rec: 1e5,
            pair_distance: 1.5e-9,
            generation: 0.0,
            gamma_override: None,
            kdiss_override: None,
            v_max: None,
        }
    }

    // Straight factorial sum with a fixed, generous term count.
    fn series_oracle(b: f64) -> f64 {
        let mut s = 0.0;
        let mut fact_k = 1.0;
        for k in 0..80 {
            if k > 0 {
                fact_k *= k as f64;
            }
            let fact_k1 = fact_k * (k as f64 + 1.0);
            s += (2.0 * b).powi(k) / (fact_k * fact_k1);
        }
        s
    }

    #[test]
    fn thermal_voltage_values() {
        assert_relative_eq!(thermal_voltage(300.0).unwrap(), 0.025852, max_relative = 1e-5);
        assert_relative_eq!(
            thermal_voltage(600.0).unwrap(),
            2.0 * thermal_voltage(300.0).unwrap(),
            max_relative = 1e-15
        );
        assert!(thermal_voltage(0.0).is_err());
        assert!(thermal_voltage(-3.0).is_err());
    }

    #[test]
    fn einstein_values() {
        assert_relative_eq!(einstein_diffusion(2e-8, 0.025852).unwrap(), 5.1704e-10, max_relative = 1e-12);
        assert!(einstein_diffusion(0.0, 0.025852).is_err());
        let d1 = einstein_diffusion(1e-8, 0.02).unwrap();
        let d2 = einstein_diffusion(2e-8, 0.02).unwrap();
        assert_relative_eq!(d2, 2.0 * d1, max_relative = 1e-15);
    }

    #[test]
    fn langevin_values() {
        let g = langevin_gamma(2e-8, 2e-8, 4.0 * EPS0).unwrap();
        assert_relative_eq!(g, 1.809e-16, max_relative = 1e-3);
        assert!(langevin_gamma(0.0, 0.0, 4.0 * EPS0).is_err());
        let g2 = langevin_gamma(4e-8, 4e-8, 4.0 * EPS0).unwrap();
        assert_relative_eq!(g2, 2.0 * g, max_relative = 1e-15);
    }

    #[test]
    fn kdiss_zero_field_and_binding_energy() {
        let m = material();
        let gamma = m.gamma();
        let eps = m.permittivity();
        let a = m.pair_distance;
        let binding = Q * Q / (4.0 * PI * eps * a);
        assert_relative_eq!(binding / Q, 0.2401, max_relative = 1e-3);
        let expect = 3.0 * gamma / (4.0 * PI * a.powi(3)) * (-binding / (KB * 300.0)).exp();
        assert_relative_eq!(braun_onsager_kdiss(0.0, &m, gamma), expect, max_relative = 1e-15);
    }

    #[test]
    fn kdiss_series_matches_oracle_and_increases() {
        let m = material();
        let gamma = m.gamma();
        for &b in &[0.0, 0.1, 1.0, 1.9237, 5.0, 20.0] {
            assert_relative_eq!(braun_series(b), series_oracle(b), max_relative = 1e-11);
        }
        let fields = [1e4, 1e5, 1e6, 3e6, 7.142857e6, 1e7, 3e7];
        let mut last = braun_onsager_kdiss(0.0, &m, gamma);
        for e in fields {
            let k = braun_onsager_kdiss(e, &m, gamma);
            assert!(k > last, "not increasing at E = {e}");
            last = k;
        }
        // continuity at zero field
        let k0 = braun_onsager_kdiss(0.0, &m, gamma);
        assert_relative_eq!(braun_onsager_kdiss(1e-3, &m, gamma), k0, max_relative = 1e-9);
    }

    #[test]
    fn kdiss_override_is_returned() {
        let m = MaterialParams {
            kdiss_override: Some(4.4e5),
            ..material()
        };
        assert_eq!(braun_onsager_kdiss(1e7, &m, 1.0), 4.4e5);
    }

    #[test]
    fn tau_values() {
        assert_relative_eq!(exciton_tau(4.4e5, 1e5).unwrap(), 1.0 / 5.4e5, max_relative = 1e-15);
        assert_relative_eq!(exciton_tau(4.4e5, 1e5).unwrap(), 1.8519e-6, max_relative = 1e-4);
        assert_relative_eq!(exciton_tau(0.0, 3e6).unwrap(), 1.0 / 3e6, max_relative = 1e-15);
        assert_relative_eq!(
            exciton_tau(8e5, 2e5).unwrap(),
            0.5 * exciton_tau(4e5, 1e5).unwrap(),
            max_relative = 1e-15
        );
        assert!(exciton_tau(0.0, 0.0).is_err());
    }

    #[test]
    fn xi_values() {
        let (g, tau) = (4.3e28, 1.8e-6);
        assert_eq!(xi(0.0, 7.0e15, g, tau), 7.0e15);
        assert_relative_eq!(xi(1e3, 7.0e15, g, tau), tau * g, max_relative = 1e-12);
        assert_relative_eq!(xi(tau, 0.0, g, tau), 0.63212 * tau * g, max_relative = 1e-5);
    }

    #[test]
    fn xi_satisfies_its_ode() {
        let (g, tau, x0) = (1e28, 2e-6, 5e22);
        for &t in &[1e-7, 1e-6, 5e-6] {
            let h = 1e-6 * t;
            let deriv = (xi(t + h, x0, g, tau) - xi(t - h, x0, g, tau)) / (2.0 * h);
            let rhs = g - xi(t, x0, g, tau) / tau;
            assert_relative_eq!(deriv, rhs, max_relative = 1e-6);
        }
    }

    proptest::proptest! {
        #[test]
        fn xi_stays_between_endpoints(t in 0.0f64..1e-4, x0 in 0.0f64..1e23, tau in 1e-8f64..1e-5) {
            let g = 1e28;
            let v = xi(t, x0, g, tau);
            let (lo, hi) = if x0 < tau * g { (x0, tau * g) } else { (tau * g, x0) };
            proptest::prop_assert!(v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12));
        }

        #[test]
        fn constitutive_outputs_positive(mu in 1e-10f64..1e-6, e in 0.0f64..1e8) {
            let m = MaterialParams { mu_n: mu, mu_p: mu, ..material() };
            proptest::prop_assert!(m.gamma() > 0.0);
            proptest::prop_assert!(m.kdiss(e) > 0.0);
            proptest::prop_assert!(m.diffusivity_n() > 0.0);
        }
    }
}
