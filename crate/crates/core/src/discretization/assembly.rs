use super::banded::BandMatrix;
use super::flux::sg_edge_flux;
use super::mesh::Mesh1D;
use crate::error::{Error, Result};
use crate::model::constants::Q;
use crate::model::{ContactParams, Contacts};

/// Which carrier a continuity equation describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    Electron,
    Hole,
}

/// Assembled scalar problem `A u = b` on the mesh.
#[derive(Debug, Clone)]
pub struct BandedSystem {
    pub matrix: BandMatrix,
    pub rhs: Vec<f64>,
}

impl BandedSystem {
    pub fn solve(&self) -> Result<Vec<f64>> {
        self.matrix.solve(&self.rhs)
    }

    /// `A u - b`.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        self.matrix
            .mul_vec(u)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| a - b)
            .collect()
    }
}

fn check(what: &'static str, f: &[f64], nodes: usize) -> Result<()> {
    if f.len() != nodes {
        return Err(Error::SizeMismatch {
            what,
            got: f.len(),
            expected: nodes,
        });
    }
    Ok(())
}

/// Linear Poisson problem `-(eps phi')' = q (p - n)` for fixed carrier
/// densities, with `phi = psi_D` at both contacts.
pub fn assemble_poisson(
    mesh: &Mesh1D,
    n: &[f64],
    p: &[f64],
    contacts: &Contacts,
    eps: f64,
) -> Result<BandedSystem> {
    let nodes = mesh.len();
    check("n", n, nodes)?;
    check("p", p, nodes)?;
    let h = mesh.edges();
    let w = mesh.volumes();
    let mut a = BandMatrix::zeros(nodes, 1, 1);
    let mut rhs = vec![0.0; nodes];
    for i in 1..nodes - 1 {
        let (gl, gr) = (eps / h[i - 1], eps / h[i]);
        a.set(i, i - 1, -gl);
        a.set(i, i, gl + gr);
        a.set(i, i + 1, -gr);
        rhs[i] = Q * w[i] * (p[i] - n[i]);
    }
    a.set(0, 0, 1.0);
    rhs[0] = contacts.cathode.psi_d;
    a.set(nodes - 1, nodes - 1, 1.0);
    rhs[nodes - 1] = contacts.anode.psi_d;
    Ok(BandedSystem { matrix: a, rhs })
}

/// Data for one linear continuity solve.
#[derive(Debug, Clone, Copy)]
pub struct ContinuityInputs<'a> {
    pub phi: &'a [f64],
    pub carrier: Carrier,
    pub mobility: f64,
    pub vth: f64,
    /// Nodal linear reaction coefficient `R` (1/s), must be >= 0.
    pub reaction: &'a [f64],
    /// Nodal source `S` (1/m^3/s).
    pub source: &'a [f64],
    /// Leading time-difference coefficient (0 for a stationary solve).
    pub theta0: f64,
    /// `sum_{k>=1} theta_k eta_{K-k}` at each node, if any.
    pub history_sum: Option<&'a [f64]>,
    pub v_max: Option<f64>,
}

/// Assemble `theta0 eta - div J(eta) + R eta = S - history` with
/// Scharfetter-Gummel fluxes, integrated over nodal control volumes.
/// Robin contacts enter through the boundary flux
/// `kappa J.nu = beta - alpha eta`; pinned contacts become identity rows.
pub fn assemble_continuity(
    mesh: &Mesh1D,
    inputs: &ContinuityInputs<'_>,
    contacts: &Contacts,
) -> Result<BandedSystem> {
    let nodes = mesh.len();
    check("phi", inputs.phi, nodes)?;
    check("reaction", inputs.reaction, nodes)?;
    check("source", inputs.source, nodes)?;
    if let Some(hs) = inputs.history_sum {
        check("history_sum", hs, nodes)?;
    }
    if let Some(i) = inputs.reaction.iter().position(|&r| !(r >= 0.0)) {
        return Err(Error::Assembly(format!(
            "negative reaction coefficient {} at node {i}",
            inputs.reaction[i]
        )));
    }
    let h = mesh.edges();
    let w = mesh.volumes();
    let phi = inputs.phi;
    let mut a = BandMatrix::zeros(nodes, 1, 1);
    let mut rhs = vec![0.0; nodes];
    for i in 0..nodes {
        a.add(i, i, w[i] * (inputs.theta0 + inputs.reaction[i]));
        rhs[i] = w[i] * (inputs.source[i] - inputs.history_sum.map_or(0.0, |hs| hs[i]));
    }
    // -(J_{i+1/2} - J_{i-1/2}); each edge contributes to its two end nodes.
    for e in 0..nodes - 1 {
        let f = sg_edge_flux(
            0.0,
            0.0,
            phi[e],
            phi[e + 1],
            inputs.mobility,
            inputs.vth,
            h[e],
            inputs.carrier,
            inputs.v_max,
        )
        .flux;
        // node e sees -J_{e+1/2}
        a.add(e, e, -f.coeff_i);
        a.add(e, e + 1, -f.coeff_j);
        // node e+1 sees +J_{e+1/2}
        a.add(e + 1, e, f.coeff_i);
        a.add(e + 1, e + 1, f.coeff_j);
    }
    let pick = |c: &ContactParams| match inputs.carrier {
        Carrier::Electron => (c.pins_n(), c.kappa_n, c.alpha_n, c.beta_n),
        Carrier::Hole => (c.pins_p(), c.kappa_p, c.alpha_p, c.beta_p),
    };
    for (node, contact) in [(0, &contacts.cathode), (nodes - 1, &contacts.anode)] {
        let (pinned, kappa, alpha, beta) = pick(contact);
        if pinned {
            a.set_identity_row(node);
            rhs[node] = beta / alpha;
        } else {
            a.add(node, node, alpha / kappa);
            rhs[node] += beta / kappa;
        }
    }
    Ok(BandedSystem { matrix: a, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::constants::EPS0;
    use crate::model::ContactParams;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};
    use std::f64::consts::PI;

    const VTH: f64 = 0.025852;
    const L: f64 = 70e-9;

    fn contacts(psi0: f64, psi1: f64, n0: f64, n1: f64) -> Contacts {
        Contacts {
            cathode: ContactParams::dirichlet(n0, n0, psi0),
            anode: ContactParams::dirichlet(n1, n1, psi1),
        }
    }

    #[test]
    fn neutral_poisson_gives_linear_ramp() {
        let mesh = Mesh1D::uniform(L, 101).unwrap();
        let dens = vec![1e21; 101];
        let sys = assemble_poisson(&mesh, &dens, &dens, &contacts(0.0, 0.5, 1.0, 1.0), 4.0 * EPS0).unwrap();
        let phi = sys.solve().unwrap();
        for (x, v) in mesh.nodes().iter().zip(&phi) {
            assert!((v - 0.5 * x / L).abs() < 1e-12);
        }
        let e = (phi[1] - phi[0]) / mesh.edges()[0];
        assert_relative_eq!(e, 7.1429e6, max_relative = 1e-4);
        // zero charge: interior residual is the bare discrete Laplacian
        let r = sys.residual(&phi);
        assert!(r.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn poisson_with_point_charge_matches_dense_solve() {
        let nodes = 41;
        let mesh = Mesh1D::graded(L, nodes, 1.05).unwrap();
        let n = vec![1e20; nodes];
        let mut p = n.clone();
        p[17] = 5e23;
        let eps = 4.0 * EPS0;
        let sys = assemble_poisson(&mesh, &n, &p, &contacts(0.0, 0.5, 1.0, 1.0), eps).unwrap();
        let phi = sys.solve().unwrap();
        // independent dense assembly + solve
        let (x, h) = (mesh.nodes(), mesh.edges());
        let mut a = DMatrix::zeros(nodes, nodes);
        let mut b = DVector::zeros(nodes);
        a[(0, 0)] = 1.0;
        a[(nodes - 1, nodes - 1)] = 1.0;
        b[nodes - 1] = 0.5;
        for i in 1..nodes - 1 {
            a[(i, i - 1)] = -eps / h[i - 1];
            a[(i, i + 1)] = -eps / h[i];
            a[(i, i)] = eps / h[i - 1] + eps / h[i];
            b[i] = Q * 0.5 * (x[i + 1] - x[i - 1]) * (p[i] - n[i]);
        }
        let dense = a.lu().solve(&b).unwrap();
        for i in 0..nodes {
            assert!((phi[i] - dense[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let mesh = Mesh1D::uniform(L, 11).unwrap();
        let short = vec![0.0; 10];
        let ok = vec![0.0; 11];
        assert!(matches!(
            assemble_poisson(&mesh, &short, &ok, &contacts(0.0, 0.0, 1.0, 1.0), 1.0),
            Err(Error::SizeMismatch { .. })
        ));
    }

    fn inputs<'a>(phi: &'a [f64], r: &'a [f64], s: &'a [f64]) -> ContinuityInputs<'a> {
        ContinuityInputs {
            phi,
            carrier: Carrier::Electron,
            mobility: 2e-8,
            vth: VTH,
            reaction: r,
            source: s,
            theta0: 0.0,
            history_sum: None,
            v_max: None,
        }
    }

    #[test]
    fn pure_diffusion_is_linear() {
        let mesh = Mesh1D::uniform(L, 51).unwrap();
        let zeros = vec![0.0; 51];
        let sys = assemble_continuity(&mesh, &inputs(&zeros, &zeros, &zeros), &contacts(0.0, 0.0, 1e10, 1e22)).unwrap();
        let u = sys.solve().unwrap();
        for (x, v) in mesh.nodes().iter().zip(&u) {
            let exact = 1e10 + (1e22 - 1e10) * x / L;
            assert!((v - exact).abs() < 1e-9 * 1e22);
        }
    }

    #[test]
    fn constant_solution_with_reaction() {
        let mesh = Mesh1D::uniform(L, 31).unwrap();
        let phi: Vec<f64> = mesh.nodes().iter().map(|x| 0.3 * x / L).collect();
        let r = vec![1e6; 31];
        let c = 3e20;
        let s = vec![1e6 * c; 31];
        let sys = assemble_continuity(&mesh, &inputs(&phi, &r, &s), &contacts(0.0, 0.0, c, c)).unwrap();
        let u = sys.solve().unwrap();
        assert!(u.iter().all(|v| (v - c).abs() < 1e-9 * c));
    }

    #[test]
    fn negative_reaction_is_rejected() {
        let mesh = Mesh1D::uniform(L, 11).unwrap();
        let zeros = vec![0.0; 11];
        let mut r = zeros.clone();
        r[3] = -1.0;
        assert!(matches!(
            assemble_continuity(&mesh, &inputs(&zeros, &r, &zeros), &contacts(0.0, 0.0, 1.0, 1.0)),
            Err(Error::Assembly(_))
        ));
    }

    #[test]
    fn robin_contact_balances_boundary_flux() {
        // zero field, no reaction: steady flux is uniform, J = D (u1 - u0)/L,
        // and at the anode alpha u - beta = J.
        let mesh = Mesh1D::uniform(L, 21).unwrap();
        let zeros = vec![0.0; 21];
        let mut c = contacts(0.0, 0.0, 1e20, 1e20);
        c.anode.mode = crate::model::BoundaryMode::Robin;
        c.anode.kappa_n = 1.0;
        c.anode.alpha_n = 10.0;
        c.anode.beta_n = 0.0;
        let sys = assemble_continuity(&mesh, &inputs(&zeros, &zeros, &zeros), &c).unwrap();
        let u = sys.solve().unwrap();
        let d = 2e-8 * VTH;
        let flux = d * (u[1] - u[0]) / mesh.edges()[0];
        assert_relative_eq!(-flux, 10.0 * u[20], max_relative = 1e-10);
        // linear profile
        let slope = (u[20] - u[0]) / L;
        assert_relative_eq!(u[10], u[0] + slope * L / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn maximum_principle_with_strong_drift() {
        let mesh = Mesh1D::uniform(L, 41).unwrap();
        let phi: Vec<f64> = mesh.nodes().iter().map(|x| 5.0 * x / L).collect();
        let r = vec![1e5; 41];
        let s = vec![1e26; 41];
        for carrier in [Carrier::Electron, Carrier::Hole] {
            let inp = ContinuityInputs { carrier, ..inputs(&phi, &r, &s) };
            let sys = assemble_continuity(&mesh, &inp, &contacts(0.0, 5.0, 1e5, 1e5)).unwrap();
            let u = sys.solve().unwrap();
            assert!(u.iter().all(|&v| v > 0.0), "{carrier:?}");
        }
    }

    /// Manufactured n(x) = c1 + c2 sin(pi x / L) under a fixed quadratic
    /// potential; the source is built from the exact flux divergence.
    fn mms_error(nodes: usize) -> f64 {
        let mesh = Mesh1D::uniform(L, nodes).unwrap();
        let (mu, c1, c2, r0) = (2e-8, 1e20, 5e21, 3e6);
        let d = mu * VTH;
        let a_phi = 0.4;
        let phi_f = |x: f64| a_phi * (x / L) * (x / L);
        let dphi = |x: f64| 2.0 * a_phi * x / (L * L);
        let d2phi = 2.0 * a_phi / (L * L);
        let k = PI / L;
        let n_f = |x: f64| c1 + c2 * (k * x).sin();
        let dn = |x: f64| c2 * k * (k * x).cos();
        let d2n = |x: f64| -c2 * k * k * (k * x).sin();
        // J = D n' - mu n phi'; S = -J' + R n
        let source = |x: f64| {
            let dj = d * d2n(x) - mu * (dn(x) * dphi(x) + n_f(x) * d2phi);
            -dj + r0 * n_f(x)
        };
        let phi: Vec<f64> = mesh.nodes().iter().map(|&x| phi_f(x)).collect();
        let r = vec![r0; nodes];
        // cell-averaged source (Simpson over the control volume)
        let x = mesh.nodes();
        let s: Vec<f64> = (0..nodes)
            .map(|i| {
                let a = if i == 0 { x[0] } else { 0.5 * (x[i - 1] + x[i]) };
                let b = if i == nodes - 1 { x[i] } else { 0.5 * (x[i] + x[i + 1]) };
                let m = 0.5 * (a + b);
                (source(a) + 4.0 * source(m) + source(b)) / 6.0
            })
            .collect();
        let c = contacts(0.0, a_phi, n_f(0.0), n_f(L));
        let sys = assemble_continuity(&mesh, &inputs(&phi, &r, &s), &c).unwrap();
        let u = sys.solve().unwrap();
        let err2: f64 = (0..nodes)
            .map(|i| mesh.volumes()[i] * (u[i] - n_f(x[i])).powi(2))
            .sum();
        (err2 / L).sqrt() / c2
    }

    #[test]
    fn mms_second_order() {
        let e1 = mms_error(51);
        let e2 = mms_error(101);
        let order = (e1 / e2).log2();
        assert!(order > 1.9, "observed order {order}");
    }
}
