//! Acceptance suite. Each test prints one line `criterion N: PASS|FAIL ...`
//! straight to stdout so the lines show without `--nocapture`.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use oscsim_core::discretization::{assemble_continuity, bernoulli, compute_current, BandMatrix, Carrier, ContinuityInputs};
use oscsim_core::integrator::{integrate, BdfOptions};
use oscsim_core::model::constants::{EPS0, KB, Q};
use oscsim_core::reduced::{steady_solve, GummelOptions};
use oscsim_core::scenario::presets::{self, KDISS0, KDISS_AXIS, KREC_AXIS, MU_AXIS};
use oscsim_core::scenario::*;
use oscsim_core::solver::{DaeSystem, NewtonOptions, ScalingSet, StepContext};
use oscsim_core::{ContactParams, Contacts, Mesh1D, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn report(n: u32, pass: bool, detail: &str) {
    let line = format!("criterion {n:>2}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn vth() -> f64 {
    KB * 300.0 / Q
}

struct Pair {
    point: SweepPoint,
    full: TransientRecord,
    reduced: TransientRecord,
}

fn run_pair(point: SweepPoint, keep: bool) -> Pair {
    let cfg = presets::baseline().at_point(&point);
    let full = simulate(&cfg, TransientModel::Full, keep).expect("full run");
    let reduced = simulate(&cfg, TransientModel::Reduced, false).expect("reduced run");
    Pair { point, full, reduced }
}

/// Full and reduced transients over the 16-point grid, with the wall time.
fn grid() -> &'static (Vec<Pair>, Duration) {
    static GRID: OnceLock<(Vec<Pair>, Duration)> = OnceLock::new();
    GRID.get_or_init(|| {
        let start = Instant::now();
        let pairs = presets::grid_points().into_par_iter().map(|p| run_pair(p, true)).collect();
        (pairs, start.elapsed())
    })
}

/// One-factor points around the baseline, at both light levels.
fn one_factor() -> &'static Vec<Pair> {
    static PAIRS: OnceLock<Vec<Pair>> = OnceLock::new();
    PAIRS.get_or_init(|| {
        let mut pts = Vec::new();
        for g in [G_LOW, G_HIGH] {
            pts.push(SweepPoint { generation: Some(g), ..Default::default() });
            for mu in MU_AXIS {
                pts.push(SweepPoint { mu: Some(mu), generation: Some(g), ..Default::default() });
            }
            for kd in KDISS_AXIS {
                pts.push(SweepPoint { k_diss: Some(kd), generation: Some(g), ..Default::default() });
            }
            for kr in KREC_AXIS {
                pts.push(SweepPoint { k_rec: Some(kr), generation: Some(g), ..Default::default() });
            }
        }
        pts.into_par_iter().map(|p| run_pair(p, false)).collect()
    })
}

/// Largest `|J_reduced - J_full| / J_inf` at full-model times after the 10%
/// crossing, with the reduced current interpolated in log time.
fn deviation_after_t10(p: &Pair) -> f64 {
    let r = extract_rise_time(&p.full).expect("stationary full run");
    p.full
        .t
        .iter()
        .zip(&p.full.j)
        .filter(|(t, _)| **t >= r.t10)
        .map(|(t, j)| (p.reduced.current_at(*t) - j).abs() / r.j_inf.abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------- 1

/// Steady continuity solve with a manufactured hole density
/// `p = a + b x^2 (L - x)` under the potential `phi = c cos(pi x / L)`.
fn mms_error(nodes: usize) -> f64 {
    let l = 70e-9;
    let vt = vth();
    let mu = 2e-9;
    let d = mu * vt;
    let (a, b, c, r0) = (2e19, 4e41, 0.3, 5e5);
    let p = |x: f64| a + b * x * x * (l - x);
    let dp = |x: f64| b * (2.0 * x * l - 3.0 * x * x);
    let d2p = |x: f64| b * (2.0 * l - 6.0 * x);
    let k = PI / l;
    let dphi = |x: f64| -c * k * (k * x).sin();
    let d2phi = |x: f64| -c * k * k * (k * x).cos();
    // J_p = D p' + mu p phi';  -J_p' + R p = S
    let s = |x: f64| -(d * d2p(x) + mu * (dp(x) * dphi(x) + p(x) * d2phi(x))) + r0 * p(x);
    let mesh = Mesh1D::uniform(l, nodes).unwrap();
    let x = mesh.nodes().to_vec();
    let phi: Vec<f64> = x.iter().map(|&x| c * (k * x).cos()).collect();
    let reaction = vec![r0; nodes];
    let source: Vec<f64> = x.iter().map(|&x| s(x)).collect();
    let contacts = Contacts {
        cathode: ContactParams::dirichlet(1.0, p(0.0), phi[0]),
        anode: ContactParams::dirichlet(1.0, p(l), phi[nodes - 1]),
    };
    let inputs = ContinuityInputs {
        phi: &phi,
        carrier: Carrier::Hole,
        mobility: mu,
        vth: vt,
        reaction: &reaction,
        source: &source,
        theta0: 0.0,
        history_sum: None,
        v_max: None,
    };
    let u = assemble_continuity(&mesh, &inputs, &contacts).unwrap().solve().unwrap();
    let scale = x.iter().map(|&x| p(x)).fold(0.0, f64::max);
    x.iter().zip(&u).map(|(&x, u)| (u - p(x)).abs()).fold(0.0, f64::max) / scale
}

#[test]
fn criterion_01_sg_correctness() {
    let start = Instant::now();
    let mut ident = (bernoulli(0.0) - 1.0).abs();
    for k in -4000..=4000 {
        let x = k as f64 * 0.01;
        let lhs = bernoulli(-x) - bernoulli(x);
        ident = ident.max((lhs - x).abs() / x.abs().max(1.0));
    }
    for x in [1e-9, 1e-6, 1e-4, 1e-3, 0.5, 30.0, 300.0] {
        for s in [x, -x] {
            ident = ident.max((bernoulli(-s) - bernoulli(s) - s).abs() / s.abs().max(1.0));
        }
    }
    let meshes = [51, 101, 201, 401, 801];
    let errs: Vec<f64> = meshes.iter().map(|&n| mms_error(n)).collect();
    // least-squares slope of log(err) against log(h)
    let pts: Vec<(f64, f64)> = meshes.iter().zip(&errs).map(|(&n, &e)| ((1.0 / (n - 1) as f64).ln(), e.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let order = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let worst_pair = errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let pass = ident < 1e-12 && order >= 1.9 && elapsed < Duration::from_secs(10);
    report(1, pass, &format!(
        "bernoulli identity err {ident:.1e} (< 1e-12), MMS order {order:.3} (pairwise min {worst_pair:.3}, >= 1.9), {:.2} s (< 10 s)",
        elapsed.as_secs_f64()
    ));
    assert!(pass);
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_02_positivity() {
    let (pairs, elapsed) = grid();
    let lowest = pairs
        .iter()
        .flat_map(|p| [&p.full, &p.reduced])
        .map(|r| r.min_density)
        .fold(f64::INFINITY, f64::min);
    // independent check over every stored full-model state
    let stored_ok = pairs.iter().all(|p| p.full.states.iter().all(StateVector::is_positive));
    let pass = lowest > 0.0 && stored_ok && pairs.len() == 16 && *elapsed < Duration::from_secs(300);
    report(2, pass, &format!(
        "{} runs, min density over all accepted states {lowest:.3e} m^-3 (> 0), grid wall time {:.1} s (< 300 s)",
        pairs.len(),
        elapsed.as_secs_f64()
    ));
    assert!(pass);
}

// ---------------------------------------------------------------- 3

#[test]
fn criterion_03_current_conservation() {
    let mut steady_var: f64 = 0.0;
    for g in [G_LOW, G_HIGH] {
        let cfg = presets::baseline().at_point(&SweepPoint { generation: Some(g), ..Default::default() });
        let dev = cfg.device().unwrap();
        let s = steady_state(&dev, &NewtonOptions::stationary()).unwrap();
        let c = compute_current(&dev.mesh, &s.phi, &s.n, &s.p, &dev.material, None);
        steady_var = steady_var.max(c.max_relative_variation());
    }
    let mut mid_var: f64 = 0.0;
    let mut rows = 0;
    for p in one_factor() {
        let r = extract_rise_time(&p.full).unwrap();
        for (k, &t) in p.full.t.iter().enumerate() {
            if t >= r.t10 && t <= r.t90 {
                mid_var = mid_var.max(p.full.current_variation[k]);
                rows += 1;
            }
        }
    }
    let pass = steady_var < 1e-6 && mid_var < 1e-4 && rows > 0;
    report(3, pass, &format!(
        "steady variation {steady_var:.2e} (< 1e-6), displacement-corrected variation between t10 and t90 {mid_var:.2e} over {rows} steps (< 1e-4)"
    ));
    assert!(pass);
}

// ---------------------------------------------------------------- 4

/// `b' = -b + a + f(t)`, `0 = a - b/2 - cos t` with exact solution
/// `b = 2 + sin 2t`, `a = b/2 + cos t`.
struct Manufactured;

fn exact(t: f64) -> (f64, f64) {
    let b = 2.0 + (2.0 * t).sin();
    (0.5 * b + t.cos(), b)
}

impl DaeSystem for Manufactured {
    fn components(&self) -> usize {
        2
    }
    fn nodes(&self) -> usize {
        1
    }
    fn is_differential(&self, c: usize) -> bool {
        c == 1
    }
    fn is_density(&self, _c: usize) -> bool {
        false
    }
    fn residual(&self, y: &[f64], ctx: &StepContext<'_>, out: &mut [f64], magnitude: Option<&mut [f64]>) {
        let (a, b) = (y[0], y[1]);
        let t = ctx.t;
        let f = 2.0 * (2.0 * t).cos() + 0.5 * exact(t).1 - t.cos();
        let hist = ctx.history.map_or(0.0, |h| h[1]);
        out[0] = a - 0.5 * b - t.cos();
        out[1] = ctx.theta0 * b + hist + b - a - f;
        if let Some(m) = magnitude {
            m[0] = a.abs() + 0.5 * b.abs() + t.cos().abs();
            m[1] = (ctx.theta0 * b).abs() + hist.abs() + b.abs() + a.abs() + f.abs();
        }
    }
    fn jacobian(&self, _y: &[f64], ctx: &StepContext<'_>, jac: &mut BandMatrix) {
        jac.clear();
        jac.set(0, 0, 1.0);
        jac.set(0, 1, -0.5);
        jac.set(1, 0, -1.0);
        jac.set(1, 1, ctx.theta0 + 1.0);
    }
}

fn dae_options(order_cap: usize, fixed: Option<f64>, rtol: f64) -> BdfOptions {
    BdfOptions {
        order_cap,
        rtol,
        atol: [rtol * 1e-2; 4],
        dt_init: 1e-4,
        fixed_dt: fixed,
        newton: NewtonOptions {
            scaling: ScalingSet::UNIT,
            ftol: 1e-13,
            atol: 1e-14,
            rtol: 1e-13,
            max_iterations: 20,
            ..NewtonOptions::default()
        },
        ..BdfOptions::default()
    }
}

fn dae_error(order: usize, h: f64) -> f64 {
    let (a0, b0) = exact(0.0);
    let (y, _) = integrate(&Manufactured, &[a0, b0], 0.0, &[1.0], &dae_options(order, Some(h), 1e-6), |_| Ok(())).unwrap();
    let (a1, b1) = exact(1.0);
    (y[0] - a1).abs().max((y[1] - b1).abs())
}

#[test]
fn criterion_04_bdf_orders() {
    let hs: Vec<f64> = (5..=9).map(|k| 0.5f64.powi(k)).collect();
    let observed = |order: usize| {
        let e: Vec<f64> = hs.iter().map(|&h| dae_error(order, h)).collect();
        (e[e.len() - 2] / e[e.len() - 1]).log2()
    };
    let (p1, p2) = (observed(1), observed(2));
    // adaptive run against a fine fixed-step BDF2 reference
    let rtol = 1e-6;
    let (a0, b0) = exact(0.0);
    let (y_ad, _) = integrate(&Manufactured, &[a0, b0], 0.0, &[1.0], &dae_options(5, None, rtol), |_| Ok(())).unwrap();
    let (y_ref, _) = integrate(&Manufactured, &[a0, b0], 0.0, &[1.0], &dae_options(2, Some(0.5f64.powi(16)), rtol), |_| Ok(())).unwrap();
    let rel = (0..2).map(|k| (y_ad[k] - y_ref[k]).abs() / y_ref[k].abs()).fold(0.0, f64::max);
    let pass = (p1 - 1.0).abs() <= 0.1 && (p2 - 2.0).abs() <= 0.1 && rel <= 10.0 * rtol;
    report(4, pass, &format!(
        "fixed-step orders BDF1 {p1:.3} (1.0 +- 0.1), BDF2 {p2:.3} (2.0 +- 0.1); adaptive vs reference rel err {rel:.2e} (<= {:.0e})",
        10.0 * rtol
    ));
    assert!(pass);
}

// ---------------------------------------------------------------- 5

#[test]
fn criterion_05_stationary_agreement() {
    let (pairs, _) = grid();
    let worst = pairs
        .iter()
        .map(|p| {
            let jf = extract_rise_time(&p.full).unwrap().j_inf;
            let jr = extract_rise_time(&p.reduced).unwrap().j_inf;
            (jr - jf).abs() / jf.abs()
        })
        .fold(0.0, f64::max);
    let pass = worst < 0.01;
    report(5, pass, &format!("max |J_inf reduced - J_inf full| / J_inf full over 16 points {worst:.2e} (< 1e-2)"));
    assert!(pass);
}

// ---------------------------------------------------------------- 6

#[test]
fn criterion_06_reduced_fidelity() {
    let pairs = one_factor();
    let low: Vec<(SweepPoint, f64)> = pairs
        .iter()
        .filter(|p| p.point.generation == Some(G_LOW))
        .map(|p| (p.point, deviation_after_t10(p)))
        .collect();
    let low_max = low.iter().map(|d| d.1).fold(0.0, f64::max);
    let high_krec = pairs
        .iter()
        .find(|p| p.point.generation == Some(G_HIGH) && p.point.k_rec == Some(1e5))
        .map(deviation_after_t10)
        .unwrap();
    let pass = low_max < 0.05 && high_krec > low_max;
    report(6, pass, &format!(
        "low-G max deviation after t10 {low_max:.3e} over {} points (< 5e-2); high-G k_rec = 1e5 deviation {high_krec:.3e} (> low-G max)",
        low.len()
    ));
    assert!(pass);
}

// ---------------------------------------------------------------- 7

#[test]
fn criterion_07_mobility_rise_time() {
    let pairs = one_factor();
    let rise = |mu: f64, g: f64| {
        let p = pairs
            .iter()
            .find(|p| p.point.mu == Some(mu) && p.point.generation == Some(g))
            .unwrap();
        extract_rise_time(&p.full).unwrap().rise_time()
    };
    let low = rise(2e-9, G_LOW) / rise(2e-8, G_LOW);
    let high = rise(2e-9, G_HIGH) / rise(2e-8, G_HIGH);
    let pass = (5.0..=20.0).contains(&low) && high < 3.0;
    report(7, pass, &format!("rise-time ratio mu 2e-9 / 2e-8: low G {low:.2} (in [5, 20]), high G {high:.2} (< 3)"));
    assert!(pass);
}

// ---------------------------------------------------------------- 8

#[test]
fn criterion_08_field_flatness() {
    let mean = 0.5 / 70e-9;
    let deviation = |g: f64| {
        let cfg = presets::baseline().at_point(&SweepPoint { k_rec: Some(1e5), generation: Some(g), ..Default::default() });
        let dev = cfg.device().unwrap();
        let s = steady_state(&dev, &NewtonOptions::stationary()).unwrap();
        // edge fields -dphi/dx
        let x = dev.mesh.nodes();
        (0..x.len() - 1)
            .map(|e| ((s.phi[e + 1] - s.phi[e]) / (x[e + 1] - x[e])).abs())
            .map(|e| (e - mean).abs() / mean)
            .fold(0.0, f64::max)
    };
    let (low, high) = (deviation(G_LOW), deviation(G_HIGH));
    let pass = low < 0.05 && (0.15..=0.45).contains(&high);
    report(8, pass, &format!(
        "steady |E| deviation from <E> = {mean:.3e} V/m: low G {:.1}% (< 5%), high G peak {:.1}% (in [15%, 45%])",
        100.0 * low,
        100.0 * high
    ));
    assert!(pass);
}

// ---------------------------------------------------------------- 9

#[test]
fn criterion_09_mirror_symmetry() {
    let mut worst: f64 = 0.0;
    let mut states = 0;
    for g in [G_LOW, G_HIGH] {
        let mut cfg = presets::baseline().at_point(&SweepPoint { generation: Some(g), ..Default::default() });
        cfg.output.t_end = 1e-4;
        let rec = simulate(&cfg, TransientModel::Full, true).unwrap();
        for s in &rec.states {
            let n = s.n.len();
            let nmax = s.n.iter().cloned().fold(0.0, f64::max);
            let d = (0..n).map(|i| (s.p[i] - s.n[n - 1 - i]).abs()).fold(0.0, f64::max) / nmax;
            worst = worst.max(d);
            states += 1;
        }
    }
    let pass = worst < 1e-6;
    report(9, pass, &format!("max |p(x) - n(L - x)| / max n over {states} accepted states {worst:.2e} (< 1e-6)"));
    assert!(pass);
}

// ---------------------------------------------------------------- 10

/// Bounds written out directly from the Dirichlet data.
fn oracle_bounds(c: &Contacts, n_r: f64, vt: f64) -> (f64, f64, f64, f64) {
    let sides = [&c.cathode, &c.anode];
    let mut psi_plus: f64 = 0.0;
    for s in sides {
        let phi_n = s.psi_d - vt * (s.beta_n / s.alpha_n / n_r).ln();
        let phi_p = s.psi_d + vt * (s.beta_p / s.alpha_p / n_r).ln();
        psi_plus = psi_plus.max(phi_n.abs()).max(phi_p.abs());
    }
    let sup = sides.iter().map(|s| s.psi_d).fold(f64::NEG_INFINITY, f64::max);
    let inf = sides.iter().map(|s| s.psi_d).fold(f64::INFINITY, f64::min);
    let psi_hat = sup.abs().max(inf.abs()) + psi_plus;
    (
        n_r * (-psi_hat / vt).exp(),
        n_r * (psi_hat / vt).exp(),
        inf.min(-psi_plus),
        sup.max(psi_plus),
    )
}

#[test]
fn criterion_10_stationary_bounds() {
    let vt = vth();
    let mut rng = ChaCha8Rng::seed_from_u64(20_26_10_17);
    let base = presets::baseline();
    let mut inside = 0;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..8 {
        let mut dens = || 10f64.powf(rng.random_range(14.0..22.0));
        let (n0, p0, n1, p1) = (dens(), dens(), dens(), dens());
        let psi0 = rng.random_range(-0.5..0.5);
        let psi1 = rng.random_range(-0.5..0.5);
        let g = 10f64.powf(rng.random_range(27.0..31.0));
        let contacts = Contacts {
            cathode: ContactParams::dirichlet(n0, p0, psi0),
            anode: ContactParams::dirichlet(n1, p1, psi1),
        };
        let mut material = base.material;
        material.generation = g;
        let dev = oscsim_core::Device::new(Mesh1D::uniform(70e-9, 101).unwrap(), material, contacts).unwrap().frozen();
        let sol = steady_solve(&dev, &GummelOptions::default()).unwrap();
        let m = &dev.material;
        let kd = m.kdiss_override.unwrap();
        let n_r = (kd * g / (m.gamma() * m.k_rec)).sqrt();
        let (dlo, dhi, plo, phi_hi) = oracle_bounds(&contacts, n_r, vt);
        let lib = sol.bounds;
        assert!((lib.density_lower / dlo - 1.0).abs() < 1e-9 && (lib.density_upper / dhi - 1.0).abs() < 1e-9);
        let s = &sol.state;
        let ok = s.n.iter().chain(&s.p).all(|&d| d >= dlo && d <= dhi)
            && s.phi.iter().all(|&f| f >= plo - 1e-12 && f <= phi_hi + 1e-12);
        if ok {
            inside += 1;
        }
        let margin = s.n.iter().chain(&s.p).map(|&d| (d / dlo).ln().min((dhi / d).ln())).fold(f64::INFINITY, f64::min);
        worst_margin = worst_margin.min(margin);
    }
    // equilibrium: zero bias, no light, neutral contacts
    let nd = 1e10;
    let contacts = Contacts {
        cathode: ContactParams::dirichlet(nd, nd, 0.0),
        anode: ContactParams::dirichlet(nd, nd, 0.0),
    };
    let mut material = base.material;
    material.generation = 0.0;
    let dev = oscsim_core::Device::new(Mesh1D::uniform(70e-9, 101).unwrap(), material, contacts).unwrap().frozen();
    let sol = steady_solve(&dev, &GummelOptions::default()).unwrap();
    let nr2 = nd * nd;
    let eq = sol.state.n.iter().zip(&sol.state.p).map(|(n, p)| (n * p / nr2 - 1.0).abs()).fold(0.0, f64::max);
    let pass = inside == 8 && eq < 1e-8;
    report(10, pass, &format!(
        "{inside}/8 random Dirichlet configurations inside the bounds (min log-margin {worst_margin:.2}); equilibrium max |np/n_r^2 - 1| {eq:.1e} (< 1e-8)"
    ));
    assert!(pass);
}

// ---------------------------------------------------------------- 11

#[test]
fn criterion_11_memory_term() {
    let diag = |g: f64| {
        let cfg = presets::baseline().at_point(&SweepPoint { k_rec: Some(1e5), generation: Some(g), ..Default::default() });
        let dev = cfg.device().unwrap();
        let rec = simulate(&cfg, TransientModel::Full, true).unwrap();
        memory_from_record(&dev, &rec).unwrap()
    };
    let (low, high) = (diag(G_LOW), diag(G_HIGH));
    let mut start_zero = true;
    let mut tail: f64 = 0.0;
    for d in [&low, &high] {
        start_zero &= d.exact[0] == 0.0 && d.lumped[0] == 0.0;
        let pi = d.exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pl = d.lumped.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        tail = tail.max(d.exact.last().unwrap().abs() / pi).max(d.lumped.last().unwrap().abs() / pl);
    }
    let ratio = high.peak_abs_diff() / low.peak_abs_diff();
    let pass = start_zero && tail < 1e-6 && ratio >= 3.0;
    report(11, pass, &format!(
        "I(0) = I~(0) = 0: {start_zero}; final/peak {tail:.1e} (< 1e-6); peak |I - I~| high/low G at k_rec = 1e5: {ratio:.3e} (>= 3)"
    ));
    assert!(pass);
}

// ---------------------------------------------------------------- 12

#[test]
fn criterion_12_scaling_invariance() {
    let mut worst: f64 = 0.0;
    let tol = NewtonOptions::default().ftol;
    for g in [G_LOW, G_HIGH] {
        let cfg = presets::baseline().at_point(&SweepPoint { generation: Some(g), ..Default::default() });
        let dev = cfg.device().unwrap();
        let device = steady_state(&dev, &NewtonOptions { scaling: ScalingSet::DEVICE, ..NewtonOptions::stationary() }).unwrap();
        let unit = steady_state(&dev, &NewtonOptions { scaling: ScalingSet::UNIT, ..NewtonOptions::stationary() }).unwrap();
        let bars = ScalingSet::DEVICE.unknown;
        let (a, b) = (device.to_interleaved(), unit.to_interleaved());
        let d = a.iter().zip(&b).enumerate().map(|(k, (x, y))| (x - y).abs() / bars[k % 4]).fold(0.0, f64::max);
        worst = worst.max(d);
    }
    let pass = worst < 10.0 * tol;
    report(12, pass, &format!("max scaled difference device vs unit scaling {worst:.2e} (< {:.0e})", 10.0 * tol));
    assert!(pass);
}

#[test]
fn presets_use_the_stated_constants() {
    let c = presets::baseline();
    assert_eq!(c.material.eps_r, 4.0);
    assert_eq!(c.geometry.length, 70e-9);
    assert_eq!(c.contacts.voltage_drop(), 0.5);
    assert_eq!(c.material.kdiss_override, Some(KDISS0));
    assert!((c.material.permittivity() - 4.0 * EPS0).abs() < 1e-25);
    // Braun rate at the mean field reproduces the baseline dissociation rate
    let mut m = c.material;
    m.kdiss_override = None;
    assert!((m.kdiss(0.5 / 70e-9) / KDISS0 - 1.0).abs() < 5e-3);
}
