//! Driving the solvers for one scenario.

use super::record::{StepLog, TransientRecord};
use crate::discretization::{compute_current, displacement_rate};
use crate::error::{Error, Result};
use crate::integrator::{integrate, BdfOptions, StepRecord};
use crate::model::StateVector;
use crate::reduced::{steady_solve, GummelOptions};
use crate::solver::{newton_solve, DaeSystem, Device, FullModel, NewtonOptions, ReducedModel, StepContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransientModel {
    Full,
    Reduced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransientOptions {
    /// Ascending output times; the last is the end time.
    pub outputs: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub keep_states: bool,
    pub bdf: BdfOptions,
}

/// Stationary state of the full model by damped Newton from the
/// equilibrium guess, falling back to the Slotboom solver for Dirichlet
/// contacts.
pub fn steady_state(device: &Device, newton: &NewtonOptions) -> Result<StateVector> {
    let sys = FullModel::new(device.clone());
    let guess = sys.state_to_vec(&device.equilibrium_guess());
    let opts = NewtonOptions {
        max_iterations: newton.max_iterations.max(100),
        ..*newton
    };
    let out = newton_solve(&sys, &guess, &StepContext::stationary(0.0), &opts)?;
    if out.report.converged {
        let mut s = sys.vec_to_state(&out.y, f64::INFINITY);
        s.t = f64::INFINITY;
        return Ok(s);
    }
    if device.contacts.all_dirichlet() && device.material.v_max.is_none() {
        let sol = steady_solve(device, &GummelOptions::default())?;
        // polish on the coupled system
        let y = sys.state_to_vec(&sol.state);
        let out = newton_solve(&sys, &y, &StepContext::stationary(0.0), &opts)?;
        return Ok(sys.vec_to_state(&out.into_converged()?, f64::INFINITY));
    }
    Err(Error::NewtonFailed {
        iterations: out.report.iterations,
        merit: out.report.residual_norm,
    })
}

/// Dark stationary state the transient starts from.
pub fn dark_state(device: &Device, newton: &NewtonOptions) -> Result<StateVector> {
    let mut s = steady_state(&device.with_generation(0.0), newton)?;
    s.t = 0.0;
    Ok(s)
}

struct Recorder<'a> {
    device: &'a Device,
    opts: &'a TransientOptions,
    rec: TransientRecord,
}

impl Recorder<'_> {
    fn push(&mut self, r: &StepRecord<'_>, state: StateVector, previous_phi: Vec<Vec<f64>>) -> Result<()> {
        let rate = if r.theta.is_empty() {
            None
        } else {
            let mut phis: Vec<&[f64]> = vec![&state.phi];
            phis.extend(previous_phi.iter().map(|v| v.as_slice()));
            Some(displacement_rate(&self.device.mesh, r.theta, &phis))
        };
        let c = compute_current(&self.device.mesh, &state.phi, &state.n, &state.p, &self.device.material, rate.as_deref());
        let rec = &mut self.rec;
        rec.t.push(r.t);
        rec.j.push(c.contact);
        rec.current_variation.push(c.max_relative_variation());
        rec.log.push(StepLog {
            step: r.step,
            t: r.t,
            dt: r.dt,
            order: r.order,
            newton_iterations: r.newton_iterations,
            damping_min: r.damping_min,
        });
        let lowest = state.n.iter().chain(&state.p).chain(&state.x).fold(f64::INFINITY, |m, &v| m.min(v));
        rec.min_density = rec.min_density.min(lowest);
        if self.opts.snapshot_times.iter().any(|&s| (s - r.t).abs() <= 1e-12 * s) {
            rec.snapshots.push(state.clone());
        }
        if self.opts.keep_states {
            rec.states.push(state);
        }
        Ok(())
    }
}

/// Integrate from `initial` (usually the dark state) with the light on.
pub fn run_transient(device: &Device, model: TransientModel, initial: &StateVector, opts: &TransientOptions) -> Result<TransientRecord> {
    let mut recorder = Recorder {
        device,
        opts,
        rec: TransientRecord {
            min_density: f64::INFINITY,
            ..Default::default()
        },
    };
    match model {
        TransientModel::Full => {
            let sys = FullModel::new(device.clone());
            let y0 = sys.state_to_vec(initial);
            let (y, stats) = integrate(&sys, &y0, 0.0, &opts.outputs, &opts.bdf, |r| {
                let s = sys.vec_to_state(r.y, r.t);
                let prev = r.previous.iter().map(|p| phi_of(&sys, p)).collect();
                recorder.push(r, s, prev)
            })?;
            recorder.rec.stats = stats;
            recorder.rec.final_state = Some(sys.vec_to_state(&y, *opts.outputs.last().unwrap_or(&0.0)));
        }
        TransientModel::Reduced => {
            let sys = ReducedModel::new(device, initial);
            let y0 = ReducedModel::to_vec(initial);
            let (y, stats) = integrate(&sys, &y0, 0.0, &opts.outputs, &opts.bdf, |r| {
                let s = sys.to_state(r.y, r.t);
                let prev = r.previous.iter().map(|p| phi_of(&sys, p)).collect();
                recorder.push(r, s, prev)
            })?;
            recorder.rec.stats = stats;
            recorder.rec.final_state = Some(sys.to_state(&y, *opts.outputs.last().unwrap_or(&0.0)));
        }
    }
    Ok(recorder.rec)
}

fn phi_of<S: DaeSystem>(sys: &S, y: &[f64]) -> Vec<f64> {
    y.iter().step_by(sys.components()).copied().collect()
}

/// Reduced-model transient. The device's coefficients are frozen at the
/// mean field unless it already has constant ones.
pub fn reduced_transient_solve(device: &Device, initial: &StateVector, opts: &TransientOptions) -> Result<TransientRecord> {
    run_transient(device, TransientModel::Reduced, initial, opts)
}
