use std::collections::VecDeque;

use super::bdf::{bdf_coefficients, divided_difference, error_estimate, lte_coefficient, predict, wrms};
use crate::discretization::BandMatrix;
use crate::error::{Error, Result};
use crate::solver::{newton_solve, DaeSystem, NewtonOptions, StepContext};

/// Step-size and order control for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdfOptions {
    /// Highest BDF order used (1..=5).
    pub order_cap: usize,
    pub rtol: f64,
    /// Absolute tolerance per component (`phi, n, p, X`); algebraic entries
    /// are ignored.
    pub atol: [f64; 4],
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub max_steps: usize,
    pub growth_cap: f64,
    pub safety: f64,
    pub newton: NewtonOptions,
    /// Constant step without error control; the order ramps up to the cap.
    pub fixed_dt: Option<f64>,
}

impl Default for BdfOptions {
    fn default() -> Self {
        Self {
            order_cap: 2,
            rtol: 1e-6,
            atol: [1e-6, 1e16, 1e16, 1e13],
            dt_init: 1e-12,
            dt_min: 1e-20,
            dt_max: f64::INFINITY,
            max_steps: 200_000,
            growth_cap: 2.0,
            safety: 0.9,
            newton: NewtonOptions::default(),
            fixed_dt: None,
        }
    }
}

impl BdfOptions {
    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.order_cap) {
            return Err(Error::Domain(format!("order cap must be in 1..=5, got {}", self.order_cap)));
        }
        if !(self.rtol > 0.0) || self.atol.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Domain("tolerances must be > 0".into()));
        }
        if !(self.dt_init > 0.0 && self.dt_min > 0.0 && self.dt_max >= self.dt_init) {
            return Err(Error::Domain("need 0 < dt_min, 0 < dt_init <= dt_max".into()));
        }
        if let Some(h) = self.fixed_dt {
            if !(h > 0.0) {
                return Err(Error::Domain("fixed dt must be > 0".into()));
            }
        }
        Ok(())
    }
}

/// Accepted step handed to the sink.
#[derive(Debug)]
pub struct StepRecord<'a> {
    /// 0 for the initial state.
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub order: usize,
    pub y: &'a [f64],
    /// BDF weights of the step (empty for the initial state).
    pub theta: &'a [f64],
    /// States at `t_{K-1}, t_{K-2}, ...` matching `theta[1..]`.
    pub previous: Vec<&'a [f64]>,
    pub newton_iterations: usize,
    pub damping_min: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected_error: usize,
    pub rejected_newton: usize,
    pub newton_iterations: usize,
    pub max_order_used: usize,
}

/// History ring of accepted levels, newest first.
#[derive(Debug, Clone)]
pub struct BdfState {
    pub times: VecDeque<f64>,
    pub states: VecDeque<Vec<f64>>,
    pub order: usize,
    pub dt: f64,
    pub steps_at_order: usize,
    capacity: usize,
}

impl BdfState {
    pub fn new(t0: f64, y0: Vec<f64>, dt: f64, capacity: usize) -> Self {
        Self {
            times: VecDeque::from([t0]),
            states: VecDeque::from([y0]),
            order: 1,
            dt,
            steps_at_order: 0,
            capacity,
        }
    }

    pub fn t(&self) -> f64 {
        self.times[0]
    }

    pub fn y(&self) -> &[f64] {
        &self.states[0]
    }

    fn push(&mut self, t: f64, y: Vec<f64>) {
        self.times.push_front(t);
        self.states.push_front(y);
        while self.times.len() > self.capacity {
            self.times.pop_back();
            self.states.pop_back();
        }
    }
}

/// Per-entry error weights `atol_c + rtol |y|` and the differential mask.
fn weights<S: DaeSystem>(sys: &S, y: &[f64], opts: &BdfOptions) -> (Vec<f64>, Vec<bool>) {
    let nc = sys.components();
    let w = y.iter().enumerate().map(|(k, v)| opts.atol[k % nc] + opts.rtol * v.abs()).collect();
    let mask = (0..y.len()).map(|k| sys.is_differential(k % nc)).collect();
    (w, mask)
}

/// Restricts a system to its algebraic rows, holding the differential
/// unknowns at `frozen`.
struct AlgebraicOnly<'a, S> {
    sys: &'a S,
    frozen: &'a [f64],
}

impl<S: DaeSystem> DaeSystem for AlgebraicOnly<'_, S> {
    fn components(&self) -> usize {
        self.sys.components()
    }

    fn nodes(&self) -> usize {
        self.sys.nodes()
    }

    fn is_differential(&self, c: usize) -> bool {
        self.sys.is_differential(c)
    }

    fn is_density(&self, c: usize) -> bool {
        self.sys.is_density(c)
    }

    fn residual(&self, y: &[f64], ctx: &StepContext<'_>, out: &mut [f64], mut magnitude: Option<&mut [f64]>) {
        self.sys.residual(y, ctx, out, magnitude.as_deref_mut());
        let nc = self.components();
        for k in 0..y.len() {
            if self.sys.is_differential(k % nc) {
                out[k] = y[k] - self.frozen[k];
                if let Some(m) = magnitude.as_deref_mut() {
                    m[k] = y[k].abs() + self.frozen[k].abs();
                }
            }
        }
    }

    fn jacobian(&self, y: &[f64], ctx: &StepContext<'_>, jac: &mut BandMatrix) {
        self.sys.jacobian(y, ctx, jac);
        let nc = self.components();
        for k in 0..y.len() {
            if self.sys.is_differential(k % nc) {
                jac.set_identity_row(k);
            }
        }
    }
}

/// Re-solve the algebraic unknowns at `t0` with the differential ones held
/// fixed, so the initial state satisfies the constraint.
pub fn consistent_initial<S: DaeSystem>(sys: &S, y0: &[f64], t0: f64, newton: &NewtonOptions) -> Result<Vec<f64>> {
    let wrapped = AlgebraicOnly { sys, frozen: y0 };
    let opts = NewtonOptions {
        max_iterations: newton.max_iterations.max(50),
        ..*newton
    };
    newton_solve(&wrapped, y0, &StepContext::stationary(t0), &opts)?.into_converged()
}

/// Advance `y0` from `t0` through every time in `outputs` (ascending; the
/// last one is the end time), handing each accepted step to `sink`.
/// Returns the final state.
pub fn integrate<S, F>(sys: &S, y0: &[f64], t0: f64, outputs: &[f64], opts: &BdfOptions, mut sink: F) -> Result<(Vec<f64>, IntegrationStats)>
where
    S: DaeSystem,
    F: FnMut(&StepRecord<'_>) -> Result<()>,
{
    opts.validate()?;
    if y0.len() != sys.len() {
        return Err(Error::SizeMismatch {
            what: "initial state",
            got: y0.len(),
            expected: sys.len(),
        });
    }
    if outputs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("output times must be ascending".into()));
    }
    let y0 = consistent_initial(sys, y0, t0, &opts.newton)?;
    let mut stats = IntegrationStats::default();
    sink(&StepRecord {
        step: 0,
        t: t0,
        dt: 0.0,
        order: 0,
        y: &y0,
        theta: &[],
        previous: Vec::new(),
        newton_iterations: 0,
        damping_min: 1.0,
        error: 0.0,
    })?;
    let t_end = outputs.last().copied().unwrap_or(t0);
    let mut st = BdfState::new(t0, y0, opts.fixed_dt.unwrap_or(opts.dt_init), opts.order_cap + 2);
    let mut targets = outputs.iter().copied().filter(|&t| t > t0).peekable();
    let mut just_rejected = false;
    let len = sys.len();

    while st.t() < t_end {
        if stats.accepted >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let t = st.t();
        while targets.peek().is_some_and(|&x| x <= t) {
            targets.next();
        }
        let target = *targets.peek().expect("t < t_end");
        let mut dt = st.dt.min(opts.dt_max);
        let mut hits_target = false;
        if t + dt >= target || (opts.fixed_dt.is_none() && t + 1.1 * dt >= target) {
            dt = target - t;
            hits_target = true;
        }
        if dt < opts.dt_min {
            return Err(Error::StepUnderflow { t, dt });
        }
        let t_new = if hits_target { target } else { t + dt };
        let m = st.order.min(st.times.len()).min(opts.order_cap);

        let mut stencil = vec![t_new];
        stencil.extend(st.times.iter().take(m));
        let theta = bdf_coefficients(&stencil)?;
        let npred = (m + 1).min(st.times.len());
        let ptimes: Vec<f64> = st.times.iter().take(npred).copied().collect();
        let pstates: Vec<&[f64]> = st.states.iter().take(npred).map(|v| v.as_slice()).collect();
        let predicted = predict(&ptimes, &pstates, t_new)?;
        let mut history = vec![0.0; len];
        for (k, th) in theta.iter().enumerate().skip(1) {
            for (h, v) in history.iter_mut().zip(&st.states[k - 1]) {
                *h += th * v;
            }
        }
        let ctx = StepContext {
            t: t_new,
            theta0: theta[0],
            history: Some(&history),
        };
        let outcome = newton_solve(sys, &predicted, &ctx, &opts.newton)?;
        stats.newton_iterations += outcome.report.iterations;
        if !outcome.report.converged {
            stats.rejected_newton += 1;
            if opts.fixed_dt.is_some() {
                return Err(Error::NewtonFailed {
                    iterations: outcome.report.iterations,
                    merit: outcome.report.residual_norm,
                });
            }
            st.dt = dt / 4.0;
            st.order = m.saturating_sub(1).max(1);
            st.steps_at_order = 0;
            just_rejected = true;
            if st.dt < opts.dt_min {
                return Err(Error::StepUnderflow { t, dt: st.dt });
            }
            continue;
        }
        let corrected = outcome.y;
        let (w, mask) = weights(sys, &corrected, opts);
        let err = if npred > m { error_estimate(&corrected, &predicted, m, &w, &mask) } else {
            // constant predictor on the very first step: its difference is
            // a first-order quantity, matching the BDF1 estimate
            error_estimate(&corrected, &predicted, 1, &w, &mask)
        };
        if opts.fixed_dt.is_none() && err > 1.0 {
            stats.rejected_error += 1;
            let factor = (opts.safety * err.powf(-1.0 / (m as f64 + 1.0))).clamp(0.1, 0.9);
            st.dt = dt * factor;
            just_rejected = true;
            if st.dt < opts.dt_min {
                return Err(Error::StepUnderflow { t, dt: st.dt });
            }
            continue;
        }

        // accepted
        stats.accepted += 1;
        stats.max_order_used = stats.max_order_used.max(m);
        {
            let previous: Vec<&[f64]> = st.states.iter().take(m).map(|v| v.as_slice()).collect();
            sink(&StepRecord {
                step: stats.accepted,
                t: t_new,
                dt,
                order: m,
                y: &corrected,
                theta: &theta,
                previous,
                newton_iterations: outcome.report.iterations,
                damping_min: outcome.report.min_damping(),
                error: err,
            })?;
        }
        st.push(t_new, corrected);
        if m == st.order {
            st.steps_at_order += 1;
        } else {
            st.order = m;
            st.steps_at_order = 1;
        }

        if let Some(h) = opts.fixed_dt {
            st.dt = h;
            st.order = (st.order + 1).min(opts.order_cap);
            continue;
        }

        // order selection from divided-difference error estimates
        let estimate = |q: usize| -> Option<f64> {
            if q == 0 || st.times.len() < q + 2 {
                return None;
            }
            let ts: Vec<f64> = st.times.iter().take(q + 2).copied().collect();
            let ys: Vec<&[f64]> = st.states.iter().take(q + 2).map(|v| v.as_slice()).collect();
            let dd = divided_difference(&ts, &ys);
            let fact: f64 = (1..=q + 1).map(|j| j as f64).product();
            let scale = lte_coefficient(q) * fact * dt.powi(q as i32 + 1);
            let v: Vec<f64> = dd.iter().map(|d| d * scale).collect();
            Some(wrms(&v, &w, &mask))
        };
        let mut new_order = m;
        let mut new_err = err;
        if let (Some(lower), Some(here)) = (estimate(m.wrapping_sub(1)), estimate(m)) {
            if lower <= here {
                new_order = m - 1;
                new_err = lower;
            }
        }
        if new_order == m && m < opts.order_cap && st.steps_at_order > m {
            if let (Some(here), Some(higher)) = (estimate(m), estimate(m + 1)) {
                if higher < here {
                    new_order = m + 1;
                    new_err = higher;
                }
            }
        }
        if new_order != m {
            st.order = new_order;
            st.steps_at_order = 0;
        }
        let mut factor = if new_err > 0.0 {
            opts.safety * new_err.powf(-1.0 / (new_order as f64 + 1.0))
        } else {
            opts.growth_cap
        };
        factor = factor.min(opts.growth_cap);
        if just_rejected {
            factor = factor.min(1.0);
        }
        just_rejected = false;
        // a step shortened to hit an output time does not shrink the next one
        let base = if hits_target { st.dt.max(dt) } else { dt };
        st.dt = (base * factor).min(opts.dt_max);
    }
    let y = st.states.pop_front().expect("non-empty history");
    Ok((y, stats))
}
