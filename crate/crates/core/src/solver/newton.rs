use super::scaling::ScalingSet;
use super::system::{DaeSystem, StepContext};
use crate::error::{Error, Result};

/// Controls for the damped quasi-Newton corrector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Absolute update tolerance on scaled unknowns.
    pub atol: f64,
    /// Relative update tolerance on scaled unknowns.
    pub rtol: f64,
    /// Row-relative residual tolerance.
    pub ftol: f64,
    pub initial_damping: f64,
    pub damping_ratio: f64,
    pub min_damping: f64,
    /// Densities are never allowed below this value (m^-3).
    pub density_floor: f64,
    pub scaling: ScalingSet,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 12,
            atol: 1e-10,
            rtol: 1e-8,
            ftol: 1e-8,
            initial_damping: 1.0,
            damping_ratio: 0.5,
            min_damping: 1.0 / 1024.0,
            density_floor: 1.0,
            scaling: ScalingSet::DEVICE,
        }
    }
}

impl NewtonOptions {
    /// Defaults with a larger iteration budget, for stationary solves.
    pub fn stationary() -> Self {
        Self {
            max_iterations: 100,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub converged: bool,
    pub iterations: usize,
    /// Row-relative max-norm of the last evaluated residual.
    pub residual_norm: f64,
    /// Damping factor accepted at each iteration.
    pub damping_history: Vec<f64>,
}

impl NewtonReport {
    pub fn min_damping(&self) -> f64 {
        self.damping_history.iter().copied().fold(1.0, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub y: Vec<f64>,
    pub report: NewtonReport,
}

impl NewtonOutcome {
    /// Turn a non-converged outcome into an error.
    pub fn into_converged(self) -> Result<Vec<f64>> {
        if self.report.converged {
            Ok(self.y)
        } else {
            Err(Error::NewtonFailed {
                iterations: self.report.iterations,
                merit: self.report.residual_norm,
            })
        }
    }
}

struct Merit {
    inf: f64,
    rms: f64,
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn merit(f: &[f64], weight: &[f64]) -> Merit {
    let mut inf = 0.0f64;
    let mut sum = 0.0;
    for (r, m) in f.iter().zip(weight) {
        let v = r.abs() / m;
        inf = inf.max(v);
        sum += v * v;
    }
    Merit {
        inf,
        rms: (sum / f.len() as f64).sqrt(),
    }
}

/// Rows whose terms all vanish (e.g. a zero Dirichlet potential) get a
/// weight at roundoff level of their component's largest row.
fn floor_weights(mag: &mut [f64], nc: usize) {
    for c in 0..nc {
        let top = mag.iter().skip(c).step_by(nc).copied().fold(0.0, f64::max);
        let lo = (1e-14 * top).max(f64::MIN_POSITIVE);
        for m in mag.iter_mut().skip(c).step_by(nc) {
            *m = m.max(lo);
        }
    }
}

/// Solve `F(y) = 0` from `y0`. A failed solve (iteration budget exhausted,
/// singular Jacobian, non-finite residual) returns `converged = false` with
/// the last iterate rather than an error.
pub fn newton_solve<S: DaeSystem>(sys: &S, y0: &[f64], ctx: &StepContext<'_>, opts: &NewtonOptions) -> Result<NewtonOutcome> {
    let len = sys.len();
    if y0.len() != len {
        return Err(Error::SizeMismatch {
            what: "newton initial guess",
            got: y0.len(),
            expected: len,
        });
    }
    let nc = sys.components();
    let density: Vec<bool> = (0..nc).map(|c| sys.is_density(c)).collect();
    let sigma = &opts.scaling.residual;
    let bar = &opts.scaling.unknown;
    let floor = opts.density_floor;

    let mut y = y0.to_vec();
    for (k, v) in y.iter_mut().enumerate() {
        if density[k % nc] && *v < floor {
            *v = floor;
        }
    }
    let mut f = vec![0.0; len];
    let mut mag = vec![0.0; len];
    let mut jac = sys.new_jacobian();
    let mut report = NewtonReport {
        converged: false,
        iterations: 0,
        residual_norm: f64::INFINITY,
        damping_history: Vec::new(),
    };
    let mut trial = vec![0.0; len];
    let mut f_trial = vec![0.0; len];

    for it in 1..=opts.max_iterations {
        report.iterations = it;
        sys.residual(&y, ctx, &mut f, Some(&mut mag));
        floor_weights(&mut mag, nc);
        let m0 = merit(&f, &mag);
        report.residual_norm = m0.inf;
        if !m0.inf.is_finite() {
            return Ok(NewtonOutcome { y, report });
        }

        jac.clear();
        sys.jacobian(&y, ctx, &mut jac);
        for k in 0..len {
            jac.scale_col(k, bar[k % nc]);
        }
        // sigma row scaling, then equilibration so that partial pivoting
        // does not swamp the Poisson rows
        let mut row = vec![0.0; len];
        for (k, r) in row.iter_mut().enumerate() {
            let s = 1.0 / sigma[k % nc];
            let top = jac.row_max_abs(k) * s;
            *r = if top > 0.0 { s / top } else { s };
            jac.scale_row(k, *r);
        }
        let lu = match jac.clone().factor() {
            Ok(lu) => lu,
            Err(_) => return Ok(NewtonOutcome { y, report }),
        };
        let mut step: Vec<f64> = (0..len).map(|k| -f[k] * row[k]).collect();
        lu.solve_in_place(&mut step);
        if step.iter().any(|s| !s.is_finite()) {
            return Ok(NewtonOutcome { y, report });
        }
        let small_step = step
            .iter()
            .enumerate()
            .all(|(k, s)| s.abs() <= opts.atol + opts.rtol * (y[k] / bar[k % nc]).abs());
        let step_norm = rms(&step);
        for (k, s) in step.iter_mut().enumerate() {
            *s *= bar[k % nc];
        }

        if small_step && m0.inf <= opts.ftol {
            let mut floored = false;
            for k in 0..len {
                y[k] += step[k];
                if density[k % nc] && y[k] <= floor {
                    y[k] = floor;
                    floored = true;
                }
            }
            report.damping_history.push(1.0);
            report.converged = !floored;
            return Ok(NewtonOutcome { y, report });
        }

        // Backtracking on the row-relative RMS merit, weights frozen at y.
        let mut lambda = opts.initial_damping;
        loop {
            for k in 0..len {
                let mut v = y[k] + lambda * step[k];
                if density[k % nc] && v < floor {
                    v = floor;
                }
                trial[k] = v;
            }
            sys.residual(&trial, ctx, &mut f_trial, None);
            let mt = merit(&f_trial, &mag);
            if mt.rms.is_finite() && mt.rms <= (1.0 - 1e-4 * lambda) * m0.rms {
                break;
            }
            // The Jacobian omits the field dependence of k_diss, so the step
            // need not be a descent direction for the residual. Fall back to
            // the natural monotonicity test on the simplified correction.
            if mt.rms.is_finite() {
                let mut simplified: Vec<f64> = (0..len).map(|k| -f_trial[k] * row[k]).collect();
                lu.solve_in_place(&mut simplified);
                if rms(&simplified) <= (1.0 - 0.25 * lambda) * step_norm {
                    break;
                }
            }
            let next = lambda * opts.damping_ratio;
            if next < opts.min_damping {
                if !mt.rms.is_finite() {
                    return Ok(NewtonOutcome { y, report });
                }
                break;
            }
            lambda = next;
        }
        report.damping_history.push(lambda);
        std::mem::swap(&mut y, &mut trial);
    }
    Ok(NewtonOutcome { y, report })
}
