//! Exact versus lumped memory term of the reduced model.

use crate::error::{Error, Result};

/// Constant coefficients of the memory kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryCoefficients {
    pub gamma: f64,
    pub kdiss: f64,
    pub tau: f64,
}

/// Volume averages of `I(t)`, `I~(t)` and `I - I~` (m^-3 s^-1).
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryDiagnostics {
    pub t: Vec<f64>,
    pub exact: Vec<f64>,
    pub lumped: Vec<f64>,
    pub diff: Vec<f64>,
}

impl MemoryDiagnostics {
    pub fn peak_abs_diff(&self) -> f64 {
        self.diff.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,I,I_lumped,diff\n");
        for k in 0..self.t.len() {
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.t[k], self.exact[k], self.lumped[k], self.diff[k]
            ));
        }
        s
    }
}

/// `I(t_k) = gamma k_diss int_0^t_k [lambda(s) - lambda(t_k)] exp(-(t_k - s)/tau) ds`
/// by composite trapezoid over the stored samples, and the lumped
/// `gamma k_diss (t/2) exp(-t/tau) [lambda(0) - lambda(t)]`, where
/// `lambda = p n` per node. `times[0]` must be the switch-on time 0.
pub fn memory_diagnostics(times: &[f64], np: &[Vec<f64>], volumes: &[f64], c: MemoryCoefficients) -> Result<MemoryDiagnostics> {
    if times.len() < 3 {
        return Err(Error::History(format!("need at least 3 samples, got {}", times.len())));
    }
    if np.len() != times.len() {
        return Err(Error::SizeMismatch {
            what: "np history",
            got: np.len(),
            expected: times.len(),
        });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::History("times must be strictly increasing".into()));
    }
    if let Some(bad) = np.iter().find(|r| r.len() != volumes.len()) {
        return Err(Error::SizeMismatch {
            what: "np sample",
            got: bad.len(),
            expected: volumes.len(),
        });
    }
    let total: f64 = volumes.iter().sum();
    let avg = |f: &dyn Fn(usize) -> f64| (0..volumes.len()).map(|i| volumes[i] * f(i)).sum::<f64>() / total;
    let pref = c.gamma * c.kdiss;
    let t0 = times[0];
    let mut out = MemoryDiagnostics {
        t: times.to_vec(),
        exact: Vec::with_capacity(times.len()),
        lumped: Vec::with_capacity(times.len()),
        diff: Vec::with_capacity(times.len()),
    };
    for k in 0..times.len() {
        let tk = times[k];
        let exact = avg(&|i| {
            let f = |j: usize| (np[j][i] - np[k][i]) * (-(tk - times[j]) / c.tau).exp();
            (0..k).map(|j| 0.5 * (times[j + 1] - times[j]) * (f(j) + f(j + 1))).sum::<f64>() * pref
        });
        let el = tk - t0;
        let lumped = avg(&|i| pref * 0.5 * el * (-el / c.tau).exp() * (np[0][i] - np[k][i]));
        out.exact.push(exact);
        out.lumped.push(lumped);
        out.diff.push(exact - lumped);
    }
    Ok(out)
}
