use crate::integrator::IntegrationStats;
use crate::model::StateVector;

/// One accepted step of the run log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLog {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub order: usize,
    pub newton_iterations: usize,
    pub damping_min: f64,
}

/// Photocurrent history of one run, one row per accepted step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransientRecord {
    pub t: Vec<f64>,
    /// Terminal current including the displacement part (A/m^2).
    pub j: Vec<f64>,
    /// Spatial variation of the displacement-corrected current per row,
    /// `max_e |J_e - J_0| / |J_0|`.
    pub current_variation: Vec<f64>,
    /// States at the requested snapshot times.
    pub snapshots: Vec<StateVector>,
    /// Every accepted state, when requested.
    pub states: Vec<StateVector>,
    pub log: Vec<StepLog>,
    pub stats: IntegrationStats,
    pub final_state: Option<StateVector>,
    /// Smallest density seen in any accepted state.
    pub min_density: f64,
    pub config_hash: Option<u64>,
}

impl TransientRecord {
    /// Current at `t` by linear interpolation in `log t` (linear in `t`
    /// on the first interval when it starts at 0).
    pub fn current_at(&self, t: f64) -> f64 {
        interpolate(&self.t, &self.j, t)
    }
}

pub(crate) fn interpolate(ts: &[f64], ys: &[f64], t: f64) -> f64 {
    if t <= ts[0] {
        return ys[0];
    }
    let k = ts.partition_point(|&s| s < t);
    if k >= ts.len() {
        return *ys.last().expect("non-empty");
    }
    let (t0, t1) = (ts[k - 1], ts[k]);
    let f = if t0 > 0.0 {
        (t / t0).ln() / (t1 / t0).ln()
    } else {
        (t - t0) / (t1 - t0)
    };
    ys[k - 1] + f * (ys[k] - ys[k - 1])
}

/// Paired difference of two records on the times of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDifference {
    pub t: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub diff: Vec<f64>,
}

pub fn paired_difference(a: &TransientRecord, b: &TransientRecord) -> PairedDifference {
    let bb: Vec<f64> = a.t.iter().map(|&t| b.current_at(t)).collect();
    PairedDifference {
        t: a.t.clone(),
        a: a.j.clone(),
        diff: a.j.iter().zip(&bb).map(|(x, y)| y - x).collect(),
        b: bb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_interpolation() {
        let r = TransientRecord {
            t: vec![0.0, 1e-9, 1e-7],
            j: vec![0.0, 1.0, 3.0],
            ..Default::default()
        };
        assert_eq!(r.current_at(5e-10), 0.5);
        assert!((r.current_at(1e-8) - 2.0).abs() < 1e-12);
        assert_eq!(r.current_at(1.0), 3.0);
        let d = paired_difference(&r, &r);
        assert!(d.diff.iter().all(|&x| x == 0.0));
    }
}
