use super::record::TransientRecord;
use crate::error::{Error, Result};

/// Tail spread tolerated by the stationarity test, relative to `J_inf`.
pub const TAIL_FLATNESS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiseTimeReport {
    pub j_inf: f64,
    pub t10: f64,
    pub t50: f64,
    pub t90: f64,
}

impl RiseTimeReport {
    pub fn rise_time(&self) -> f64 {
        self.t90 - self.t10
    }
}

/// Threshold crossings of a photocurrent record. `J_inf` is the mean of the
/// last 5% of the samples.
pub fn extract_rise_time(record: &TransientRecord) -> Result<RiseTimeReport> {
    rise_time_of(&record.t, &record.j)
}

pub fn rise_time_of(t: &[f64], j: &[f64]) -> Result<RiseTimeReport> {
    if t.len() < 3 || t.len() != j.len() {
        return Err(Error::Empty("record needs at least 3 samples".into()));
    }
    let tail = ((t.len() as f64 * 0.05).ceil() as usize).max(2);
    let window = &j[j.len() - tail..];
    let j_inf = window.iter().sum::<f64>() / tail as f64;
    if !(j_inf.abs() > 0.0) || !j_inf.is_finite() {
        return Err(Error::Domain("steady current is zero; thresholds undefined".into()));
    }
    let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo) / j_inf.abs() > TAIL_FLATNESS {
        return Err(Error::NotStationary(format!(
            "final samples vary by {:.3e} relative to J_inf",
            (hi - lo) / j_inf.abs()
        )));
    }
    let cross = |frac: f64| -> Result<f64> {
        let level = frac;
        let r = |k: usize| j[k] / j_inf;
        let k = (0..t.len())
            .find(|&k| r(k) >= level)
            .ok_or_else(|| Error::NotStationary(format!("never reaches {frac} of J_inf")))?;
        if k == 0 {
            return Ok(t[0]);
        }
        let (t0, t1) = (t[k - 1], t[k]);
        let f = (level - r(k - 1)) / (r(k) - r(k - 1));
        Ok(if t0 > 0.0 {
            (t0.ln() + f * (t1.ln() - t0.ln())).exp()
        } else {
            t0 + f * (t1 - t0)
        })
    };
    Ok(RiseTimeReport {
        j_inf,
        t10: cross(0.1)?,
        t50: cross(0.5)?,
        t90: cross(0.9)?,
    })
}
