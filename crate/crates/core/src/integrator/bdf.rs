use crate::error::{Error, Result};

/// Weights `theta_k` with `sum theta_k y(t_{K-k}) = y'(t_K)` for the
/// interpolating polynomial through `times` (`times[0] = t_K`, then older
/// levels).
pub fn bdf_coefficients(times: &[f64]) -> Result<Vec<f64>> {
    let m = times.len().checked_sub(1).filter(|&m| (1..=5).contains(&m)).ok_or_else(|| {
        Error::Domain(format!("BDF stencil needs 2..=6 times, got {}", times.len()))
    })?;
    for a in 0..=m {
        for b in a + 1..=m {
            if times[a] == times[b] {
                return Err(Error::Domain(format!("duplicate time {} in BDF stencil", times[a])));
            }
        }
    }
    let tk = times[0];
    let mut theta = vec![0.0; m + 1];
    // l_0'(t_K) = sum_{j != 0} 1/(t_K - t_j)
    theta[0] = times[1..].iter().map(|tj| 1.0 / (tk - tj)).sum();
    for k in 1..=m {
        // l_k'(t_K) = prod_{j != k, 0} (t_K - t_j) / prod_{j != k} (t_k - t_j)
        let mut num = 1.0;
        let mut den = 1.0;
        for j in 0..=m {
            if j == k {
                continue;
            }
            den *= times[k] - times[j];
            if j != 0 {
                num *= tk - times[j];
            }
        }
        theta[k] = num / den;
    }
    Ok(theta)
}

/// Lagrange extrapolation to `t` through the points `(times[i], ys[i])`.
pub fn predict(times: &[f64], ys: &[&[f64]], t: f64) -> Result<Vec<f64>> {
    if times.is_empty() || times.len() != ys.len() {
        return Err(Error::History("predictor needs a non-empty, consistent history".into()));
    }
    let len = ys[0].len();
    let mut out = vec![0.0; len];
    for (i, (ti, yi)) in times.iter().zip(ys).enumerate() {
        let mut w = 1.0;
        for (j, tj) in times.iter().enumerate() {
            if j != i {
                w *= (t - tj) / (ti - tj);
            }
        }
        for (o, v) in out.iter_mut().zip(yi.iter()) {
            *o += w * v;
        }
    }
    Ok(out)
}

/// `L_m = 1 / ((m+1) sum_{j<=m} 1/j)`, the leading error coefficient of the
/// fixed-step BDF of order `m` relative to `h^{m+1} y^{(m+1)}`.
pub fn lte_coefficient(m: usize) -> f64 {
    let h: f64 = (1..=m).map(|j| 1.0 / j as f64).sum();
    1.0 / ((m as f64 + 1.0) * h)
}

/// Factor turning `corrected - predicted` into a local error estimate.
pub fn error_constant(m: usize) -> f64 {
    let l = lte_coefficient(m);
    l / (1.0 + l)
}

/// Weighted RMS norm over the entries selected by `mask`.
pub fn wrms(v: &[f64], weights: &[f64], mask: &[bool]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((x, w), &on) in v.iter().zip(weights).zip(mask) {
        if on {
            let r = x / w;
            sum += r * r;
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    }
}

/// `C(m) * ||corrected - predicted||` in the WRMS norm.
pub fn error_estimate(corrected: &[f64], predicted: &[f64], m: usize, weights: &[f64], mask: &[bool]) -> f64 {
    let d: Vec<f64> = corrected.iter().zip(predicted).map(|(c, p)| c - p).collect();
    error_constant(m) * wrms(&d, weights, mask)
}

/// Highest divided difference of the points `(times[i], ys[i])`.
pub fn divided_difference(times: &[f64], ys: &[&[f64]]) -> Vec<f64> {
    let n = times.len();
    let mut table: Vec<Vec<f64>> = ys.iter().map(|y| y.to_vec()).collect();
    for level in 1..n {
        for i in 0..n - level {
            let dt = times[i] - times[i + level];
            let (a, b) = (&table[i], &table[i + 1]);
            table[i] = a.iter().zip(b).map(|(x, y)| (x - y) / dt).collect();
        }
    }
    table.swap_remove(0)
}
