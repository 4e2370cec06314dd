use crate::error::{Error, Result};

/// Row (residual) and column (unknown) scales per component, ordered
/// `phi, n, p, X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSet {
    pub residual: [f64; 4],
    pub unknown: [f64; 4],
}

impl ScalingSet {
    /// sigma = (1, 1e3, 1e3, 1e2), bars = (1, 1e22, 1e22, 1e19).
    pub const DEVICE: ScalingSet = ScalingSet {
        residual: [1.0, 1e3, 1e3, 1e2],
        unknown: [1.0, 1e22, 1e22, 1e19],
    };

    pub const UNIT: ScalingSet = ScalingSet {
        residual: [1.0; 4],
        unknown: [1.0; 4],
    };

    pub fn new(residual: [f64; 4], unknown: [f64; 4]) -> Result<Self> {
        if residual.iter().chain(&unknown).any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Domain("scaling factors must be finite and > 0".into()));
        }
        Ok(Self { residual, unknown })
    }

    /// `y / bar`, componentwise over interleaved storage.
    pub fn scale(&self, y: &[f64], components: usize) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(k, v)| v / self.unknown[k % components])
            .collect()
    }

    pub fn unscale(&self, y_hat: &[f64], components: usize) -> Vec<f64> {
        y_hat
            .iter()
            .enumerate()
            .map(|(k, v)| v * self.unknown[k % components])
            .collect()
    }
}

impl Default for ScalingSet {
    fn default() -> Self {
        Self::DEVICE
    }
}
