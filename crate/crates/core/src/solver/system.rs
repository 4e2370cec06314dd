use crate::discretization::BandMatrix;

/// Time-level information for one implicit solve. A stationary solve has
/// `theta0 = 0` and no history.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepContext<'a> {
    /// Time of the level being solved for (seconds since illumination).
    pub t: f64,
    pub theta0: f64,
    /// `sum_{k>=1} theta_k y_{K-k}`, same layout as the unknown vector.
    pub history: Option<&'a [f64]>,
}

impl<'a> StepContext<'a> {
    pub fn stationary(t: f64) -> Self {
        Self {
            t,
            theta0: 0.0,
            history: None,
        }
    }
}

/// Semi-explicit DAE on a 1D node set, unknowns interleaved per node.
pub trait DaeSystem {
    /// Unknowns per node.
    fn components(&self) -> usize;
    fn nodes(&self) -> usize;

    fn len(&self) -> usize {
        self.components() * self.nodes()
    }

    /// Whether component `c` carries a time derivative.
    fn is_differential(&self, c: usize) -> bool;

    /// Whether component `c` is a density that must stay positive.
    fn is_density(&self, c: usize) -> bool;

    /// Residual `F(y)`; when `magnitude` is given it receives, per row, the
    /// sum of absolute values of the terms making up that row.
    fn residual(&self, y: &[f64], ctx: &StepContext<'_>, out: &mut [f64], magnitude: Option<&mut [f64]>);

    /// Approximate Jacobian `dF/dy` (field dependence of coefficients
    /// omitted).
    fn jacobian(&self, y: &[f64], ctx: &StepContext<'_>, jac: &mut BandMatrix);

    fn half_bandwidth(&self) -> usize {
        2 * self.components() - 1
    }

    fn new_jacobian(&self) -> BandMatrix {
        let b = self.half_bandwidth();
        BandMatrix::zeros(self.len(), b, b)
    }
}

/// Central-difference column `dF/dy_j`, used as a test oracle for the
/// assembled Jacobians.
pub fn fd_jacobian_column<S: DaeSystem>(sys: &S, y: &[f64], ctx: &StepContext<'_>, j: usize, rel_step: f64) -> Vec<f64> {
    let h = rel_step * y[j].abs().max(1e-30);
    let mut yp = y.to_vec();
    let mut ym = y.to_vec();
    yp[j] += h;
    ym[j] -= h;
    let mut fp = vec![0.0; y.len()];
    let mut fm = vec![0.0; y.len()];
    sys.residual(&yp, ctx, &mut fp, None);
    sys.residual(&ym, ctx, &mut fm, None);
    fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}
