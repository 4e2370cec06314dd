use crate::error::{Error, Result};

/// Strictly increasing node set on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    x: Vec<f64>,
    h: Vec<f64>,
    volume: Vec<f64>,
}

impl Mesh1D {
    pub fn from_nodes(x: Vec<f64>) -> Result<Self> {
        if x.len() < 3 {
            return Err(Error::Domain(format!("mesh needs >= 3 nodes, got {}", x.len())));
        }
        if x[0] != 0.0 {
            return Err(Error::Domain("mesh must start at x = 0".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        if h.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::Domain("mesh nodes must be strictly increasing".into()));
        }
        let n = x.len();
        let mut volume = vec![0.0; n];
        volume[0] = 0.5 * h[0];
        volume[n - 1] = 0.5 * h[n - 2];
        for i in 1..n - 1 {
            volume[i] = 0.5 * (h[i - 1] + h[i]);
        }
        Ok(Self { x, h, volume })
    }

    pub fn uniform(length: f64, nodes: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::Domain("mesh length must be > 0".into()));
        }
        let last = (nodes.max(1) - 1) as f64;
        Self::from_nodes((0..nodes).map(|i| length * i as f64 / last).collect())
    }

    /// Geometric refinement toward both contacts: edge lengths grow by
    /// `ratio` away from each contact until they are ten times the first
    /// edge, and the node set is mirror-symmetric about `L/2`.
    pub fn graded(length: f64, nodes: usize, ratio: f64) -> Result<Self> {
        if ratio == 1.0 {
            return Self::uniform(length, nodes);
        }
        if !(ratio > 1.0) {
            return Err(Error::Domain(format!("grading ratio must be >= 1, got {ratio}")));
        }
        if nodes < 3 {
            return Err(Error::Domain(format!("mesh needs >= 3 nodes, got {nodes}")));
        }
        let edges = nodes - 1;
        let cap = 10.0f64;
        let weights: Vec<f64> = (0..edges)
            .map(|k| {
                let d = k.min(edges - 1 - k) as i32;
                ratio.powi(d).min(cap)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut x = vec![0.0; nodes];
        let mut acc = 0.0;
        for k in 0..edges {
            acc += weights[k];
            x[k + 1] = length * acc / total;
        }
        // exact mirror symmetry
        for i in nodes.div_ceil(2)..nodes {
            x[i] = length - x[nodes - 1 - i];
        }
        x[nodes - 1] = length;
        Self::from_nodes(x)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn edges(&self) -> &[f64] {
        &self.h
    }

    /// Control-volume length of every node (half-cells at the contacts).
    pub fn volumes(&self) -> &[f64] {
        &self.volume
    }

    pub fn length(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn edge_midpoints(&self) -> Vec<f64> {
        self.x.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn min_edge(&self) -> f64 {
        self.h.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}
