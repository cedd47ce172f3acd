use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{GradMat, Grid, Simplex};

/// Piecewise-linear `ℝ^N`-valued field on a Kuhn grid. Nodal values are
/// stored node-major: entry `node * N + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    grid: Arc<Grid>,
    ncomp: usize,
    values: Vec<f64>,
    gradients: Vec<GradMat>,
}

/// Exact gradient of the linear interpolant on one Kuhn simplex.
pub fn simplex_gradient(grid: &Grid, ncomp: usize, values: &[f64], s: &Simplex) -> GradMat {
    let m = grid.cells_per_side() as f64;
    let mut g = GradMat::zeros(ncomp, grid.dim());
    for k in 0..grid.dim() {
        let (v0, v1) = (s.vertices[k], s.vertices[k + 1]);
        for a in 0..ncomp {
            g.set(a, s.axes[k], (values[v1 * ncomp + a] - values[v0 * ncomp + a]) * m);
        }
    }
    g
}

impl DiscreteField {
    pub fn new(grid: Arc<Grid>, ncomp: usize, values: Vec<f64>) -> Result<Self> {
        if ncomp == 0 || values.len() != grid.node_count() * ncomp {
            return Err(Error::ShapeMismatch {
                expected: (grid.node_count(), ncomp),
                got: (values.len(), 1),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("nodal value".into()));
        }
        let gradients = grid
            .simplices()
            .iter()
            .map(|s| simplex_gradient(&grid, ncomp, &values, s))
            .collect();
        Ok(Self {
            grid,
            ncomp,
            values,
            gradients,
        })
    }

    /// Nodal interpolant of `f`, which returns `N` components.
    pub fn from_fn(grid: Arc<Grid>, ncomp: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.node_count() * ncomp);
        for v in 0..grid.node_count() {
            let u = f(&grid.node_coords(v));
            if u.len() != ncomp {
                return Err(Error::ShapeMismatch {
                    expected: (ncomp, 1),
                    got: (u.len(), 1),
                });
            }
            values.extend(u);
        }
        Self::new(grid, ncomp, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<Grid> {
        Arc::clone(&self.grid)
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, node: usize, a: usize) -> f64 {
        self.values[node * self.ncomp + a]
    }

    pub fn gradients(&self) -> &[GradMat] {
        &self.gradients
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
