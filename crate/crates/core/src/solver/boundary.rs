use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::Grid;

/// Named families of Dirichlet data, scaled by an amplitude `A`. Component `a`
/// uses the coordinate `x_k`, `k = a mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryFamily {
    /// `A x_k`.
    Linear,
    /// `A sin(2π x_k)`.
    Sine,
    /// `A (x_k² − x_{k+1}²)`.
    Saddle,
}

impl BoundaryFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "linear" => Ok(Self::Linear),
            "sine" => Ok(Self::Sine),
            "saddle" => Ok(Self::Saddle),
            other => Err(Error::Domain(format!("unknown boundary family '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Sine => "sine",
            Self::Saddle => "saddle",
        }
    }

    pub fn eval(&self, x: &[f64], comp: usize, amplitude: f64) -> f64 {
        let n = x.len();
        let k = comp % n;
        match self {
            Self::Linear => amplitude * x[k],
            Self::Sine => amplitude * (2.0 * PI * x[k]).sin(),
            Self::Saddle => amplitude * (x[k] * x[k] - x[(k + 1) % n] * x[(k + 1) % n]),
        }
    }
}

/// Nodal values of the family at every node (interior entries included).
pub fn boundary_values(grid: &Grid, ncomp: usize, family: BoundaryFamily, amplitude: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.node_count() * ncomp);
    for v in 0..grid.node_count() {
        let x = grid.node_coords(v);
        out.extend((0..ncomp).map(|a| family.eval(&x, a, amplitude)));
    }
    out
}

fn bump(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Convolves the boundary data with the normalized bump `exp(−1/(1−(r/ε)²))`,
/// `r` the Euclidean distance between boundary nodes. Widths below one cell
/// return the data unchanged; interior entries are copied.
pub fn mollify_boundary(grid: &Grid, ncomp: usize, values: &[f64], eps: f64) -> Vec<f64> {
    if eps < grid.h() {
        return values.to_vec();
    }
    let nodes = grid.boundary_nodes();
    let coords: Vec<Vec<f64>> = nodes.iter().map(|&v| grid.node_coords(v)).collect();
    let mut out = values.to_vec();
    for (i, &v) in nodes.iter().enumerate() {
        let mut acc = vec![0.0; ncomp];
        let mut total = 0.0;
        for (j, &w) in nodes.iter().enumerate() {
            let d2: f64 = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let k = bump(d2.sqrt() / eps);
            if k > 0.0 {
                total += k;
                for (a, acc_a) in acc.iter_mut().enumerate() {
                    *acc_a += k * values[w * ncomp + a];
                }
            }
        }
        for (a, acc_a) in acc.iter().enumerate() {
            out[v * ncomp + a] = acc_a / total;
        }
    }
    out
}
