use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrands::IntegrandSpec;
use crate::model::{simplex_gradient, Grid, Simplex};
use crate::solver::banded::BandedSym;

/// Interior unknowns: interior nodes in node order, `N` components each.
#[derive(Debug, Clone)]
pub struct Dofs {
    pub grid: Arc<Grid>,
    pub ncomp: usize,
    node_rank: Vec<Option<usize>>,
    interior: Vec<usize>,
    bandwidth: usize,
}

impl Dofs {
    pub fn new(grid: Arc<Grid>, ncomp: usize) -> Self {
        let mut node_rank = vec![None; grid.node_count()];
        let interior = grid.interior_nodes();
        for (k, &v) in interior.iter().enumerate() {
            node_rank[v] = Some(k);
        }
        let mut spread = 0;
        for s in grid.simplices() {
            let ranks: Vec<usize> = s.vertices[..=grid.dim()]
                .iter()
                .filter_map(|&v| node_rank[v])
                .collect();
            if let (Some(lo), Some(hi)) = (ranks.iter().min(), ranks.iter().max()) {
                spread = spread.max(hi - lo);
            }
        }
        Self {
            grid,
            ncomp,
            node_rank,
            interior,
            bandwidth: (spread + 1) * ncomp - 1,
        }
    }

    pub fn count(&self) -> usize {
        self.interior.len() * self.ncomp
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn dof(&self, node: usize, a: usize) -> Option<usize> {
        self.node_rank[node].map(|k| k * self.ncomp + a)
    }

    /// Adds `t · d` (interior increments) into full nodal values.
    pub fn apply_step(&self, values: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
        let mut out = values.to_vec();
        for (k, &v) in self.interior.iter().enumerate() {
            for a in 0..self.ncomp {
                out[v * self.ncomp + a] += t * d[k * self.ncomp + a];
            }
        }
        out
    }
}

pub struct Assembled {
    pub energy: f64,
    /// Derivative of the energy in each interior unknown.
    pub gradient: Vec<f64>,
    pub hessian: Option<BandedSym>,
}

struct Local {
    energy: f64,
    grad: Vec<f64>,
    hess: Option<DMatrix<f64>>,
}

/// Maps entry `(a, i)` of the simplex gradient to local unknowns `(j, a)`.
fn local_map(grid: &Grid, ncomp: usize, s: &Simplex) -> DMatrix<f64> {
    let d = grid.dim();
    let m = grid.cells_per_side() as f64;
    let mut b = DMatrix::zeros((d + 1) * ncomp, ncomp * d);
    for k in 0..d {
        for a in 0..ncomp {
            let col = a * d + s.axes[k];
            b[((k + 1) * ncomp + a, col)] += m;
            b[(k * ncomp + a, col)] -= m;
        }
    }
    b
}

fn local(
    spec: &IntegrandSpec,
    grid: &Grid,
    ncomp: usize,
    values: &[f64],
    s: &Simplex,
    with_hessian: bool,
) -> Result<Local> {
    let vol = grid.simplex_volume();
    let g = simplex_gradient(grid, ncomp, values, s);
    let b = local_map(grid, ncomp, s);
    let (e, fg, hess) = if with_hessian {
        let (e, fg, h) = spec.eval_all(&g)?;
        (e, fg, Some(&b * h * b.transpose() * vol))
    } else {
        let (e, fg) = spec.eval_grad(&g)?;
        (e, fg, None)
    };
    let grad = (&b * nalgebra::DVector::from_column_slice(fg.as_slice()) * vol)
        .as_slice()
        .to_vec();
    Ok(Local {
        energy: e,
        grad,
        hess,
    })
}

/// Exact discrete energy `Σ_T vol(T) F(∇u|_T)`.
pub fn energy(spec: &IntegrandSpec, grid: &Grid, ncomp: usize, values: &[f64]) -> Result<f64> {
    let vol = grid.simplex_volume();
    let parts: Vec<f64> = grid
        .simplices()
        .par_iter()
        .map(|s| spec.eval(&simplex_gradient(grid, ncomp, values, s)))
        .collect::<Result<_>>()?;
    let e = parts.iter().sum::<f64>() * vol;
    if !e.is_finite() {
        return Err(Error::NonFinite("energy".into()));
    }
    Ok(e)
}

/// Energy, interior gradient and optionally the banded hessian. Local terms are
/// computed in parallel and reduced in simplex order.
pub fn assemble(
    spec: &IntegrandSpec,
    dofs: &Dofs,
    values: &[f64],
    with_hessian: bool,
) -> Result<Assembled> {
    let grid = &*dofs.grid;
    let nc = dofs.ncomp;
    let locals: Vec<Local> = grid
        .simplices()
        .par_iter()
        .map(|s| local(spec, grid, nc, values, s, with_hessian))
        .collect::<Result<_>>()?;
    let mut energy = 0.0;
    let mut gradient = vec![0.0; dofs.count()];
    let mut hessian = with_hessian.then(|| BandedSym::zeros(dofs.count(), dofs.bandwidth));
    for (s, loc) in grid.simplices().iter().zip(&locals) {
        energy += loc.energy;
        let ids: Vec<Option<usize>> = s.vertices[..=grid.dim()]
            .iter()
            .flat_map(|&v| (0..nc).map(move |a| (v, a)))
            .map(|(v, a)| dofs.dof(v, a))
            .collect();
        for (li, id) in ids.iter().enumerate() {
            if let Some(i) = id {
                gradient[*i] += loc.grad[li];
            }
        }
        if let (Some(h), Some(lh)) = (hessian.as_mut(), loc.hess.as_ref()) {
            for (li, id) in ids.iter().enumerate() {
                let Some(i) = *id else { continue };
                for (lj, jd) in ids.iter().enumerate() {
                    let Some(j) = *jd else { continue };
                    if j <= i {
                        h.add_lower(i, j, lh[(li, lj)]);
                    }
                }
            }
        }
    }
    energy *= grid.simplex_volume();
    if !energy.is_finite() || gradient.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("assembly".into()));
    }
    Ok(Assembled {
        energy,
        gradient,
        hessian,
    })
}
