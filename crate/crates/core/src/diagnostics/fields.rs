use crate::error::Result;
use crate::integrands::{v_map, IntegrandSpec};
use crate::model::{DiscreteField, GradMat, Grid, Region, Regime};

/// Per-simplex `V_{μ,p}(∇u)` and `V_{1,q'}(F'(∇u))`.
pub fn v_fields(
    field: &DiscreteField,
    f: &IntegrandSpec,
    r: &Regime,
) -> Result<(Vec<GradMat>, Vec<GradMat>)> {
    let mut vp = Vec::with_capacity(field.gradients().len());
    let mut vq = Vec::with_capacity(field.gradients().len());
    for z in field.gradients() {
        vp.push(v_map(r.mu, r.p, z));
        vq.push(v_map(1.0, r.q_conj(), &f.gradient(z)?));
    }
    Ok((vp, vq))
}

/// Averages per-simplex values over each cell, giving values at cell centers.
pub fn cell_average(grid: &Grid, per_simplex: &[f64], width: usize) -> Vec<f64> {
    let k = grid.simplices_per_cell();
    let mut out = vec![0.0; grid.cell_count() * width];
    for (s, chunk) in grid.simplices().iter().zip(per_simplex.chunks_exact(width)) {
        for (o, v) in out[s.cell * width..(s.cell + 1) * width].iter_mut().zip(chunk) {
            *o += v;
        }
    }
    out.iter_mut().for_each(|x| *x /= k as f64);
    out
}

/// `|∇_h w|²` at each cell center for a cell field with `width` components,
/// central differences inside, one-sided at the box edges.
pub fn cell_grad_sq(grid: &Grid, cells: &[f64], width: usize) -> Vec<f64> {
    let m = grid.cells_per_side();
    let h = grid.h();
    (0..grid.cell_count())
        .map(|c| {
            let multi = grid.cell_multi(c);
            let mut total = 0.0;
            for ax in 0..grid.dim() {
                let i = multi[ax];
                let (lo, hi) = (i.saturating_sub(1), (i + 1).min(m - 1));
                let mut a = multi.clone();
                let mut b = multi.clone();
                a[ax] = lo;
                b[ax] = hi;
                let (ia, ib) = (grid.cell_index(&a), grid.cell_index(&b));
                let span = (hi - lo) as f64 * h;
                for k in 0..width {
                    let d = (cells[ib * width + k] - cells[ia * width + k]) / span;
                    total += d * d;
                }
            }
            total
        })
        .collect()
}

/// `|∇_h V_{μ,p}|² + |∇_h V_{1,q'}(F')|²` at cell centers, kept separately.
#[derive(Debug, Clone)]
pub struct VGradients {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
}

impl VGradients {
    pub fn total(&self, cell: usize) -> f64 {
        self.primal[cell] + self.dual[cell]
    }
}

fn flatten(v: &[GradMat]) -> (Vec<f64>, usize) {
    let width = v.first().map_or(0, |g| g.len());
    (v.iter().flat_map(|g| g.as_slice().to_vec()).collect(), width)
}

pub fn v_gradients(field: &DiscreteField, f: &IntegrandSpec, r: &Regime) -> Result<VGradients> {
    let grid = field.grid();
    let (vp, vq) = v_fields(field, f, r)?;
    let (fp, wp) = flatten(&vp);
    let (fq, wq) = flatten(&vq);
    Ok(VGradients {
        primal: cell_grad_sq(grid, &cell_average(grid, &fp, wp), wp),
        dual: cell_grad_sq(grid, &cell_average(grid, &fq, wq), wq),
    })
}

pub fn cells_in(grid: &Grid, region: &Region) -> Vec<usize> {
    (0..grid.cell_count())
        .filter(|&c| region.contains(&grid.cell_center(c)))
        .collect()
}

pub fn simplices_in(grid: &Grid, region: &Region) -> Vec<usize> {
    grid.simplices()
        .iter()
        .enumerate()
        .filter(|(_, s)| region.contains(&grid.barycenter(s)))
        .map(|(k, _)| k)
        .collect()
}

/// `avg_B F(∇u)` over simplices with barycenter in `B`.
pub fn average_energy(field: &DiscreteField, f: &IntegrandSpec, region: &Region) -> Result<f64> {
    let ids = simplices_in(field.grid(), region);
    let mut total = 0.0;
    for &k in &ids {
        total += f.eval(&field.gradients()[k])?;
    }
    Ok(total / ids.len().max(1) as f64)
}
