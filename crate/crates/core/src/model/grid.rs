use crate::error::{Error, Result};

/// One simplex of the Kuhn triangulation: a monotone lattice path
/// `v_0, v_0 + e_{axes[0]}, ...` through a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simplex {
    /// `dim + 1` vertex indices, path order.
    pub vertices: [usize; 4],
    /// `axes[k]` is the axis stepped between `vertices[k]` and `vertices[k+1]`.
    pub axes: [usize; 3],
    pub cell: usize,
}

/// Uniform Kuhn triangulation of `[0,1]^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    cells_per_side: usize,
    simplices: Vec<Simplex>,
}

fn permutations(dim: usize) -> Vec<Vec<usize>> {
    match dim {
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
    }
}

impl Grid {
    pub fn new(dim: usize, cells_per_side: usize) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::Domain(format!("grid dimension {dim} not in {{2,3}}")));
        }
        if cells_per_side < 2 {
            return Err(Error::Domain("cells_per_side must be at least 2".into()));
        }
        let mut g = Self {
            dim,
            cells_per_side,
            simplices: Vec::new(),
        };
        let perms = permutations(dim);
        let mut simplices = Vec::with_capacity(g.cell_count() * perms.len());
        for cell in 0..g.cell_count() {
            let corner = g.cell_multi(cell);
            let base = g.node_index(&corner);
            for perm in &perms {
                let mut vertices = [0usize; 4];
                let mut axes = [0usize; 3];
                let mut v = base;
                vertices[0] = v;
                for (k, &ax) in perm.iter().enumerate() {
                    v += g.stride(ax);
                    vertices[k + 1] = v;
                    axes[k] = ax;
                }
                simplices.push(Simplex {
                    vertices,
                    axes,
                    cell,
                });
            }
        }
        g.simplices = simplices;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn h(&self) -> f64 {
        1.0 / self.cells_per_side as f64
    }

    pub fn nodes_per_side(&self) -> usize {
        self.cells_per_side + 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_side().pow(self.dim as u32)
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side.pow(self.dim as u32)
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Simplices per cell: `dim!`.
    pub fn simplices_per_cell(&self) -> usize {
        if self.dim == 2 {
            2
        } else {
            6
        }
    }

    pub fn simplex_volume(&self) -> f64 {
        self.h().powi(self.dim as i32) / self.simplices_per_cell() as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    /// Index stride of a unit step along `axis`; the first axis is fastest.
    pub fn stride(&self, axis: usize) -> usize {
        self.nodes_per_side().pow(axis as u32)
    }

    pub fn node_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .enumerate()
            .map(|(ax, &i)| i * self.stride(ax))
            .sum()
    }

    pub fn node_multi(&self, node: usize) -> Vec<usize> {
        let m = self.nodes_per_side();
        (0..self.dim)
            .map(|ax| (node / m.pow(ax as u32)) % m)
            .collect()
    }

    pub fn node_coords(&self, node: usize) -> Vec<f64> {
        let h = self.h();
        self.node_multi(node)
            .into_iter()
            .map(|i| i as f64 * h)
            .collect()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.node_multi(node)
            .into_iter()
            .any(|i| i == 0 || i == self.cells_per_side)
    }

    pub fn cell_multi(&self, cell: usize) -> Vec<usize> {
        let m = self.cells_per_side;
        (0..self.dim)
            .map(|ax| (cell / m.pow(ax as u32)) % m)
            .collect()
    }

    pub fn cell_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .enumerate()
            .map(|(ax, &i)| i * self.cells_per_side.pow(ax as u32))
            .sum()
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        let h = self.h();
        self.cell_multi(cell)
            .into_iter()
            .map(|i| (i as f64 + 0.5) * h)
            .collect()
    }

    pub fn barycenter(&self, s: &Simplex) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for &v in &s.vertices[..=self.dim] {
            for (ci, x) in c.iter_mut().zip(self.node_coords(v)) {
                *ci += x;
            }
        }
        c.iter().map(|x| x / (self.dim + 1) as f64).collect()
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&v| self.is_boundary(v)).collect()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&v| !self.is_boundary(v))
            .collect()
    }
}
