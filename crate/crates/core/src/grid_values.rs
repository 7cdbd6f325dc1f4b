//! Storage for per-node values on an [`SGrid`].

use crate::error::{Error, Result};
use crate::time_transform::{SGrid, Side};

/// Values at the `N + 1` grid nodes, `dim` coefficients per node, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeValues {
    grid: SGrid,
    dim: usize,
    data: Vec<f64>,
}

/// State trajectory `y(s_i)`.
pub type Trajectory = NodeValues;
/// Control values `u(s_i)`, single-valued at `s = 1`.
pub type ControlGrid = NodeValues;

impl NodeValues {
    pub fn zeros(grid: SGrid, dim: usize) -> Self {
        Self {
            grid,
            dim,
            data: vec![0.0; grid.n_nodes() * dim],
        }
    }

    pub fn from_vec(grid: SGrid, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.n_nodes() * dim {
            return Err(Error::Dimension {
                what: "node values",
                expected: grid.n_nodes() * dim,
                got: data.len(),
            });
        }
        Ok(Self { grid, dim, data })
    }

    pub fn from_fn(grid: SGrid, dim: usize, mut f: impl FnMut(usize, f64, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.n_nodes() * dim);
        for i in 0..grid.n_nodes() {
            let s = grid.node(i);
            for c in 0..dim {
                data.push(f(i, s, c));
            }
        }
        Self { grid, dim, data }
    }

    pub fn grid(&self) -> SGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn check_shape(&self, grid: SGrid, dim: usize, what: &'static str) -> Result<()> {
        if self.grid != grid {
            return Err(Error::Dimension {
                what,
                expected: grid.n_steps(),
                got: self.grid.n_steps(),
            });
        }
        if self.dim != dim {
            return Err(Error::Dimension {
                what,
                expected: dim,
                got: self.dim,
            });
        }
        Ok(())
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= a);
        out
    }
}

/// Values on the grid where the node `s = 1` carries two one-sided entries.
///
/// Row layout: nodes `0..K`, then `K` from the left, `K` from the right, then
/// nodes `K+1..=N`; `N + 2` rows in total.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitValues {
    grid: SGrid,
    dim: usize,
    data: Vec<f64>,
}

/// Adjoint state with `p(1-)` and `p(1+)` stored separately.
pub type AdjointTrajectory = SplitValues;

impl SplitValues {
    pub fn zeros(grid: SGrid, dim: usize) -> Self {
        Self {
            grid,
            dim,
            data: vec![0.0; (grid.n_nodes() + 1) * dim],
        }
    }

    /// Builds the values from a function of `(node, side, component)`; away
    /// from `s = 1` the side is the one of the surrounding half-interval.
    pub fn from_fn(grid: SGrid, dim: usize, mut f: impl FnMut(usize, Side, usize) -> f64) -> Self {
        let mut out = Self::zeros(grid, dim);
        for r in 0..grid.n_nodes() + 1 {
            let (i, side) = out.row_node(r);
            for c in 0..dim {
                out.data[r * dim + c] = f(i, side, c);
            }
        }
        out
    }

    /// Fills each storage row with `f(row, out)`.
    pub fn from_rows(grid: SGrid, dim: usize, mut f: impl FnMut(usize, &mut [f64])) -> Self {
        let mut out = Self::zeros(grid, dim);
        for (r, chunk) in out.data.chunks_mut(dim).enumerate() {
            f(r, chunk);
        }
        out
    }

    pub fn grid(&self) -> SGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.grid.n_nodes() + 1
    }

    /// Node index and side represented by storage row `r`.
    pub fn row_node(&self, r: usize) -> (usize, Side) {
        let k = self.grid.mid();
        if r < k {
            (r, Side::Left)
        } else if r == k {
            (k, Side::Left)
        } else {
            // r == k + 1 is the right-sided copy of node k.
            (r - 1, Side::Right)
        }
    }

    fn row(&self, i: usize, side: Side) -> usize {
        let k = self.grid.mid();
        if i < k || (i == k && side == Side::Left) {
            i
        } else {
            i + 1
        }
    }

    /// Value at node `i`; `side` only matters at `s = 1`.
    pub fn at(&self, i: usize, side: Side) -> &[f64] {
        let r = self.row(i, side);
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn at_mut(&mut self, i: usize, side: Side) -> &mut [f64] {
        let r = self.row(i, side);
        &mut self.data[r * self.dim..(r + 1) * self.dim]
    }

    /// Value at storage row `r`.
    pub fn row_values(&self, r: usize) -> &[f64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    /// `p(1+) - p(1-)`.
    pub fn jump(&self) -> Vec<f64> {
        let k = self.grid.mid();
        self.at(k, Side::Right)
            .iter()
            .zip(self.at(k, Side::Left))
            .map(|(r, l)| r - l)
            .collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
