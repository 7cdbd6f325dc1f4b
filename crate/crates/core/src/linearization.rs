//! Jacobians and CN step factorisations frozen along a forward trajectory,
//! shared by the tangent and adjoint sweeps.

use std::sync::OnceLock;

use crate::error::Result;
use crate::grid_values::{ControlGrid, Trajectory};
use crate::linalg::{Factorization, Matrix};
use crate::problem::ProblemSpec;
use crate::time_transform::{SGrid, TauParameter};

#[derive(Debug)]
pub struct Linearization {
    grid: SGrid,
    tp: TauParameter,
    /// `F_y` at every node.
    jac: Vec<Matrix>,
    /// `F_y^T` at every node, as reported by the model.
    jac_t: Vec<Matrix>,
    /// Step `j`: `M - c_j F_y(j)^T`.
    adjoint_lu: Vec<Factorization>,
    /// Step `i`: `M - c_i F_y(i + 1)`, built on first use.
    tangent_lu: OnceLock<Vec<Factorization>>,
}

impl Linearization {
    pub fn new(problem: &ProblemSpec, u: &ControlGrid, tp: TauParameter, y: &Trajectory) -> Result<Self> {
        let grid = y.grid();
        u.check_shape(grid, problem.control_dim(), "control grid")?;
        y.check_shape(grid, problem.state_dim(), "trajectory")?;
        crate::forward::check_horizon(problem, tp)?;
        let model = problem.model();
        let nodes = 0..grid.n_nodes();
        let jac: Vec<Matrix> = nodes
            .clone()
            .map(|i| model.rhs_jacobian_y(y.node(i), u.node(i)))
            .collect();
        let jac_t: Vec<Matrix> = nodes
            .map(|i| model.rhs_jacobian_y_transpose(y.node(i), u.node(i)))
            .collect();
        let mass = model.state_mass();
        let adjoint_lu = (0..grid.n_steps())
            .map(|j| {
                mass.combine(1.0, &jac_t[j], -step_coefficient(grid, tp, j))
                    .factor()
                    .map_err(|e| e.at_step(j))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            tp,
            jac,
            jac_t,
            adjoint_lu,
            tangent_lu: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> SGrid {
        self.grid
    }

    pub fn tau(&self) -> TauParameter {
        self.tp
    }

    pub fn jacobian(&self, i: usize) -> &Matrix {
        &self.jac[i]
    }

    pub fn jacobian_transpose(&self, i: usize) -> &Matrix {
        &self.jac_t[i]
    }

    /// `c_i = h pi_dot / 2` for the step `i -> i + 1`.
    pub fn coefficient(&self, i: usize) -> f64 {
        step_coefficient(self.grid, self.tp, i)
    }

    pub(crate) fn adjoint_factor(&self, j: usize) -> &Factorization {
        &self.adjoint_lu[j]
    }

    pub(crate) fn tangent_factors(&self, mass: &Matrix) -> Result<&[Factorization]> {
        if let Some(f) = self.tangent_lu.get() {
            return Ok(f);
        }
        let built = (0..self.grid.n_steps())
            .map(|i| {
                mass.combine(1.0, &self.jac[i + 1], -self.coefficient(i))
                    .factor()
                    .map_err(|e| e.at_step(i + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        // A concurrent initialiser may win; both results are identical.
        Ok(self.tangent_lu.get_or_init(|| built))
    }
}

fn step_coefficient(grid: SGrid, tp: TauParameter, i: usize) -> f64 {
    0.5 * grid.step() * tp.pi_dot_side(grid.step_side(i))
}
