//! Backward systems with a jump at `s = 1`: the adjoint state and the generic
//! operator `K*`.
//!
//! `-q' = pi_dot f_y^* q + w` on each half, `q(2) = b`,
//! `q(1+) - q(1-) + a = 0`, discretised with backward CN on the forward grid.

use crate::error::{Error, Result};
use crate::grid_values::{AdjointTrajectory, ControlGrid, SplitValues, Trajectory};
use crate::linalg::axpy;
use crate::linearization::Linearization;
use crate::problem::ProblemSpec;
use crate::time_transform::{Side, TauParameter};

/// Backward sweep with all data given as load vectors (`M a`, `M b`, `M w`).
pub(crate) fn k_star_dual(
    problem: &ProblemSpec,
    lin: &Linearization,
    a_load: &[f64],
    b_load: &[f64],
    w_load: &SplitValues,
) -> Result<AdjointTrajectory> {
    let grid = lin.grid();
    let n = problem.state_dim();
    let k = grid.mid();
    let mass = problem.model().state_mass();
    let half = 0.5 * grid.step();
    let mut q = SplitValues::zeros(grid, n);
    q.at_mut(grid.n_steps(), Side::Right)
        .copy_from_slice(&problem.state_riesz(b_load));
    let mut rhs = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for j in (0..grid.n_steps()).rev() {
        let side = grid.step_side(j);
        let c = lin.coefficient(j);
        let next = q.at(j + 1, side);
        mass.apply(next, &mut rhs);
        lin.jacobian_transpose(j + 1).apply(next, &mut tmp);
        axpy(&mut rhs, c, &tmp);
        axpy(&mut rhs, half, w_load.at(j, side));
        axpy(&mut rhs, half, w_load.at(j + 1, side));
        lin.adjoint_factor(j).solve_in_place(&mut rhs);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve {
                step: j,
                reason: "non-finite adjoint".into(),
            });
        }
        q.at_mut(j, side).copy_from_slice(&rhs);
        if j == k {
            let jump = problem.state_riesz(a_load);
            let left = q.at_mut(k, Side::Left);
            left.copy_from_slice(&rhs);
            axpy(left, 1.0, &jump);
        }
    }
    Ok(q)
}

/// `K*(a, b, w)` with `a`, `b`, `w` in state coordinates (Riesz form).
#[allow(clippy::too_many_arguments)]
pub fn k_star_apply(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    y: &Trajectory,
    a: &[f64],
    b: &[f64],
    w: &SplitValues,
) -> Result<AdjointTrajectory> {
    let lin = Linearization::new(problem, u, tp, y)?;
    k_star_apply_with(problem, &lin, a, b, w)
}

pub fn k_star_apply_with(
    problem: &ProblemSpec,
    lin: &Linearization,
    a: &[f64],
    b: &[f64],
    w: &SplitValues,
) -> Result<AdjointTrajectory> {
    let n = problem.state_dim();
    for (what, v) in [("jump data", a), ("terminal data", b)] {
        if v.len() != n {
            return Err(Error::Dimension {
                what,
                expected: n,
                got: v.len(),
            });
        }
    }
    let mass = problem.model().state_mass();
    let w_load = SplitValues::from_rows(lin.grid(), n, |r, out| mass.apply(w.row_values(r), out));
    k_star_dual(problem, lin, &mass.apply_vec(a), &mass.apply_vec(b), &w_load)
}

/// Adjoint state: `K*` with `a = D phi_1(y(1))`, `b = D phi_2(y(2))` and
/// `w = pi_dot l_y`.
pub fn adjoint_solve(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    y: &Trajectory,
) -> Result<AdjointTrajectory> {
    let lin = Linearization::new(problem, u, tp, y)?;
    adjoint_solve_with(problem, &lin, u, y)
}

pub fn adjoint_solve_with(
    problem: &ProblemSpec,
    lin: &Linearization,
    u: &ControlGrid,
    y: &Trajectory,
) -> Result<AdjointTrajectory> {
    let grid = lin.grid();
    let tp = lin.tau();
    let n = problem.state_dim();
    let model = problem.model();
    let mut w = SplitValues::zeros(grid, n);
    for r in 0..w.n_rows() {
        let (i, side) = w.row_node(r);
        let (ly, _) = problem.running_cost_grads(y.node(i), u.node(i));
        let row = w.at_mut(i, side);
        axpy(row, tp.pi_dot_side(side), &ly);
    }
    let a = model.intermediate_cost().gradient(y.node(grid.mid()));
    let b = match model.terminal_cost() {
        Some(c) => c.gradient(y.node(grid.n_steps())),
        None => vec![0.0; n],
    };
    k_star_dual(problem, lin, &a, &b, &w)
}
