//! Tangent (linearised state) systems `z' = pi_dot f_y z + xi`, `z(0) = 0`.

use crate::error::{Error, Result};
use crate::grid_values::{ControlGrid, NodeValues, SplitValues, Trajectory};
use crate::linalg::axpy;
use crate::linearization::Linearization;
use crate::problem::ProblemSpec;
use crate::time_transform::{pi_dot_tau_side, TauParameter};

/// Tangent trajectory; row 0 is zero.
pub type TangentTrajectory = NodeValues;

/// CN solve of `M z' = pi_dot F_y z + Xi` where `Xi` is given as load
/// vectors, one-sided at `s = 1`.
pub(crate) fn k_dual(problem: &ProblemSpec, lin: &Linearization, xi_load: &SplitValues) -> Result<TangentTrajectory> {
    let grid = lin.grid();
    let n = problem.state_dim();
    let mass = problem.model().state_mass();
    let factors = lin.tangent_factors(mass)?;
    let half = 0.5 * grid.step();
    let mut z = NodeValues::zeros(grid, n);
    let mut rhs = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for i in 0..grid.n_steps() {
        let side = grid.step_side(i);
        let c = lin.coefficient(i);
        let zi = z.node(i);
        mass.apply(zi, &mut rhs);
        lin.jacobian(i).apply(zi, &mut tmp);
        axpy(&mut rhs, c, &tmp);
        axpy(&mut rhs, half, xi_load.at(i, side));
        axpy(&mut rhs, half, xi_load.at(i + 1, side));
        factors[i].solve_in_place(&mut rhs);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve {
                step: i + 1,
                reason: "non-finite tangent".into(),
            });
        }
        z.node_mut(i + 1).copy_from_slice(&rhs);
    }
    Ok(z)
}

/// `K xi` for a source `xi` given in state coordinates (Riesz form).
pub fn k_apply(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    y: &Trajectory,
    xi: &SplitValues,
) -> Result<TangentTrajectory> {
    let lin = Linearization::new(problem, u, tp, y)?;
    k_apply_with(problem, &lin, xi)
}

pub fn k_apply_with(problem: &ProblemSpec, lin: &Linearization, xi: &SplitValues) -> Result<TangentTrajectory> {
    let mass = problem.model().state_mass();
    let load = SplitValues::from_rows(lin.grid(), problem.state_dim(), |r, out| {
        mass.apply(xi.row_values(r), out)
    });
    k_dual(problem, lin, &load)
}

/// Load `pi_dot F_u v + dtheta pi_dot_tau F` of the combined tangent.
pub(crate) fn tangent_source(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    y: &Trajectory,
    v: Option<&ControlGrid>,
    dtheta: f64,
) -> Result<SplitValues> {
    let grid = y.grid();
    let n = problem.state_dim();
    let model = problem.model();
    let mut fu = vec![0.0; n];
    let mut out = SplitValues::zeros(grid, n);
    for r in 0..out.n_rows() {
        let (i, side) = out.row_node(r);
        let row = out.at_mut(i, side);
        if let Some(v) = v {
            model.rhs_jacobian_u_apply(y.node(i), u.node(i), v.node(i), &mut fu);
            axpy(row, tp.pi_dot_side(side), &fu);
        }
        if dtheta != 0.0 {
            let f = problem.rhs(y.node(i), u.node(i))?;
            axpy(row, dtheta * pi_dot_tau_side(side), &f);
        }
    }
    Ok(out)
}

/// `S_u v`: tangent in a control direction.
pub fn tangent_u(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    y: &Trajectory,
    v: &ControlGrid,
) -> Result<TangentTrajectory> {
    v.check_shape(y.grid(), problem.control_dim(), "control direction")?;
    let lin = Linearization::new(problem, u, tp, y)?;
    k_dual(problem, &lin, &tangent_source(problem, u, tp, y, Some(v), 0.0)?)
}

/// `S_tau`: tangent in the free-time direction.
pub fn tangent_tau(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    y: &Trajectory,
) -> Result<TangentTrajectory> {
    let lin = Linearization::new(problem, u, tp, y)?;
    k_dual(problem, &lin, &tangent_source(problem, u, tp, y, None, 1.0)?)
}
