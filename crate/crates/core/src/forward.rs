//! Crank-Nicolson integration of the rescaled state equation
//! `M y' = pi_dot(s, tau) F(y, u)` on `[0, 2]`.

use crate::error::{Error, Result};
use crate::grid_values::{ControlGrid, Trajectory};
use crate::linalg::norm_inf;
use crate::problem::ProblemSpec;
use crate::time_transform::TauParameter;

/// Inner Newton settings for each implicit step.
#[derive(Debug, Clone, Copy)]
pub struct StepSolver {
    pub abs_tol: f64,
    pub max_iters: usize,
}

impl Default for StepSolver {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iters: 25,
        }
    }
}

pub fn forward_solve(problem: &ProblemSpec, u: &ControlGrid, tp: TauParameter) -> Result<Trajectory> {
    forward_solve_with(problem, u, tp, StepSolver::default())
}

pub fn forward_solve_with(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    solver: StepSolver,
) -> Result<Trajectory> {
    let grid = u.grid();
    let n = problem.state_dim();
    u.check_shape(grid, problem.control_dim(), "control grid")?;
    check_horizon(problem, tp)?;
    let model = problem.model();
    let mass = model.state_mass();
    let h = grid.step();

    let mut y = Trajectory::zeros(grid, n);
    y.node_mut(0).copy_from_slice(problem.y0());
    let mut lhs_const = vec![0.0; n];
    let mut residual = vec![0.0; n];
    let mut f_next = vec![0.0; n];

    for i in 0..grid.n_steps() {
        let c = 0.5 * h * tp.pi_dot_side(grid.step_side(i));
        let yi = y.node(i).to_vec();
        let fi = problem.rhs(&yi, u.node(i)).map_err(|_| Error::BlowUp { step: i })?;
        // Constant part M y_i + c F_i of the CN residual.
        mass.apply(&yi, &mut lhs_const);
        lhs_const.iter_mut().zip(&fi).for_each(|(a, b)| *a += c * b);
        // Explicit Euler predictor.
        let mut guess = problem.state_riesz(&fi);
        guess.iter_mut().zip(&yi).for_each(|(g, y0)| *g = y0 + 2.0 * c * *g);
        let u_next = u.node(i + 1);

        let mut converged = false;
        let mut last = f64::INFINITY;
        for _ in 0..=solver.max_iters {
            model.rhs(&guess, u_next, &mut f_next);
            mass.apply(&guess, &mut residual);
            for k in 0..n {
                residual[k] -= c * f_next[k] + lhs_const[k];
            }
            last = norm_inf(&residual);
            if !last.is_finite() {
                return Err(Error::BlowUp { step: i + 1 });
            }
            if last <= solver.abs_tol {
                converged = true;
                break;
            }
            let jac = mass.combine(1.0, &model.rhs_jacobian_y(&guess, u_next), -c);
            let lu = jac.factor().map_err(|e| e.at_step(i + 1))?;
            lu.solve_in_place(&mut residual);
            let scale = 1.0 + norm_inf(&guess);
            guess.iter_mut().zip(&residual).for_each(|(g, d)| *g -= d);
            // Update at round-off level: the residual cannot decrease further.
            if norm_inf(&residual) <= 4.0 * f64::EPSILON * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::StepFailure {
                step: i + 1,
                residual: last,
            });
        }
        if guess.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { step: i + 1 });
        }
        y.node_mut(i + 1).copy_from_slice(&guess);
    }
    Ok(y)
}

pub(crate) fn check_horizon(problem: &ProblemSpec, tp: TauParameter) -> Result<()> {
    if (tp.horizon() - problem.horizon()).abs() > 1e-12 * problem.horizon() {
        return Err(Error::Domain(format!(
            "tau parameter horizon {} does not match the model horizon {}",
            tp.horizon(),
            problem.horizon()
        )));
    }
    Ok(())
}

/// `J(u, tau)`: split trapezoidal quadrature of `pi_dot l` plus the costs at
/// `s = 1` and `s = 2`.
pub fn evaluate_objective(problem: &ProblemSpec, u: &ControlGrid, tp: TauParameter, y: &Trajectory) -> f64 {
    let grid = y.grid();
    let running = grid.split_trapezoid(|i, side| tp.pi_dot_side(side) * problem.running_cost(y.node(i), u.node(i)));
    running + problem.phi1_eval(y.node(grid.mid())) + problem.phi2_eval(y.node(grid.n_steps()))
}
