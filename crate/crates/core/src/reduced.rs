//! Reduced derivatives of `J(u, tau)` with the state eliminated: the gradient
//! from one forward and one adjoint sweep, Hessian-vector products from one
//! tangent and one `K*` sweep around a frozen point.

use crate::adjoint::{adjoint_solve_with, k_star_dual};
use crate::error::{Error, Result};
use crate::forward::{evaluate_objective, forward_solve};
use crate::grid_values::{AdjointTrajectory, ControlGrid, NodeValues, SplitValues, Trajectory};
use crate::linalg::{axpy, dot};
use crate::linearization::Linearization;
use crate::problem::{HamiltonianEval, ProblemSpec};
use crate::sensitivity::{k_dual, tangent_source};
use crate::time_transform::{pi_dot_tau_side, SGrid, Side, TauParameter};

/// Element of the reduced space: a control grid function and a free-time
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedVector {
    pub u: ControlGrid,
    pub tau: f64,
}

/// Riesz representative of `(J_u, J_tau)`.
pub type ReducedGradient = ReducedVector;
/// `D^2 J (du, dtheta)`.
pub type ReducedHvpResult = ReducedVector;

impl ReducedVector {
    pub fn zeros(grid: SGrid, m: usize) -> Self {
        Self {
            u: ControlGrid::zeros(grid, m),
            tau: 0.0,
        }
    }

    /// `sum_i w_i u_i^T M_c v_i + tau tau'` with trapezoidal weights `w_i`.
    pub fn inner(&self, other: &Self, problem: &ProblemSpec) -> f64 {
        let grid = self.u.grid();
        let mc = problem.model().control_mass();
        let mut tmp = vec![0.0; self.u.dim()];
        let mut sum = 0.0;
        for i in 0..grid.n_nodes() {
            mc.apply(other.u.node(i), &mut tmp);
            sum += grid.trapezoid_weight(i) * dot(self.u.node(i), &tmp);
        }
        sum + self.tau * other.tau
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        axpy(self.u.as_mut_slice(), a, x.u.as_slice());
        self.tau += a * x.tau;
    }

    pub fn scale(&mut self, a: f64) {
        self.u.as_mut_slice().iter_mut().for_each(|v| *v *= a);
        self.tau *= a;
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.tau.is_finite()
    }
}

/// `|||g|||`: the squared weighted norm.
pub fn triple_norm(problem: &ProblemSpec, g: &ReducedGradient) -> f64 {
    g.inner(g, problem)
}

/// Forward and adjoint solution at `(u, tau)` with everything the
/// Hessian-vector product needs.
#[derive(Debug)]
pub struct ReducedPoint {
    pub u: ControlGrid,
    pub tp: TauParameter,
    pub y: Trajectory,
    pub p: AdjointTrajectory,
    pub objective: f64,
    pub gradient: ReducedGradient,
    lin: Linearization,
    /// One entry per adjoint storage row.
    ham: Vec<HamiltonianEval>,
    rhs: Vec<Vec<f64>>,
}

impl ReducedPoint {
    pub fn evaluate(problem: &ProblemSpec, u: ControlGrid, tp: TauParameter) -> Result<Self> {
        let y = forward_solve(problem, &u, tp)?;
        let objective = evaluate_objective(problem, &u, tp, &y);
        let lin = Linearization::new(problem, &u, tp, &y)?;
        let p = adjoint_solve_with(problem, &lin, &u, &y)?;
        Self::assemble(problem, u, tp, y, p, objective, lin)
    }

    /// Builds the point from an existing state/adjoint pair.
    pub fn from_solution(
        problem: &ProblemSpec,
        u: ControlGrid,
        tp: TauParameter,
        y: Trajectory,
        p: AdjointTrajectory,
    ) -> Result<Self> {
        let objective = evaluate_objective(problem, &u, tp, &y);
        let lin = Linearization::new(problem, &u, tp, &y)?;
        if p.grid() != y.grid() || p.dim() != problem.state_dim() {
            return Err(Error::Dimension {
                what: "adjoint trajectory",
                expected: problem.state_dim(),
                got: p.dim(),
            });
        }
        Self::assemble(problem, u, tp, y, p, objective, lin)
    }

    fn assemble(
        problem: &ProblemSpec,
        u: ControlGrid,
        tp: TauParameter,
        y: Trajectory,
        p: AdjointTrajectory,
        objective: f64,
        lin: Linearization,
    ) -> Result<Self> {
        if !objective.is_finite() {
            return Err(Error::ModelEvaluation("objective"));
        }
        let grid = y.grid();
        let ham = (0..p.n_rows())
            .map(|r| {
                let (i, _) = p.row_node(r);
                problem.hamiltonian(y.node(i), u.node(i), p.row_values(r))
            })
            .collect::<Result<Vec<_>>>()?;
        let rhs = (0..grid.n_nodes())
            .map(|i| problem.rhs(y.node(i), u.node(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut point = Self {
            gradient: ReducedVector::zeros(grid, problem.control_dim()),
            u,
            tp,
            y,
            p,
            objective,
            lin,
            ham,
            rhs,
        };
        point.gradient = point.compute_gradient(problem);
        Ok(point)
    }

    pub fn grid(&self) -> SGrid {
        self.y.grid()
    }

    pub fn linearization(&self) -> &Linearization {
        &self.lin
    }

    /// `H`, `H_y`, `H_u` at node `i`, one-sided at `s = 1`.
    pub fn hamiltonian(&self, i: usize, side: Side) -> &HamiltonianEval {
        &self.ham[split_row(self.grid(), i, side)]
    }

    fn compute_gradient(&self, problem: &ProblemSpec) -> ReducedGradient {
        let grid = self.grid();
        let tp = self.tp;
        let g_u = node_average(grid, problem.control_dim(), |i, side| {
            let mut v = self.hamiltonian(i, side).grad_u.clone();
            v.iter_mut().for_each(|x| *x *= tp.pi_dot_side(side));
            problem.control_riesz(&v)
        });
        let g_tau = grid.split_trapezoid(|i, side| pi_dot_tau_side(side) * self.hamiltonian(i, side).value);
        ReducedVector { u: g_u, tau: g_tau }
    }

    pub fn gradient_norm(&self, problem: &ProblemSpec) -> f64 {
        triple_norm(problem, &self.gradient)
    }

    /// `D^2 J (du, dtheta)`.
    pub fn hvp(&self, problem: &ProblemSpec, du: &ControlGrid, dtheta: f64) -> Result<ReducedHvpResult> {
        let grid = self.grid();
        let tp = self.tp;
        let n = problem.state_dim();
        let m = problem.control_dim();
        let model = problem.model();
        du.check_shape(grid, m, "control direction")?;
        let (u, y) = (&self.u, &self.y);

        // Combined tangent z = S_u du + dtheta S_tau.
        let xi = tangent_source(problem, u, tp, y, Some(du), dtheta)?;
        let z = k_dual(problem, &self.lin, &xi)?;

        // Second-order terms per storage row and the K* source.
        let mut r_u = SplitValues::zeros(grid, m);
        let mut w = SplitValues::zeros(grid, n);
        for r in 0..w.n_rows() {
            let (i, side) = w.row_node(r);
            let (ry, ru) = problem.f_hess_apply(y.node(i), u.node(i), self.p.row_values(r), z.node(i), du.node(i));
            let row = w.at_mut(i, side);
            axpy(row, tp.pi_dot_side(side), &ry);
            if dtheta != 0.0 {
                axpy(row, dtheta * pi_dot_tau_side(side), &self.ham[r].grad_y);
            }
            r_u.at_mut(i, side).copy_from_slice(&ru);
        }
        let k = grid.mid();
        let a = model.intermediate_cost().hessian_apply(y.node(k), z.node(k));
        let b = match model.terminal_cost() {
            Some(c) => c.hessian_apply(y.node(grid.n_steps()), z.node(grid.n_steps())),
            None => vec![0.0; n],
        };
        let q = k_star_dual(problem, &self.lin, &a, &b, &w)?;

        let mut fq = vec![0.0; m];
        let h_u = node_average(grid, m, |i, side| {
            let r = split_row(grid, i, side);
            model.rhs_jacobian_u_transpose_apply(y.node(i), u.node(i), q.row_values(r), &mut fq);
            let mut v = r_u.row_values(r).to_vec();
            axpy(&mut v, 1.0, &fq);
            v.iter_mut().for_each(|x| *x *= tp.pi_dot_side(side));
            if dtheta != 0.0 {
                axpy(&mut v, dtheta * pi_dot_tau_side(side), &self.ham[r].grad_u);
            }
            problem.control_riesz(&v)
        });
        let h_tau = grid.split_trapezoid(|i, side| {
            let r = split_row(grid, i, side);
            let hm = &self.ham[r];
            pi_dot_tau_side(side)
                * (dot(&hm.grad_y, z.node(i)) + dot(&hm.grad_u, du.node(i)) + dot(&self.rhs[i], q.row_values(r)))
        });
        let out = ReducedVector { u: h_u, tau: h_tau };
        if !out.is_finite() {
            return Err(Error::ModelEvaluation("hessian-vector product"));
        }
        Ok(out)
    }
}

/// Storage row of `(i, side)` in the split layout.
fn split_row(grid: SGrid, i: usize, side: Side) -> usize {
    let k = grid.mid();
    if i < k || (i == k && side == Side::Left) {
        i
    } else {
        i + 1
    }
}

/// Node function from one-sided values, averaging the two sides at `s = 1`.
fn node_average(grid: SGrid, m: usize, mut f: impl FnMut(usize, Side) -> Vec<f64>) -> ControlGrid {
    let k = grid.mid();
    let mut out = NodeValues::zeros(grid, m);
    for i in 0..grid.n_nodes() {
        let v = if i == k {
            let l = f(k, Side::Left);
            let r = f(k, Side::Right);
            l.iter().zip(&r).map(|(a, b)| 0.5 * (a + b)).collect()
        } else {
            f(i, grid.step_side(i.min(grid.n_steps() - 1)))
        };
        out.node_mut(i).copy_from_slice(&v);
    }
    out
}

/// Gradient, state, adjoint and objective at `(u, tau)`.
pub fn gradient(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
) -> Result<(ReducedGradient, Trajectory, AdjointTrajectory, f64)> {
    let pt = ReducedPoint::evaluate(problem, u.clone(), tp)?;
    Ok((pt.gradient, pt.y, pt.p, pt.objective))
}

/// Hessian-vector product at a given state/adjoint pair.
#[allow(clippy::too_many_arguments)]
pub fn hvp(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    y: &Trajectory,
    p: &AdjointTrajectory,
    du: &ControlGrid,
    dtheta: f64,
) -> Result<ReducedHvpResult> {
    ReducedPoint::from_solution(problem, u.clone(), tp, y.clone(), p.clone())?.hvp(problem, du, dtheta)
}
