//! Maximisation of the reduced objective: Barzilai-Borwein gradient steps
//! until the squared gradient norm drops below the switch threshold, then
//! full Newton steps with matrix-free GMRES, then a spectral sign check.

mod algorithm;
pub mod config;
pub mod gmres;
pub mod objective;
pub mod report;
pub mod second_order;

pub use algorithm::maximize;
pub use config::{BbVariant, SolverConfig};
pub use gmres::{gmres, FnSpace, GmresOutcome, KrylovSpace};
pub use objective::{FreeTimeObjective, ReducedObjective};
pub use report::{HistoryEntry, OptimizationOutcome, Phase, SecondOrderCheck, SolveStatus, SolverReport, StepFlag};
pub use second_order::second_order_check;

use crate::error::{Error, Result};
use crate::grid_values::ControlGrid;
use crate::problem::ProblemSpec;
use crate::time_transform::SGrid;

/// Runs the full algorithm from `u = 0` and the configured initial `tau`.
pub fn solve(problem: &ProblemSpec, config: &SolverConfig) -> Result<SolverReport> {
    let grid = SGrid::new(config.n_steps)?;
    let u0 = ControlGrid::zeros(grid, problem.control_dim());
    solve_from(problem, config, &u0, config.initial_tau(problem.horizon()))
}

pub fn solve_from(problem: &ProblemSpec, config: &SolverConfig, u0: &ControlGrid, tau0: f64) -> Result<SolverReport> {
    config.validate()?;
    let grid = SGrid::new(config.n_steps)?;
    u0.check_shape(grid, problem.control_dim(), "initial control")?;
    if !tau0.is_finite() {
        return Err(Error::Config(format!("initial tau must be finite, got {tau0}")));
    }
    let mut obj = FreeTimeObjective::new(problem, grid, config.tau_min_fraction);
    let x0 = obj.pack(u0, tau0);
    let outcome = maximize(&mut obj, x0, config)?;
    let second_order = if outcome.status == SolveStatus::Converged {
        Some(second_order_check(
            &mut obj,
            config.power_iters,
            config.second_order_tol,
            config.seed,
        )?)
    } else {
        None
    };
    let (evaluations, hvp_count) = (obj.evaluations, obj.hvp_count);
    let point = obj
        .into_point()
        .ok_or_else(|| Error::Domain("optimizer finished without an evaluated point".into()))?;
    Ok(SolverReport {
        horizon: problem.horizon(),
        tau_star: point.tp.tau(),
        j_star: point.objective,
        grad_norm: outcome.grad_norm,
        grad_tau: point.gradient.tau,
        u_star: point.u,
        y_star: point.y,
        p_star: point.p,
        status: outcome.status,
        bb_iterations: outcome.bb_iterations,
        newton_iterations: outcome.newton_iterations,
        bb_exhausted: outcome.bb_exhausted,
        history: outcome.history,
        second_order,
        evaluations,
        hvp_count,
    })
}
