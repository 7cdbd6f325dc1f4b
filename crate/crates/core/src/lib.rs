//! Optimal control problems where a functional of the state is maximised at a
//! free intermediate time `tau`.
//!
//! The interval `[0, T]` is mapped onto `[0, 2]` with `tau` pinned to
//! `s = 1`, so `tau` enters the dynamics as a parameter. Gradients and
//! Hessian-vector products of the reduced objective `J(u, tau)` come from
//! Crank-Nicolson forward, tangent and adjoint sweeps, and the optimiser
//! combines Barzilai-Borwein steps with a matrix-free Newton-GMRES phase.

pub mod adjoint;
pub mod error;
pub mod forward;
pub mod grid_values;
pub mod io;
pub mod linalg;
pub mod linearization;
pub mod models;
pub mod optimizer;
pub mod problem;
pub mod reduced;
pub mod sensitivity;
pub mod time_transform;
pub mod verification;

pub use error::{Error, Result};
pub use grid_values::{AdjointTrajectory, ControlGrid, NodeValues, SplitValues, Trajectory};
pub use problem::{ControlProblem, HamiltonianEval, ProblemSpec, StateFunctional};
pub use reduced::{ReducedGradient, ReducedPoint, ReducedVector};
pub use time_transform::{SGrid, Side, TauParameter};
