use serde::{Deserialize, Serialize};

use crate::grid_values::{AdjointTrajectory, ControlGrid, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Bb,
    Newton,
}

/// Irregular events attached to a history entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepFlag {
    /// The free time was projected back into `[tau_min, T - tau_min]`.
    TauClamped,
    /// Non-negative curvature along the step; a short fixed step was used.
    BbFallback,
    /// GMRES did not reach its tolerance; one gradient step was taken.
    GmresFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub phase: Phase,
    pub iteration: usize,
    /// Squared gradient norm.
    pub grad_norm: f64,
    pub objective: f64,
    pub tau: f64,
    pub step: f64,
    pub gmres_iterations: usize,
    pub flags: Vec<StepFlag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderCheck {
    /// Estimate of the largest eigenvalue of `D^2 J`.
    pub lambda_max: f64,
    /// Dominant (largest magnitude) eigenvalue found by the first pass.
    pub lambda_dominant: f64,
    pub iterations: usize,
    pub tolerance: f64,
    /// `lambda_max <= tolerance`.
    pub consistent_with_local_max: bool,
}

/// Outcome of the generic iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    pub gradient: Vec<f64>,
    pub grad_norm: f64,
    pub status: SolveStatus,
    pub bb_iterations: usize,
    pub newton_iterations: usize,
    /// The gradient phase ran out of iterations before the switch threshold.
    pub bb_exhausted: bool,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub horizon: f64,
    pub tau_star: f64,
    pub j_star: f64,
    pub u_star: ControlGrid,
    pub y_star: Trajectory,
    pub p_star: AdjointTrajectory,
    pub grad_norm: f64,
    pub grad_tau: f64,
    pub status: SolveStatus,
    pub bb_iterations: usize,
    pub newton_iterations: usize,
    pub bb_exhausted: bool,
    pub history: Vec<HistoryEntry>,
    pub second_order: Option<SecondOrderCheck>,
    pub evaluations: usize,
    pub hvp_count: usize,
}

impl SolverReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}
