use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::optimizer::{SecondOrderCheck, SolveStatus, SolverReport};
use crate::problem::ProblemSpec;

/// Machine-readable record of one solve, written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSummary {
    pub version: String,
    pub model: String,
    pub status: SolveStatus,
    pub converged: bool,
    pub tau_star: f64,
    pub j_star: f64,
    /// `phi_1` at the free time.
    pub phi1_star: f64,
    /// Squared gradient norm at the returned point.
    pub grad_norm: f64,
    pub grad_tau: f64,
    pub bb_iterations: usize,
    pub newton_iterations: usize,
    pub bb_exhausted: bool,
    pub evaluations: usize,
    pub hvp_count: usize,
    pub second_order: Option<SecondOrderCheck>,
    pub wall_time_s: f64,
    pub config: RunConfig,
}

impl RunSummary {
    pub fn new(problem: &ProblemSpec, report: &SolverReport, config: &RunConfig, wall_time_s: f64) -> Self {
        let k = report.y_star.grid().mid();
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            model: config.model.id().to_string(),
            status: report.status,
            converged: report.converged(),
            tau_star: report.tau_star,
            j_star: report.j_star,
            phi1_star: problem.phi1_eval(report.y_star.node(k)),
            grad_norm: report.grad_norm,
            grad_tau: report.grad_tau,
            bb_iterations: report.bb_iterations,
            newton_iterations: report.newton_iterations,
            bb_exhausted: report.bb_exhausted,
            evaluations: report.evaluations,
            hvp_count: report.hvp_count,
            second_order: report.second_order.clone(),
            wall_time_s,
            config: config.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
