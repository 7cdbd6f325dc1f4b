use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time_transform::DEFAULT_TAU_MIN_FRACTION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BbVariant {
    /// `<dx, dx> / <dx, dg>`.
    Bb1,
    /// `<dx, dg> / <dg, dg>`.
    Bb2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub n_steps: usize,
    /// Initial free time; `None` means `T / 2`.
    pub tau0: Option<f64>,
    /// Threshold on the squared gradient norm that ends the gradient phase.
    pub grad_switch_tol: f64,
    /// Threshold on the squared gradient norm that ends the Newton phase.
    pub newton_tol: f64,
    pub max_bb_iters: usize,
    pub max_newton_iters: usize,
    pub gmres_rel_tol: f64,
    pub gmres_max_iters: usize,
    pub bb_variant: BbVariant,
    pub tau_min_fraction: f64,
    pub power_iters: usize,
    /// Upper bound on the largest curvature for a local maximum verdict.
    pub second_order_tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_steps: 1000,
            tau0: None,
            grad_switch_tol: 1e-4,
            newton_tol: 1e-12,
            max_bb_iters: 20_000,
            max_newton_iters: 50,
            gmres_rel_tol: 1e-8,
            gmres_max_iters: 300,
            bb_variant: BbVariant::Bb2,
            tau_min_fraction: DEFAULT_TAU_MIN_FRACTION,
            power_iters: 100,
            second_order_tol: 1e-6,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn initial_tau(&self, horizon: f64) -> f64 {
        self.tau0.unwrap_or(0.5 * horizon)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_switch_tol", self.grad_switch_tol),
            ("newton_tol", self.newton_tol),
            ("gmres_rel_tol", self.gmres_rel_tol),
            ("tau_min_fraction", self.tau_min_fraction),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.grad_switch_tol <= self.newton_tol {
            return Err(Error::Config("grad_switch_tol must exceed newton_tol".into()));
        }
        if self.tau_min_fraction >= 0.5 {
            return Err(Error::Config("tau_min_fraction must be below 1/2".into()));
        }
        if self.n_steps == 0 || !self.n_steps.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_steps must be positive and even, got {}",
                self.n_steps
            )));
        }
        if !self.second_order_tol.is_finite() {
            return Err(Error::Config("second_order_tol must be finite".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!(c.grad_switch_tol, 1e-4);
        assert_eq!(c.newton_tol, 1e-12);
        assert_eq!(c.initial_tau(30.0), 15.0);
    }

    #[test]
    fn rejects_inverted_tolerances() {
        let c = SolverConfig {
            grad_switch_tol: 1e-13,
            ..SolverConfig::default()
        };
        assert!(c.validate().is_err());
        let c = SolverConfig {
            n_steps: 7,
            ..SolverConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
