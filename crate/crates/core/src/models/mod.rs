//! Built-in models and their reference setups.

pub mod burgers;
pub mod fem;
pub mod functionals;
pub mod linear;
pub mod lotka_volterra;
pub mod pendulum;

use serde::{Deserialize, Serialize};

pub use burgers::{make_burgers, Burgers, BurgersDiscretization, BurgersParams};
pub use linear::{make_scalar_linear, LinearModel, ScalarLinearParams};
pub use lotka_volterra::{make_lotka_volterra, LotkaVolterra, LotkaVolterraParams, TerminalPenalty};
pub use pendulum::{make_pendulum, Pendulum, PendulumParams};

use crate::error::{Error, Result};
use crate::optimizer::SolverConfig;
use crate::problem::ProblemSpec;

/// Model selection as it appears in a run configuration (`id = "..."`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum ModelConfig {
    LotkaVolterra(LotkaVolterraParams),
    Pendulum(PendulumParams),
    Burgers(BurgersParams),
    ScalarLinear(ScalarLinearParams),
}

/// Identifiers accepted by [`default_setup`].
pub const MODEL_IDS: [&str; 5] = [
    "lotka-volterra",
    "lotka-volterra-terminal",
    "pendulum",
    "burgers",
    "scalar-linear",
];

impl ModelConfig {
    pub fn id(&self) -> &'static str {
        match self {
            ModelConfig::LotkaVolterra(p) if p.terminal.is_some() => "lotka-volterra-terminal",
            ModelConfig::LotkaVolterra(_) => "lotka-volterra",
            ModelConfig::Pendulum(_) => "pendulum",
            ModelConfig::Burgers(_) => "burgers",
            ModelConfig::ScalarLinear(_) => "scalar-linear",
        }
    }

    pub fn horizon(&self) -> f64 {
        match self {
            ModelConfig::LotkaVolterra(p) => p.horizon,
            ModelConfig::Pendulum(p) => p.horizon,
            ModelConfig::Burgers(p) => p.horizon,
            ModelConfig::ScalarLinear(p) => p.horizon,
        }
    }

    pub fn build(&self) -> Result<ProblemSpec> {
        match self {
            ModelConfig::LotkaVolterra(p) => make_lotka_volterra(p.clone()),
            ModelConfig::Pendulum(p) => make_pendulum(p.clone()),
            ModelConfig::Burgers(p) => make_burgers(BurgersDiscretization::new(p.clone())?),
            ModelConfig::ScalarLinear(p) => make_scalar_linear(p),
        }
    }
}

/// Initial free time for the pendulum, near the third peak of the
/// uncontrolled swing.
pub const PENDULUM_TAU0: f64 = 17.0;

/// Reference model parameters and solver settings for a model id.
pub fn default_setup(id: &str) -> Result<(ModelConfig, SolverConfig)> {
    let (model, n_steps, tau0) = match id {
        "lotka-volterra" => (ModelConfig::LotkaVolterra(LotkaVolterraParams::default()), 3000, None),
        "lotka-volterra-terminal" => (
            ModelConfig::LotkaVolterra(LotkaVolterraParams::with_terminal_penalty()),
            3000,
            None,
        ),
        "pendulum" => (
            ModelConfig::Pendulum(PendulumParams::default()),
            2500,
            Some(PENDULUM_TAU0),
        ),
        "burgers" => (ModelConfig::Burgers(BurgersParams::default()), 1000, None),
        "scalar-linear" => (ModelConfig::ScalarLinear(ScalarLinearParams::default()), 400, None),
        other => {
            return Err(Error::Config(format!(
                "unknown model id '{other}' (expected one of {})",
                MODEL_IDS.join(", ")
            )))
        }
    };
    let solver = SolverConfig {
        n_steps,
        tau0,
        ..SolverConfig::default()
    };
    Ok((model, solver))
}
