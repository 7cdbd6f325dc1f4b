use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{default_setup, ModelConfig};
use crate::optimizer::SolverConfig;

/// Physical times of the default Burgers snapshots.
pub const DEFAULT_SNAPSHOT_TIMES: [f64; 8] = [0.0777, 4.7111, 4.7839, 4.8325, 4.8519, 4.8568, 5.0111, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Times at which Burgers state and control profiles are written;
    /// [`DEFAULT_SNAPSHOT_TIMES`] when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            snapshot_times: None,
        }
    }
}

impl OutputConfig {
    pub fn snapshot_times(&self) -> &[f64] {
        self.snapshot_times.as_deref().unwrap_or(&DEFAULT_SNAPSHOT_TIMES)
    }
}

/// Contents of a run configuration file.
///
/// ```toml
/// [model]
/// id = "lotka-volterra"
/// horizon = 30.0
///
/// [solver]
/// n_steps = 3000
///
/// [output]
/// dir = "out/lotka-volterra"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Reference setup for a built-in model id.
    pub fn for_model(id: &str) -> Result<Self> {
        let (model, solver) = default_setup(id)?;
        Ok(Self {
            model,
            solver,
            output: OutputConfig {
                dir: PathBuf::from("out").join(id),
                ..OutputConfig::default()
            },
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        let horizon = self.model.horizon();
        if let Some(t) = self.solver.tau0 {
            if !(t > 0.0 && t < horizon) {
                return Err(Error::Config(format!("tau0 = {t} outside (0, {horizon})")));
            }
        }
        let times = match (&self.model, &self.output.snapshot_times) {
            (_, Some(t)) => t.as_slice(),
            (ModelConfig::Burgers(_), None) => &DEFAULT_SNAPSHOT_TIMES,
            _ => &[],
        };
        if let Some(t) = times.iter().find(|t| !(0.0..=horizon).contains(*t)) {
            return Err(Error::Config(format!("snapshot time {t} outside [0, {horizon}]")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_configs_round_trip() {
        for id in crate::models::MODEL_IDS {
            let cfg = RunConfig::for_model(id).unwrap();
            let text = cfg.to_toml_string().unwrap();
            assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg, "{id}");
        }
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let cfg = RunConfig::from_toml_str("[model]\nid = \"pendulum\"\n").unwrap();
        assert_eq!(cfg.model.horizon(), 25.0);
        assert_eq!(cfg.solver, SolverConfig::default());
        assert_eq!(cfg.output.snapshot_times(), DEFAULT_SNAPSHOT_TIMES);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = [
            "[model]\nid = \"pendulum\"\n[solver]\nn_step = 10\n",
            "[model]\nid = \"pendulum\"\ndamping = 1.0\n",
            "[model]\nid = \"pendulum\"\n[outputs]\ndir = \"x\"\n",
            "[model]\nid = \"double-pendulum\"\n",
        ];
        for text in bad {
            assert!(RunConfig::from_toml_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let text = "[model]\nid = \"pendulum\"\n[solver]\ntau0 = 30.0\n";
        assert!(RunConfig::from_toml_str(text).is_err());
        let text = "[model]\nid = \"pendulum\"\n[output]\nsnapshot_times = [26.0]\n";
        assert!(RunConfig::from_toml_str(text).is_err());
    }
}
