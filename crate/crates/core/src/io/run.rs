use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::RunConfig;
use super::output::{write_history_csv, write_snapshots, write_trajectory_csv};
use super::summary::RunSummary;
use crate::error::Result;
use crate::models::{BurgersDiscretization, ModelConfig};
use crate::optimizer::{solve, SolverReport};
use crate::verification::{verification_suite, CheckReport};

pub const SUMMARY_FILE: &str = "summary.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const HISTORY_FILE: &str = "history.csv";
pub const CHECKS_FILE: &str = "checks.json";
/// Written instead of a summary when the solver aborts.
pub const FAILURE_FILE: &str = "FAILED";

#[derive(Debug)]
pub struct SolveRun {
    pub summary: RunSummary,
    pub report: SolverReport,
    pub files: Vec<PathBuf>,
}

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for stale in [SUMMARY_FILE, FAILURE_FILE] {
        let p = dir.join(stale);
        if p.exists() {
            fs::remove_file(p)?;
        }
    }
    Ok(())
}

/// Solves the configured problem and writes the summary, trajectory and
/// history (plus snapshots for Burgers) into the output directory. A run that
/// stops at the iteration limit still writes its outputs, with
/// `converged = false` in the summary.
pub fn run_solve(config: &RunConfig) -> Result<SolveRun> {
    config.validate()?;
    let dir = &config.output.dir;
    prepare(dir)?;
    let start = Instant::now();
    let outcome = config.model.build().and_then(|problem| {
        let report = solve(&problem, &config.solver)?;
        Ok((problem, report))
    });
    let (problem, report) = match outcome {
        Ok(v) => v,
        Err(e) => {
            fs::write(dir.join(FAILURE_FILE), format!("{e}\n"))?;
            return Err(e);
        }
    };
    let wall = start.elapsed().as_secs_f64();

    let mut files = vec![dir.join(TRAJECTORY_FILE), dir.join(HISTORY_FILE)];
    write_trajectory_csv(&files[0], &report)?;
    write_history_csv(&files[1], &report.history)?;
    if let ModelConfig::Burgers(p) = &config.model {
        let disc = BurgersDiscretization::new(p.clone())?;
        files.extend(write_snapshots(dir, &disc, &report, config.output.snapshot_times())?);
    }
    let summary = RunSummary::new(&problem, &report, config, wall);
    let path = dir.join(SUMMARY_FILE);
    summary.write(&path)?;
    files.push(path);
    Ok(SolveRun { summary, report, files })
}

/// Runs the verification suite for the configured model and writes the
/// reports to `checks.json`.
pub fn run_verify(config: &RunConfig) -> Result<Vec<CheckReport>> {
    config.validate()?;
    let problem = config.model.build()?;
    let reports = verification_suite(&problem, config.solver.n_steps, config.solver.seed)?;
    fs::create_dir_all(&config.output.dir)?;
    let json = serde_json::to_string_pretty(&reports).map_err(|e| crate::Error::Config(e.to_string()))?;
    fs::write(config.output.dir.join(CHECKS_FILE), json + "\n")?;
    Ok(reports)
}

/// Independent solves on scoped threads; results keep the input order.
pub fn run_sweep(configs: &[RunConfig]) -> Vec<Result<SolveRun>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|c| scope.spawn(move || run_solve(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}
