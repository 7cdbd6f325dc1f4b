use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use freetime::io::{run_solve, run_sweep, run_verify, RunConfig, SolveRun};
use freetime::models::MODEL_IDS;
use freetime::Result;

#[derive(Parser)]
#[command(name = "freetime", version, about = "Optimal control with a free intermediate time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write summary, trajectory and history files.
    Solve(RunArgs),
    /// Run the derivative and duality checks for one model.
    Verify(RunArgs),
    /// Solve several configurations concurrently, one output directory each.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Overrides {
    /// Initial free time.
    #[arg(long)]
    tau0: Option<f64>,
    /// Number of time steps on [0, 2] (even).
    #[arg(long)]
    n_steps: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomised checks and the power iteration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration file (TOML).
    #[arg(long, conflicts_with = "model")]
    config: Option<PathBuf>,
    /// Built-in model with its reference settings.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(MODEL_IDS))]
    model: Option<String>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct SweepArgs {
    /// Run configuration files, repeatable.
    #[arg(long)]
    config: Vec<PathBuf>,
    /// Built-in models, repeatable.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(MODEL_IDS))]
    model: Vec<String>,
    /// Initial free times, repeatable; every configuration runs with each.
    #[arg(long)]
    tau0: Vec<f64>,
    #[arg(long)]
    n_steps: Option<usize>,
    /// Parent directory of the per-run output directories.
    #[arg(long, default_value = "out/sweep")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

fn load(config: Option<&PathBuf>, model: Option<&str>) -> Result<RunConfig> {
    match (config, model) {
        (Some(path), _) => RunConfig::from_path(path),
        (None, Some(id)) => RunConfig::for_model(id),
        (None, None) => Err(freetime::Error::Config("either --config or --model is required".into())),
    }
}

fn apply(mut cfg: RunConfig, o: &Overrides) -> Result<RunConfig> {
    if let Some(t) = o.tau0 {
        cfg.solver.tau0 = Some(t);
    }
    if let Some(n) = o.n_steps {
        cfg.solver.n_steps = n;
    }
    if let Some(dir) = &o.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(s) = o.seed {
        cfg.solver.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_run(run: &SolveRun) {
    let s = &run.summary;
    let verdict = s
        .second_order
        .as_ref()
        .map(|c| {
            format!(
                "lambda_max = {:.3e} ({})",
                c.lambda_max,
                if c.consistent_with_local_max {
                    "local max"
                } else {
                    "not a local max"
                }
            )
        })
        .unwrap_or_else(|| "second-order check skipped".into());
    println!(
        "{}: {:?} tau* = {:.6} J* = {:.8} |||g||| = {:.3e} bb = {} newton = {} {} [{:.1}s] -> {}",
        s.model,
        s.status,
        s.tau_star,
        s.j_star,
        s.grad_norm,
        s.bb_iterations,
        s.newton_iterations,
        verdict,
        s.wall_time_s,
        s.config.output.dir.display()
    );
}

fn solve_cmd(args: &RunArgs) -> Result<bool> {
    let cfg = apply(load(args.config.as_ref(), args.model.as_deref())?, &args.overrides)?;
    let run = run_solve(&cfg)?;
    print_run(&run);
    Ok(run.summary.converged)
}

fn verify_cmd(args: &RunArgs) -> Result<bool> {
    let cfg = apply(load(args.config.as_ref(), args.model.as_deref())?, &args.overrides)?;
    let reports = run_verify(&cfg)?;
    for r in &reports {
        println!(
            "[{}] {:<16} measured {:.3e} tolerance {:.3e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.measured,
            r.tolerance
        );
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn sweep_configs(args: &SweepArgs) -> Result<Vec<RunConfig>> {
    let mut base: Vec<(String, RunConfig)> = Vec::new();
    for path in &args.config {
        let stem = path
            .file_stem()
            .map_or("run".into(), |s| s.to_string_lossy().into_owned());
        base.push((stem, RunConfig::from_path(path)?));
    }
    for id in &args.model {
        base.push((id.clone(), RunConfig::for_model(id)?));
    }
    if base.is_empty() {
        return Err(freetime::Error::Config(
            "sweep needs at least one --config or --model".into(),
        ));
    }
    let taus: Vec<Option<f64>> = if args.tau0.is_empty() {
        vec![None]
    } else {
        args.tau0.iter().copied().map(Some).collect()
    };
    let mut out = Vec::new();
    for (label, cfg) in &base {
        for tau in &taus {
            let name = match tau {
                Some(t) => format!("{label}_tau{t}"),
                None => label.clone(),
            };
            let o = Overrides {
                tau0: *tau,
                n_steps: args.n_steps,
                out: Some(args.out.join(name)),
                seed: args.seed,
            };
            out.push(apply(cfg.clone(), &o)?);
        }
    }
    Ok(out)
}

fn sweep_cmd(args: &SweepArgs) -> Result<bool> {
    let configs = sweep_configs(args)?;
    let mut all = true;
    for (cfg, res) in configs.iter().zip(run_sweep(&configs)) {
        match res {
            Ok(run) => {
                print_run(&run);
                all &= run.summary.converged;
            }
            Err(e) => {
                eprintln!("{}: error: {e}", cfg.output.dir.display());
                all = false;
            }
        }
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
