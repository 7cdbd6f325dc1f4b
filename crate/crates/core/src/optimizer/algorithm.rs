//! Gradient phase with Barzilai-Borwein steps followed by full Newton steps
//! solved with GMRES.

use super::config::{BbVariant, SolverConfig};
use super::gmres::{gmres, KrylovSpace};
use super::objective::ReducedObjective;
use super::report::{HistoryEntry, OptimizationOutcome, Phase, SolveStatus, StepFlag};
use crate::error::{Error, Result};

/// `D^2 J` at the current point.
struct Hessian<'a>(&'a mut dyn ReducedObjective);

impl KrylovSpace for Hessian<'_> {
    fn apply(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        self.0.hvp(v)
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.0.inner(a, b)
    }
}

struct Iterate {
    x: Vec<f64>,
    objective: f64,
    gradient: Vec<f64>,
    grad_norm: f64,
}

fn evaluate(obj: &mut dyn ReducedObjective, x: Vec<f64>, phase: Phase, iteration: usize) -> Result<Iterate> {
    let (objective, gradient) = obj.evaluate(&x)?;
    if !objective.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteObjective {
            phase: phase_name(phase),
            iteration,
        });
    }
    let grad_norm = obj.inner(&gradient, &gradient);
    Ok(Iterate {
        x,
        objective,
        gradient,
        grad_norm,
    })
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::Bb => "bb",
        Phase::Newton => "newton",
    }
}

fn record(obj: &dyn ReducedObjective, it: &Iterate, phase: Phase, iteration: usize, step: f64) -> HistoryEntry {
    HistoryEntry {
        phase,
        iteration,
        grad_norm: it.grad_norm,
        objective: it.objective,
        tau: obj.tau_of(&it.x),
        step,
        gmres_iterations: 0,
        flags: Vec::new(),
    }
}

/// `x + sigma g`, projected.
fn ascent_step(obj: &dyn ReducedObjective, it: &Iterate, sigma: f64) -> (Vec<f64>, bool) {
    let mut x: Vec<f64> = it.x.iter().zip(&it.gradient).map(|(x, g)| x + sigma * g).collect();
    let clamped = obj.clamp(&mut x);
    (x, clamped)
}

/// Step length from the last displacement; `None` when the curvature along
/// it is not negative.
fn bb_step(obj: &dyn ReducedObjective, variant: BbVariant, dx: &[f64], dg: &[f64]) -> Option<f64> {
    let xg = obj.inner(dx, dg);
    if xg.is_nan() || xg >= 0.0 {
        return None;
    }
    let sigma = match variant {
        BbVariant::Bb1 => -obj.inner(dx, dx) / xg,
        BbVariant::Bb2 => -xg / obj.inner(dg, dg),
    };
    (sigma.is_finite() && sigma > 0.0).then_some(sigma)
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a - b).collect()
}

/// Maximises `obj` from `x0`.
pub fn maximize(obj: &mut dyn ReducedObjective, x0: Vec<f64>, config: &SolverConfig) -> Result<OptimizationOutcome> {
    config.validate()?;
    let mut x0 = x0;
    let clamped0 = obj.clamp(&mut x0);
    let mut it = evaluate(obj, x0, Phase::Bb, 0)?;
    let mut history = vec![record(obj, &it, Phase::Bb, 0, 0.0)];
    if clamped0 {
        history[0].flags.push(StepFlag::TauClamped);
    }

    // Gradient phase.
    let sigma0 = obj.initial_step(&it.gradient);
    let mut sigma = sigma0;
    let mut bb_iterations = 0;
    while it.grad_norm > config.grad_switch_tol && bb_iterations < config.max_bb_iters {
        let (x, clamped) = ascent_step(obj, &it, sigma);
        let next = evaluate(obj, x, Phase::Bb, bb_iterations + 1)?;
        bb_iterations += 1;
        let mut entry = record(obj, &next, Phase::Bb, bb_iterations, sigma);
        if clamped {
            entry.flags.push(StepFlag::TauClamped);
        }
        let dx = diff(&next.x, &it.x);
        let dg = diff(&next.gradient, &it.gradient);
        sigma = match bb_step(obj, config.bb_variant, &dx, &dg) {
            Some(s) => s,
            None => {
                entry.flags.push(StepFlag::BbFallback);
                1e-2 * sigma0
            }
        };
        history.push(entry);
        it = next;
    }
    let bb_exhausted = it.grad_norm > config.grad_switch_tol;

    // Newton phase.
    let mut newton_iterations = 0;
    while it.grad_norm > config.newton_tol && newton_iterations < config.max_newton_iters {
        let rhs: Vec<f64> = it.gradient.iter().map(|g| -g).collect();
        let sol = gmres(&mut Hessian(obj), &rhs, config.gmres_rel_tol, config.gmres_max_iters)?;
        let mut flags = Vec::new();
        let mut x = if sol.converged {
            it.x.iter().zip(&sol.x).map(|(x, d)| x + d).collect()
        } else {
            flags.push(StepFlag::GmresFallback);
            ascent_step(obj, &it, sigma).0
        };
        if obj.clamp(&mut x) {
            flags.push(StepFlag::TauClamped);
        }
        let next = evaluate(obj, x, Phase::Newton, newton_iterations + 1)?;
        newton_iterations += 1;
        let mut entry = record(obj, &next, Phase::Newton, newton_iterations, 1.0);
        entry.gmres_iterations = sol.iterations;
        entry.flags = flags;
        if !sol.converged {
            entry.step = sigma;
            let dx = diff(&next.x, &it.x);
            let dg = diff(&next.gradient, &it.gradient);
            sigma = bb_step(obj, config.bb_variant, &dx, &dg).unwrap_or(1e-2 * sigma0);
        }
        history.push(entry);
        it = next;
    }

    let status = if it.grad_norm <= config.newton_tol {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterations
    };
    Ok(OptimizationOutcome {
        grad_norm: it.grad_norm,
        x: it.x,
        objective: it.objective,
        gradient: it.gradient,
        status,
        bb_iterations,
        newton_iterations,
        bb_exhausted,
        history,
    })
}
