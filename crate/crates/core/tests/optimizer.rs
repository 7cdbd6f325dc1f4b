mod common;

use freetime::optimizer::{
    maximize, second_order_check, solve, BbVariant, Phase, ReducedObjective, SolveStatus, SolverConfig,
};
use freetime::Result;

/// `J(x) = -1/2 (x - c)^T A (x - c)` with a symmetric positive-definite `A`
/// in the Euclidean inner product.
struct Quadratic {
    a: Vec<Vec<f64>>,
    center: Vec<f64>,
    evaluations: usize,
}

impl Quadratic {
    fn new(a: Vec<Vec<f64>>, center: Vec<f64>) -> Self {
        Self {
            a,
            center,
            evaluations: 0,
        }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl ReducedObjective for Quadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.evaluations += 1;
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(x, c)| x - c).collect();
        let ad = self.apply(&d);
        let j = -0.5 * self.inner(&d, &ad);
        Ok((j, ad.iter().map(|v| -v).collect()))
    }

    fn hvp(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        Ok(self.apply(v).iter().map(|x| -x).collect())
    }
}

/// Linear operator `v -> c v` as a Hessian, for the spectral check.
struct ScaledIdentity {
    c: f64,
    n: usize,
}

impl ReducedObjective for ScaledIdentity {
    fn dim(&self) -> usize {
        self.n
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok((0.5 * self.c * self.inner(x, x), x.iter().map(|v| self.c * v).collect()))
    }

    fn hvp(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        Ok(v.iter().map(|x| self.c * x).collect())
    }
}

#[test]
fn bb_on_a_one_dimensional_quadratic_uses_the_inverse_curvature() {
    let mut obj = Quadratic::new(vec![vec![1.0]], vec![3.0]);
    for variant in [BbVariant::Bb1, BbVariant::Bb2] {
        let config = SolverConfig {
            bb_variant: variant,
            ..SolverConfig::default()
        };
        let out = maximize(&mut obj, vec![0.0], &config).unwrap();
        assert_eq!(out.status, SolveStatus::Converged);
        assert!((out.x[0] - 3.0).abs() <= 1e-12);
        let bb: Vec<_> = out.history.iter().filter(|h| h.phase == Phase::Bb).collect();
        assert!(bb.len() >= 3);
        for h in &bb[2..] {
            assert_eq!(h.step, 1.0, "iteration {}", h.iteration);
        }
        assert_eq!(out.newton_iterations, 0);
    }
}

#[test]
fn starting_at_a_critical_point_takes_no_iterations() {
    let mut obj = Quadratic::new(vec![vec![2.0, 0.5], vec![0.5, 1.0]], vec![1.0, -1.0]);
    let out = maximize(&mut obj, vec![1.0, -1.0], &SolverConfig::default()).unwrap();
    assert_eq!(out.status, SolveStatus::Converged);
    assert_eq!((out.bb_iterations, out.newton_iterations), (0, 0));
    assert_eq!(out.history.len(), 1);
    assert_eq!(obj.evaluations, 1);
}

#[test]
fn one_newton_step_solves_a_quadratic() {
    let mut obj = Quadratic::new(
        vec![vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 0.5], vec![0.0, 0.5, 2.0]],
        vec![0.5, -2.0, 1.0],
    );
    let config = SolverConfig {
        grad_switch_tol: 1e30,
        ..SolverConfig::default()
    };
    let out = maximize(&mut obj, vec![0.0, 0.0, 0.0], &config).unwrap();
    assert_eq!(out.status, SolveStatus::Converged);
    assert_eq!((out.bb_iterations, out.newton_iterations), (0, 1));
    assert!(out.grad_norm <= 1e-12);
    let last = out.history.last().unwrap();
    assert_eq!(last.phase, Phase::Newton);
    assert!(last.gmres_iterations <= 3 && last.flags.is_empty());
}

#[test]
fn spectral_check_signs() {
    let mut neg = ScaledIdentity { c: -1.0, n: 7 };
    let check = second_order_check(&mut neg, 100, 1e-6, 0).unwrap();
    assert!((check.lambda_max + 1.0).abs() <= 1e-12, "{check:?}");
    assert!(check.consistent_with_local_max);

    let mut pos = ScaledIdentity { c: 1.0, n: 7 };
    let check = second_order_check(&mut pos, 100, 1e-6, 0).unwrap();
    assert!((check.lambda_max - 1.0).abs() <= 1e-12, "{check:?}");
    assert!(!check.consistent_with_local_max);
}

#[test]
fn spectral_check_finds_the_top_of_an_indefinite_spectrum() {
    // Eigenvalues -5 and 0.5: the dominant one is negative, the largest is not.
    let mut obj = Quadratic::new(vec![vec![5.0, 0.0], vec![0.0, -0.5]], vec![0.0, 0.0]);
    let check = second_order_check(&mut obj, 200, 1e-6, 3).unwrap();
    assert!((check.lambda_dominant + 5.0).abs() <= 1e-8, "{check:?}");
    assert!((check.lambda_max - 0.5).abs() <= 1e-8, "{check:?}");
    assert!(!check.consistent_with_local_max);
}

#[test]
fn zero_iteration_budget_reports_failure() {
    let pb = common::decay(2.0, 1.0);
    let config = SolverConfig {
        n_steps: 40,
        max_bb_iters: 0,
        max_newton_iters: 0,
        ..SolverConfig::default()
    };
    let report = solve(&pb, &config).unwrap();
    assert_eq!(report.status, SolveStatus::MaxIterations);
    assert!(!report.converged());
    assert!(report.bb_exhausted);
    assert_eq!(report.history.len(), 1);
    assert_eq!(report.tau_star, 1.0);
}

#[test]
fn scalar_model_solve_finds_the_closed_form_maximiser() {
    let pb = freetime::models::make_scalar_linear(&Default::default()).unwrap();
    let config = SolverConfig {
        n_steps: 200,
        ..SolverConfig::default()
    };
    let report = solve(&pb, &config).unwrap();
    assert!(report.converged(), "{:?}", report.status);
    assert!(report.grad_norm <= config.newton_tol);
    let last = report.history.last().unwrap();
    assert_eq!(last.grad_norm, report.grad_norm);
    // Gradient phase ends at the switch threshold, Newton at the final one.
    let bb_last = report.history.iter().rev().find(|h| h.phase == Phase::Bb).unwrap();
    assert!(bb_last.grad_norm <= config.grad_switch_tol || report.bb_iterations == 0);
    let check = report.second_order.as_ref().unwrap();
    assert_eq!(check.iterations, config.power_iters);
    assert!(check.consistent_with_local_max, "{check:?}");
    // u = 0 and y(tau) = exp(-tau) = 1/2 up to the O(h^2) time error.
    assert!((report.tau_star - 2f64.ln()).abs() <= 1e-4, "{}", report.tau_star);
    assert!((report.j_star - 0.25).abs() <= 1e-10, "{}", report.j_star);
    assert!(report.u_star.as_slice().iter().all(|u| u.abs() <= 1e-8));
}
