mod common;

use nalgebra::DMatrix;

use freetime::linalg::Matrix;
use freetime::models::functionals::QuadraticFunctional;
use freetime::models::LinearModel;
use freetime::problem::SecondOrderPair;
use freetime::verification::{
    duality_check, fd_gradient_check, fitted_slope, objective_taylor_checks, state_taylor_check, verification_suite,
    TAYLOR_EPS,
};
use freetime::{ControlGrid, ControlProblem, ProblemSpec, ReducedVector, SGrid, StateFunctional};

fn rotating_linear() -> LinearModel {
    LinearModel::new(
        DMatrix::from_row_slice(2, 2, &[-0.5, 1.0, -1.0, -0.2]),
        DMatrix::from_row_slice(2, 1, &[1.0, 0.5]),
        1.0,
        vec![1.0, 0.0],
        3.0,
        QuadraticFunctional::linear(vec![0.0, 1.0]),
        None,
    )
    .unwrap()
}

/// A correct model except that the transposed state Jacobian has the wrong
/// sign, so every backward sweep is wrong.
struct WrongSignAdjoint(LinearModel);

impl ControlProblem for WrongSignAdjoint {
    fn name(&self) -> &str {
        "wrong-sign-adjoint"
    }
    fn state_dim(&self) -> usize {
        self.0.state_dim()
    }
    fn control_dim(&self) -> usize {
        self.0.control_dim()
    }
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }
    fn initial_state(&self) -> &[f64] {
        self.0.initial_state()
    }
    fn state_mass(&self) -> &Matrix {
        self.0.state_mass()
    }
    fn control_mass(&self) -> &Matrix {
        self.0.control_mass()
    }
    fn rhs(&self, y: &[f64], u: &[f64], out: &mut [f64]) {
        self.0.rhs(y, u, out)
    }
    fn rhs_jacobian_y(&self, y: &[f64], u: &[f64]) -> Matrix {
        self.0.rhs_jacobian_y(y, u)
    }
    fn rhs_jacobian_y_transpose(&self, y: &[f64], u: &[f64]) -> Matrix {
        Matrix::Dense(-self.0.rhs_jacobian_y(y, u).to_dense().transpose())
    }
    fn rhs_jacobian_u_apply(&self, y: &[f64], u: &[f64], v: &[f64], out: &mut [f64]) {
        self.0.rhs_jacobian_u_apply(y, u, v, out)
    }
    fn rhs_jacobian_u_transpose_apply(&self, y: &[f64], u: &[f64], q: &[f64], out: &mut [f64]) {
        self.0.rhs_jacobian_u_transpose_apply(y, u, q, out)
    }
    fn rhs_second_derivative(&self, y: &[f64], u: &[f64], p: &[f64], z: &[f64], v: &[f64]) -> SecondOrderPair {
        self.0.rhs_second_derivative(y, u, p, z, v)
    }
    fn running_cost(&self, y: &[f64], u: &[f64]) -> f64 {
        self.0.running_cost(y, u)
    }
    fn running_cost_gradient(&self, y: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.0.running_cost_gradient(y, u)
    }
    fn running_cost_hessian_apply(&self, y: &[f64], u: &[f64], z: &[f64], v: &[f64]) -> SecondOrderPair {
        self.0.running_cost_hessian_apply(y, u, z, v)
    }
    fn intermediate_cost(&self) -> &dyn StateFunctional {
        self.0.intermediate_cost()
    }
    fn terminal_cost(&self) -> Option<&dyn StateFunctional> {
        self.0.terminal_cost()
    }
}

fn control(s: f64, _: usize) -> f64 {
    0.2 * s.sin()
}

#[test]
fn duality_check_passes_for_the_correct_model() {
    let pb = ProblemSpec::new(rotating_linear()).unwrap();
    let report = duality_check(&pb, common::tau(&pb, 0.4), &control, &[200, 400, 800], 1, (3.5, 4.5)).unwrap();
    assert!(report.passed, "{report:?}");
}

#[test]
fn duality_check_catches_a_wrong_sign_transpose() {
    let pb = ProblemSpec::new(WrongSignAdjoint(rotating_linear())).unwrap();
    let report = duality_check(&pb, common::tau(&pb, 0.4), &control, &[200, 400, 800], 1, (3.5, 4.5)).unwrap();
    assert!(!report.passed, "{report:?}");
}

#[test]
fn gradient_check_catches_a_wrong_sign_transpose() {
    let pb = ProblemSpec::new(WrongSignAdjoint(rotating_linear())).unwrap();
    let grid = SGrid::new(400).unwrap();
    let u = ControlGrid::from_fn(grid, 1, |_, s, c| control(s, c));
    let report = fd_gradient_check(&pb, &u, common::tau(&pb, 0.4), 1e-5, 3, 2, 1e-4).unwrap();
    assert!(!report.passed, "{report:?}");
}

#[test]
fn zero_direction_has_zero_taylor_remainders() {
    let pb = ProblemSpec::new(rotating_linear()).unwrap();
    let grid = SGrid::new(100).unwrap();
    let u = ControlGrid::from_fn(grid, 1, |_, s, c| control(s, c));
    let zero = ReducedVector::zeros(grid, 1);
    let (first, second) = objective_taylor_checks(&pb, &u, common::tau(&pb, 0.4), &zero, &TAYLOR_EPS).unwrap();
    for r in [first, second] {
        assert!(r.passed, "{r:?}");
        assert_eq!(r.metadata.get("at_floor"), Some(&1.0), "{r:?}");
    }
}

#[test]
fn affine_state_map_sits_at_the_round_off_floor() {
    // y' = A y + B u is affine in u, so the state Taylor remainder is
    // round-off at every step size and no slope can be fitted.
    let pb = ProblemSpec::new(rotating_linear()).unwrap();
    let grid = SGrid::new(100).unwrap();
    let u = ControlGrid::from_fn(grid, 1, |_, s, c| control(s, c));
    let v = ControlGrid::from_fn(grid, 1, |_, s, _| (2.0 * s).cos());
    let report = state_taylor_check(&pb, &u, common::tau(&pb, 0.4), &v, &TAYLOR_EPS).unwrap();
    assert!(report.passed, "{report:?}");
    assert_eq!(report.metadata.get("at_floor"), Some(&1.0), "{report:?}");
}

#[test]
fn slope_fit_recovers_exact_powers() {
    let eps = [1e-1, 1e-2, 1e-3];
    let r: Vec<f64> = eps.iter().map(|e: &f64| 5.0 * e.powi(3)).collect();
    let slope = fitted_slope(&eps, &r, 0.0).unwrap();
    assert!((slope - 3.0).abs() <= 1e-12);
    assert!(fitted_slope(&eps, &[0.0, 0.0, 0.0], 1e-15).is_none());
}

#[test]
fn gradient_is_exact_without_state_dynamics() {
    // With A = 0 every CN step is an exact trapezoid, and the adjoint-based
    // gradient is the derivative of the discrete objective.
    let model = LinearModel::new(
        DMatrix::zeros(2, 2),
        DMatrix::from_row_slice(2, 1, &[1.0, -0.5]),
        0.7,
        vec![0.3, 0.2],
        2.0,
        QuadraticFunctional::linear(vec![1.0, 2.0]),
        Some(QuadraticFunctional::linear(vec![-0.5, 0.1])),
    )
    .unwrap();
    let pb = ProblemSpec::new(model).unwrap();
    let grid = SGrid::new(200).unwrap();
    let u = ControlGrid::from_fn(grid, 1, |_, s, c| control(s, c));
    let report = fd_gradient_check(&pb, &u, common::tau(&pb, 0.3), 1e-5, 4, 5, 1e-8).unwrap();
    assert!(report.passed, "{report:?}");
}

#[test]
fn suite_passes_on_the_built_in_ode_models() {
    for id in ["scalar-linear", "lotka-volterra", "lotka-volterra-terminal"] {
        let cfg = freetime::io::RunConfig::for_model(id).unwrap();
        let pb = cfg.model.build().unwrap();
        let reports = verification_suite(&pb, 400, 0).unwrap();
        assert_eq!(reports.len(), 5);
        for r in &reports {
            assert!(r.passed, "{id}: {r:?}");
        }
    }
}
