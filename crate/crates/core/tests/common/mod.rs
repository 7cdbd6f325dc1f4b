//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;

use freetime::models::functionals::QuadraticFunctional;
use freetime::models::{make_scalar_linear, LinearModel, ScalarLinearParams};
use freetime::{ControlGrid, ProblemSpec, SGrid, TauParameter};

/// `y' = A y + B u` with `phi_1(y) = g . y` and no terminal cost.
#[allow(clippy::too_many_arguments)]
pub fn linear(
    a: &[f64],
    b: &[f64],
    n: usize,
    m: usize,
    alpha: f64,
    y0: Vec<f64>,
    horizon: f64,
    g: Vec<f64>,
) -> ProblemSpec {
    let model = LinearModel::new(
        DMatrix::from_row_slice(n, n, a),
        DMatrix::from_row_slice(n, m, b),
        alpha,
        y0,
        horizon,
        QuadraticFunctional::linear(g),
        None,
    )
    .unwrap();
    ProblemSpec::new(model).unwrap()
}

/// `y' = 0` in two dimensions with one control.
pub fn zero_dynamics(alpha: f64, g: Vec<f64>, horizon: f64) -> ProblemSpec {
    linear(&[0.0; 4], &[0.0, 0.0], 2, 1, alpha, vec![0.7, -1.3], horizon, g)
}

/// Scalar `y' = -y + u`, `y(0) = 1`, `phi_1(y) = y`.
pub fn decay(horizon: f64, alpha: f64) -> ProblemSpec {
    make_scalar_linear(&ScalarLinearParams {
        horizon,
        alpha,
        phi1_quadratic: 0.0,
        ..ScalarLinearParams::default()
    })
    .unwrap()
}

pub fn tau(problem: &ProblemSpec, fraction: f64) -> TauParameter {
    TauParameter::new(fraction * problem.horizon(), problem.horizon()).unwrap()
}

pub fn constant_control(grid: SGrid, values: &[f64]) -> ControlGrid {
    ControlGrid::from_fn(grid, values.len(), |_, _, c| values[c])
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
