//! Linear test model `y' = A y + B u` with quadratic costs.
//!
//! Used by the verification suite: the scalar case has closed-form
//! solutions, and with `A = 0` the adjoint-based gradient agrees with the
//! discrete objective to round-off.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::functionals::{ControlEnergy, QuadraticFunctional};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problem::{ControlProblem, ProblemSpec, SecondOrderPair, StateFunctional};

/// Scalar `y' = a y + b u`, `phi_1(y) = g y + (k/2) y^2`, `phi_2(y) = g2 y`.
///
/// The defaults give `y' = -y + u`, `y(0) = 1`, `phi_1(y) = y - y^2` on
/// `[0, 2]`: the maximiser is `u = 0`, `tau = ln 2` with `J = 1/4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalarLinearParams {
    pub horizon: f64,
    pub y0: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub phi1_linear: f64,
    pub phi1_quadratic: f64,
    pub phi2_linear: f64,
}

impl Default for ScalarLinearParams {
    fn default() -> Self {
        Self {
            horizon: 2.0,
            y0: 1.0,
            a: -1.0,
            b: 1.0,
            alpha: 1.0,
            phi1_linear: 1.0,
            phi1_quadratic: -2.0,
            phi2_linear: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearModel {
    a: Matrix,
    b: DMatrix<f64>,
    alpha: f64,
    y0: Vec<f64>,
    horizon: f64,
    state_identity: Matrix,
    control_identity: Matrix,
    phi1: QuadraticFunctional,
    phi2: Option<QuadraticFunctional>,
}

impl LinearModel {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        alpha: f64,
        y0: Vec<f64>,
        horizon: f64,
        phi1: QuadraticFunctional,
        phi2: Option<QuadraticFunctional>,
    ) -> Result<Self> {
        let n = y0.len();
        if a.nrows() != n || a.ncols() != n || b.nrows() != n || b.ncols() == 0 {
            return Err(Error::Config("linear model: inconsistent A/B/y0 shapes".into()));
        }
        if alpha < 0.0 {
            return Err(Error::Config("linear model: alpha must be non-negative".into()));
        }
        let m = b.ncols();
        Ok(Self {
            a: Matrix::Dense(a),
            b,
            alpha,
            y0,
            horizon,
            state_identity: Matrix::Identity(n),
            control_identity: Matrix::Identity(m),
            phi1,
            phi2,
        })
    }

    pub fn scalar(p: &ScalarLinearParams) -> Result<Self> {
        let phi1 = QuadraticFunctional {
            linear: vec![p.phi1_linear],
            quadratic: (p.phi1_quadratic != 0.0).then(|| Matrix::Dense(DMatrix::from_element(1, 1, p.phi1_quadratic))),
        };
        let phi2 = (p.phi2_linear != 0.0).then(|| QuadraticFunctional::linear(vec![p.phi2_linear]));
        Self::new(
            DMatrix::from_element(1, 1, p.a),
            DMatrix::from_element(1, 1, p.b),
            p.alpha,
            vec![p.y0],
            p.horizon,
            phi1,
            phi2,
        )
    }
}

pub fn make_scalar_linear(p: &ScalarLinearParams) -> Result<ProblemSpec> {
    ProblemSpec::new(LinearModel::scalar(p)?)
}

impl ControlProblem for LinearModel {
    fn name(&self) -> &str {
        "linear"
    }

    fn state_dim(&self) -> usize {
        self.y0.len()
    }

    fn control_dim(&self) -> usize {
        self.b.ncols()
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn initial_state(&self) -> &[f64] {
        &self.y0
    }

    fn state_mass(&self) -> &Matrix {
        &self.state_identity
    }

    fn control_mass(&self) -> &Matrix {
        &self.control_identity
    }

    fn rhs(&self, y: &[f64], u: &[f64], out: &mut [f64]) {
        self.a.apply(y, out);
        for (i, o) in out.iter_mut().enumerate() {
            for (j, uj) in u.iter().enumerate() {
                *o += self.b[(i, j)] * uj;
            }
        }
    }

    fn rhs_jacobian_y(&self, _y: &[f64], _u: &[f64]) -> Matrix {
        self.a.clone()
    }

    fn rhs_jacobian_u_apply(&self, _y: &[f64], _u: &[f64], v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..v.len()).map(|j| self.b[(i, j)] * v[j]).sum();
        }
    }

    fn rhs_jacobian_u_transpose_apply(&self, _y: &[f64], _u: &[f64], q: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..q.len()).map(|i| self.b[(i, j)] * q[i]).sum();
        }
    }

    fn rhs_second_derivative(&self, y: &[f64], u: &[f64], _p: &[f64], _z: &[f64], _v: &[f64]) -> SecondOrderPair {
        (vec![0.0; y.len()], vec![0.0; u.len()])
    }

    fn running_cost(&self, _y: &[f64], u: &[f64]) -> f64 {
        ControlEnergy { alpha: self.alpha }.value(&self.control_identity, u)
    }

    fn running_cost_gradient(&self, y: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let e = ControlEnergy { alpha: self.alpha };
        (vec![0.0; y.len()], e.gradient(&self.control_identity, u))
    }

    fn running_cost_hessian_apply(&self, y: &[f64], _u: &[f64], _z: &[f64], v: &[f64]) -> SecondOrderPair {
        let e = ControlEnergy { alpha: self.alpha };
        (vec![0.0; y.len()], e.hessian_apply(&self.control_identity, v))
    }

    fn intermediate_cost(&self) -> &dyn StateFunctional {
        &self.phi1
    }

    fn terminal_cost(&self) -> Option<&dyn StateFunctional> {
        self.phi2.as_ref().map(|p| p as &dyn StateFunctional)
    }
}
