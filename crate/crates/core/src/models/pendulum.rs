//! Damped pendulum driven by a horizontal force, maximising the angle.

use serde::{Deserialize, Serialize};

use super::functionals::{ControlEnergy, QuadraticFunctional};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problem::{ControlProblem, ProblemSpec, SecondOrderPair, StateFunctional};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PendulumParams {
    pub horizon: f64,
    pub y0: [f64; 2],
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self {
            horizon: 25.0,
            y0: [-1.0, 0.0],
            alpha: 10.0,
            lambda: 0.03,
            mu: 1.0,
        }
    }
}

/// State `(theta, theta')`, dynamics `theta'' + lambda theta' + mu sin theta = u`.
#[derive(Debug, Clone)]
pub struct Pendulum {
    p: PendulumParams,
    state_identity: Matrix,
    control_identity: Matrix,
    phi1: QuadraticFunctional,
}

pub fn make_pendulum(params: PendulumParams) -> Result<ProblemSpec> {
    ProblemSpec::new(Pendulum::new(params)?)
}

impl Pendulum {
    pub fn new(p: PendulumParams) -> Result<Self> {
        if [p.lambda, p.alpha, p.horizon]
            .iter()
            .any(|v| !(*v > 0.0 && v.is_finite()))
        {
            return Err(Error::Config("pendulum: lambda, alpha and T must be positive".into()));
        }
        Ok(Self {
            p,
            state_identity: Matrix::Identity(2),
            control_identity: Matrix::Identity(1),
            phi1: QuadraticFunctional::linear(vec![1.0, 0.0]),
        })
    }
}

impl ControlProblem for Pendulum {
    fn name(&self) -> &str {
        "pendulum"
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn control_dim(&self) -> usize {
        1
    }

    fn horizon(&self) -> f64 {
        self.p.horizon
    }

    fn initial_state(&self) -> &[f64] {
        &self.p.y0
    }

    fn state_mass(&self) -> &Matrix {
        &self.state_identity
    }

    fn control_mass(&self) -> &Matrix {
        &self.control_identity
    }

    fn rhs(&self, y: &[f64], u: &[f64], out: &mut [f64]) {
        out[0] = y[1];
        out[1] = -self.p.lambda * y[1] - self.p.mu * y[0].sin() + u[0];
    }

    fn rhs_jacobian_y(&self, y: &[f64], _u: &[f64]) -> Matrix {
        Matrix::Dense(nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, -self.p.mu * y[0].cos(), -self.p.lambda],
        ))
    }

    fn rhs_jacobian_u_apply(&self, _y: &[f64], _u: &[f64], v: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = v[0];
    }

    fn rhs_jacobian_u_transpose_apply(&self, _y: &[f64], _u: &[f64], q: &[f64], out: &mut [f64]) {
        out[0] = q[1];
    }

    fn rhs_second_derivative(&self, y: &[f64], _u: &[f64], p: &[f64], z: &[f64], _v: &[f64]) -> SecondOrderPair {
        (vec![p[1] * self.p.mu * y[0].sin() * z[0], 0.0], vec![0.0])
    }

    fn running_cost(&self, _y: &[f64], u: &[f64]) -> f64 {
        ControlEnergy { alpha: self.p.alpha }.value(&self.control_identity, u)
    }

    fn running_cost_gradient(&self, _y: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let e = ControlEnergy { alpha: self.p.alpha };
        (vec![0.0; 2], e.gradient(&self.control_identity, u))
    }

    fn running_cost_hessian_apply(&self, _y: &[f64], _u: &[f64], _z: &[f64], v: &[f64]) -> SecondOrderPair {
        let e = ControlEnergy { alpha: self.p.alpha };
        (vec![0.0; 2], e.hessian_apply(&self.control_identity, v))
    }

    fn intermediate_cost(&self) -> &dyn StateFunctional {
        &self.phi1
    }

    fn terminal_cost(&self) -> Option<&dyn StateFunctional> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_and_reference_point() {
        let pb = make_pendulum(PendulumParams::default()).unwrap();
        assert_eq!(pb.f_eval(&[0.0, 0.0], &[0.0]).unwrap(), vec![0.0, 0.0]);
        let f = pb.f_eval(&[-1.0, 0.0], &[0.0]).unwrap();
        assert_eq!(f[0], 0.0);
        assert!((f[1] - 0.841_470_984_807_896_5).abs() < 1e-15);
    }

    #[test]
    fn state_jacobian_at_reference_point() {
        let pb = make_pendulum(PendulumParams::default()).unwrap();
        let jz = pb.f_jac_y_apply(&[-1.0, 0.0], &[0.0], &[1.0, 0.0]);
        assert_eq!(jz[0], 0.0);
        assert!((jz[1] + 0.540_302_305_868_139_8).abs() < 1e-15);
    }

    #[test]
    fn curvature_term_sign_matches_differences() {
        // p2 * mu * sin(y1) * z1^2 against a central difference of p . F_y z.
        let pb = make_pendulum(PendulumParams::default()).unwrap();
        let y = [0.7, -0.2];
        let p = [0.3, 1.5];
        let z = [1.0, 0.0];
        let (ry, _) = pb.model().rhs_second_derivative(&y, &[0.0], &p, &z, &[0.0]);
        let eps = 1e-5;
        let hy = |y1: f64| pb.hamiltonian(&[y1, y[1]], &[0.0], &p).unwrap().grad_y[0];
        let fd = (hy(y[0] + eps) - hy(y[0] - eps)) / (2.0 * eps);
        assert!(ry[0] > 0.0);
        assert!((fd - ry[0]).abs() < 1e-8);
    }
}
