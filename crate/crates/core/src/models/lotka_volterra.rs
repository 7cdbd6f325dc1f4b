//! Controlled Lotka-Volterra prey-predator system with logistic saturation.
//!
//! ```text
//! y1' = (y1 (a - b y2) + u1 y1) (1 - c1 y1)
//! y2' = (y2 (q y1 - r) + u2 y2) (1 - c2 y2)
//! ```
//! maximising the predator density `phi_1(y) = y2` at the free time.

use serde::{Deserialize, Serialize};

use super::functionals::{ControlEnergy, LogPenalty, QuadraticFunctional};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problem::{ControlProblem, ProblemSpec, SecondOrderPair, StateFunctional};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalPenalty {
    pub beta: f64,
    pub y_des: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LotkaVolterraParams {
    pub horizon: f64,
    pub y0: [f64; 2],
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub q: f64,
    pub c1: f64,
    pub c2: f64,
    pub terminal: Option<TerminalPenalty>,
}

impl Default for LotkaVolterraParams {
    fn default() -> Self {
        Self {
            horizon: 30.0,
            y0: [1.0, 2.0],
            alpha: 10.0,
            a: 0.3,
            b: 0.1,
            r: 0.2,
            q: 0.1,
            c1: 0.05,
            c2: 0.05,
            terminal: None,
        }
    }
}

impl LotkaVolterraParams {
    /// Variant with the prey-extinction penalty `beta = 25`, `y_des = 1`.
    pub fn with_terminal_penalty() -> Self {
        Self {
            terminal: Some(TerminalPenalty { beta: 25.0, y_des: 1.0 }),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct LotkaVolterra {
    p: LotkaVolterraParams,
    identity: Matrix,
    phi1: QuadraticFunctional,
    phi2: Option<LogPenalty>,
}

pub fn make_lotka_volterra(params: LotkaVolterraParams) -> Result<ProblemSpec> {
    ProblemSpec::new(LotkaVolterra::new(params)?)
}

impl LotkaVolterra {
    pub fn new(p: LotkaVolterraParams) -> Result<Self> {
        let positive = [p.horizon, p.alpha, p.a, p.b, p.r, p.q];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config(
                "Lotka-Volterra: T, alpha, a, b, r, q must be positive".into(),
            ));
        }
        if p.c1 < 0.0 || p.c2 < 0.0 {
            return Err(Error::Config("Lotka-Volterra: c1, c2 must be non-negative".into()));
        }
        let phi2 = match p.terminal {
            Some(t) if t.beta > 0.0 && t.y_des > 0.0 => Some(LogPenalty {
                beta: t.beta,
                target: t.y_des,
                component: 0,
                dim: 2,
            }),
            Some(_) => {
                return Err(Error::Config(
                    "Lotka-Volterra: terminal beta and y_des must be positive".into(),
                ))
            }
            None => None,
        };
        Ok(Self {
            p,
            identity: Matrix::Identity(2),
            phi1: QuadraticFunctional::linear(vec![0.0, 1.0]),
            phi2,
        })
    }

    pub fn params(&self) -> &LotkaVolterraParams {
        &self.p
    }

    fn energy(&self) -> ControlEnergy {
        ControlEnergy { alpha: self.p.alpha }
    }
}

impl ControlProblem for LotkaVolterra {
    fn name(&self) -> &str {
        "lotka-volterra"
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn control_dim(&self) -> usize {
        2
    }

    fn horizon(&self) -> f64 {
        self.p.horizon
    }

    fn initial_state(&self) -> &[f64] {
        &self.p.y0
    }

    fn state_mass(&self) -> &Matrix {
        &self.identity
    }

    fn control_mass(&self) -> &Matrix {
        &self.identity
    }

    fn rhs(&self, y: &[f64], u: &[f64], out: &mut [f64]) {
        let p = &self.p;
        out[0] = y[0] * (p.a - p.b * y[1] + u[0]) * (1.0 - p.c1 * y[0]);
        out[1] = y[1] * (p.q * y[0] - p.r + u[1]) * (1.0 - p.c2 * y[1]);
    }

    fn rhs_jacobian_y(&self, y: &[f64], u: &[f64]) -> Matrix {
        let p = &self.p;
        let e1 = p.a - p.b * y[1] + u[0];
        let e2 = p.q * y[0] - p.r + u[1];
        let w1 = 1.0 - p.c1 * y[0];
        let w2 = 1.0 - p.c2 * y[1];
        Matrix::Dense(nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[
                e1 * (1.0 - 2.0 * p.c1 * y[0]),
                -p.b * y[0] * w1,
                p.q * y[1] * w2,
                e2 * (1.0 - 2.0 * p.c2 * y[1]),
            ],
        ))
    }

    fn rhs_jacobian_u_apply(&self, y: &[f64], _u: &[f64], v: &[f64], out: &mut [f64]) {
        out[0] = y[0] * (1.0 - self.p.c1 * y[0]) * v[0];
        out[1] = y[1] * (1.0 - self.p.c2 * y[1]) * v[1];
    }

    fn rhs_jacobian_u_transpose_apply(&self, y: &[f64], u: &[f64], q: &[f64], out: &mut [f64]) {
        // F_u is diagonal.
        self.rhs_jacobian_u_apply(y, u, q, out);
    }

    fn rhs_second_derivative(&self, y: &[f64], u: &[f64], pp: &[f64], z: &[f64], v: &[f64]) -> SecondOrderPair {
        let p = &self.p;
        let e1 = p.a - p.b * y[1] + u[0];
        let e2 = p.q * y[0] - p.r + u[1];
        let s1 = 1.0 - 2.0 * p.c1 * y[0];
        let s2 = 1.0 - 2.0 * p.c2 * y[1];
        let ry = vec![
            pp[0] * (-2.0 * p.c1 * e1 * z[0] - p.b * s1 * z[1] + s1 * v[0]) + pp[1] * p.q * s2 * z[1],
            pp[0] * (-p.b * s1 * z[0]) + pp[1] * (p.q * s2 * z[0] - 2.0 * p.c2 * e2 * z[1] + s2 * v[1]),
        ];
        let ru = vec![pp[0] * s1 * z[0], pp[1] * s2 * z[1]];
        (ry, ru)
    }

    fn running_cost(&self, _y: &[f64], u: &[f64]) -> f64 {
        self.energy().value(&self.identity, u)
    }

    fn running_cost_gradient(&self, _y: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0; 2], self.energy().gradient(&self.identity, u))
    }

    fn running_cost_hessian_apply(&self, _y: &[f64], _u: &[f64], _z: &[f64], v: &[f64]) -> SecondOrderPair {
        (vec![0.0; 2], self.energy().hessian_apply(&self.identity, v))
    }

    fn intermediate_cost(&self) -> &dyn StateFunctional {
        &self.phi1
    }

    fn terminal_cost(&self) -> Option<&dyn StateFunctional> {
        self.phi2.as_ref().map(|p| p as &dyn StateFunctional)
    }
}
