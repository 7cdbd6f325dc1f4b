//! Model contract: dynamics, cost terms and the derivative actions the solver
//! needs.
//!
//! Models are written in weak (load-vector) form: the state equation reads
//! `M y' = F(y, u)` with `M` the state mass matrix, so that `f = M^{-1} F`.
//! All model-level gradients are Euclidean, i.e. they are load vectors in the
//! dual space. [`ProblemSpec`] turns them into Riesz representatives with
//! respect to the mass-weighted inner products.

use crate::error::{Error, Result};
use crate::linalg::{dot, Factorization, Matrix};

/// A twice differentiable functional of the state (`phi_1` or `phi_2`).
pub trait StateFunctional: Send + Sync {
    fn value(&self, y: &[f64]) -> f64;
    /// Euclidean gradient (load vector).
    fn gradient(&self, y: &[f64]) -> Vec<f64>;
    /// Euclidean Hessian applied to `z`.
    fn hessian_apply(&self, y: &[f64], z: &[f64]) -> Vec<f64>;
}

/// Second derivative of a scalar function of `(y, u)` applied to `(z, v)`,
/// returned as the pair of load vectors `(d_yy z + d_yu v, d_uy z + d_uu v)`.
pub type SecondOrderPair = (Vec<f64>, Vec<f64>);

pub trait ControlProblem: Send + Sync {
    fn name(&self) -> &str;
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;
    fn horizon(&self) -> f64;
    fn initial_state(&self) -> &[f64];

    fn state_mass(&self) -> &Matrix;
    fn control_mass(&self) -> &Matrix;

    /// Weak right-hand side `F(y, u)`.
    fn rhs(&self, y: &[f64], u: &[f64], out: &mut [f64]);
    /// Assembled `F_y(y, u)`.
    fn rhs_jacobian_y(&self, y: &[f64], u: &[f64]) -> Matrix;
    /// `F_y(y, u)^T`; used by every backward (adjoint) sweep.
    fn rhs_jacobian_y_transpose(&self, y: &[f64], u: &[f64]) -> Matrix {
        self.rhs_jacobian_y(y, u).transpose()
    }
    /// `F_u(y, u) v`.
    fn rhs_jacobian_u_apply(&self, y: &[f64], u: &[f64], v: &[f64], out: &mut [f64]);
    /// `F_u(y, u)^T q`.
    fn rhs_jacobian_u_transpose_apply(&self, y: &[f64], u: &[f64], q: &[f64], out: &mut [f64]);
    /// Second derivative of `p . F(y, u)` applied to `(z, v)`.
    fn rhs_second_derivative(&self, y: &[f64], u: &[f64], p: &[f64], z: &[f64], v: &[f64]) -> SecondOrderPair;

    fn running_cost(&self, y: &[f64], u: &[f64]) -> f64;
    /// Euclidean gradients `(l_y, l_u)`.
    fn running_cost_gradient(&self, y: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>);
    fn running_cost_hessian_apply(&self, y: &[f64], u: &[f64], z: &[f64], v: &[f64]) -> SecondOrderPair;

    /// `phi_1`, evaluated at the free time.
    fn intermediate_cost(&self) -> &dyn StateFunctional;
    /// `phi_2`, evaluated at the horizon; `None` means no terminal cost.
    fn terminal_cost(&self) -> Option<&dyn StateFunctional>;
}

/// Value and Euclidean gradients of `H(y, u, p) = l(y, u) + p . F(y, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianEval {
    pub value: f64,
    pub grad_y: Vec<f64>,
    pub grad_u: Vec<f64>,
}

/// A validated model together with factorised mass matrices.
pub struct ProblemSpec {
    model: Box<dyn ControlProblem>,
    state_mass_lu: Factorization,
    control_mass_lu: Factorization,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("model", &self.model.name())
            .field("state_dim", &self.model.state_dim())
            .field("control_dim", &self.model.control_dim())
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(model: impl ControlProblem + 'static) -> Result<Self> {
        Self::from_boxed(Box::new(model))
    }

    pub fn from_boxed(model: Box<dyn ControlProblem>) -> Result<Self> {
        let n = model.state_dim();
        let m = model.control_dim();
        if n == 0 || m == 0 {
            return Err(Error::Domain("state and control dimensions must be positive".into()));
        }
        if model.initial_state().len() != n {
            return Err(Error::Dimension {
                what: "initial state",
                expected: n,
                got: model.initial_state().len(),
            });
        }
        if model.initial_state().iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("initial state must be finite".into()));
        }
        if !(model.horizon() > 0.0 && model.horizon().is_finite()) {
            return Err(Error::Domain("horizon must be positive".into()));
        }
        if model.state_mass().dim() != n {
            return Err(Error::Dimension {
                what: "state mass",
                expected: n,
                got: model.state_mass().dim(),
            });
        }
        if model.control_mass().dim() != m {
            return Err(Error::Dimension {
                what: "control mass",
                expected: m,
                got: model.control_mass().dim(),
            });
        }
        model.state_mass().check_spd("state mass")?;
        model.control_mass().check_spd("control mass")?;
        let state_mass_lu = model.state_mass().factor()?;
        let control_mass_lu = model.control_mass().factor()?;
        Ok(Self {
            model,
            state_mass_lu,
            control_mass_lu,
        })
    }

    pub fn model(&self) -> &dyn ControlProblem {
        self.model.as_ref()
    }

    pub fn state_dim(&self) -> usize {
        self.model.state_dim()
    }

    pub fn control_dim(&self) -> usize {
        self.model.control_dim()
    }

    pub fn horizon(&self) -> f64 {
        self.model.horizon()
    }

    pub fn y0(&self) -> &[f64] {
        self.model.initial_state()
    }

    pub fn state_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        dot(a, &self.model.state_mass().apply_vec(b))
    }

    pub fn control_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        dot(a, &self.model.control_mass().apply_vec(b))
    }

    /// `M^{-1} b`: Riesz representative of a state load vector.
    pub fn state_riesz(&self, b: &[f64]) -> Vec<f64> {
        self.state_mass_lu.solve(b)
    }

    /// `M_c^{-1} b`: Riesz representative of a control load vector.
    pub fn control_riesz(&self, b: &[f64]) -> Vec<f64> {
        self.control_mass_lu.solve(b)
    }

    /// Weak right-hand side, checked for finiteness.
    pub fn rhs(&self, y: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.state_dim()];
        self.model.rhs(y, u, &mut out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::ModelEvaluation("rhs"));
        }
        Ok(out)
    }

    /// `f(y, u) = M^{-1} F(y, u)`.
    pub fn f_eval(&self, y: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.state_riesz(&self.rhs(y, u)?))
    }

    /// `f_y(y, u) z`.
    pub fn f_jac_y_apply(&self, y: &[f64], u: &[f64], z: &[f64]) -> Vec<f64> {
        let jz = self.model.rhs_jacobian_y(y, u).apply_vec(z);
        self.state_riesz(&jz)
    }

    /// Adjoint of `f_y` in the state inner product: `M^{-1} F_y^T q`.
    pub fn f_jac_y_adjoint_apply(&self, y: &[f64], u: &[f64], q: &[f64]) -> Vec<f64> {
        let jq = self.model.rhs_jacobian_y_transpose(y, u).apply_vec(q);
        self.state_riesz(&jq)
    }

    /// `f_u(y, u) v`.
    pub fn f_jac_u_apply(&self, y: &[f64], u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.state_dim()];
        self.model.rhs_jacobian_u_apply(y, u, v, &mut out);
        self.state_riesz(&out)
    }

    /// Adjoint of `f_u` from the state to the control inner product.
    pub fn f_jac_u_adjoint_apply(&self, y: &[f64], u: &[f64], q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.control_dim()];
        self.model.rhs_jacobian_u_transpose_apply(y, u, q, &mut out);
        self.control_riesz(&out)
    }

    /// `D^2 H(y, u, p)` applied to `(z, v)`, as load vectors.
    pub fn f_hess_apply(&self, y: &[f64], u: &[f64], p: &[f64], z: &[f64], v: &[f64]) -> SecondOrderPair {
        let (mut ry, mut ru) = self.model.rhs_second_derivative(y, u, p, z, v);
        let (ly, lu) = self.model.running_cost_hessian_apply(y, u, z, v);
        ry.iter_mut().zip(&ly).for_each(|(a, b)| *a += b);
        ru.iter_mut().zip(&lu).for_each(|(a, b)| *a += b);
        (ry, ru)
    }

    pub fn running_cost(&self, y: &[f64], u: &[f64]) -> f64 {
        self.model.running_cost(y, u)
    }

    pub fn running_cost_grads(&self, y: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.model.running_cost_gradient(y, u)
    }

    /// `H`, `H_y`, `H_u` with Euclidean gradients.
    pub fn hamiltonian(&self, y: &[f64], u: &[f64], p: &[f64]) -> Result<HamiltonianEval> {
        let f = self.rhs(y, u)?;
        let (mut grad_y, mut grad_u) = self.model.running_cost_gradient(y, u);
        let jt = self.model.rhs_jacobian_y_transpose(y, u).apply_vec(p);
        grad_y.iter_mut().zip(&jt).for_each(|(a, b)| *a += b);
        let mut fu = vec![0.0; self.control_dim()];
        self.model.rhs_jacobian_u_transpose_apply(y, u, p, &mut fu);
        grad_u.iter_mut().zip(&fu).for_each(|(a, b)| *a += b);
        Ok(HamiltonianEval {
            value: self.model.running_cost(y, u) + dot(p, &f),
            grad_y,
            grad_u,
        })
    }

    pub fn phi1_eval(&self, y: &[f64]) -> f64 {
        self.model.intermediate_cost().value(y)
    }

    /// Riesz gradient of `phi_1`.
    pub fn phi1_grad(&self, y: &[f64]) -> Vec<f64> {
        self.state_riesz(&self.model.intermediate_cost().gradient(y))
    }

    pub fn phi1_hess_apply(&self, y: &[f64], z: &[f64]) -> Vec<f64> {
        self.state_riesz(&self.model.intermediate_cost().hessian_apply(y, z))
    }

    pub fn phi2_eval(&self, y: &[f64]) -> f64 {
        self.model.terminal_cost().map_or(0.0, |c| c.value(y))
    }

    pub fn phi2_grad(&self, y: &[f64]) -> Vec<f64> {
        match self.model.terminal_cost() {
            Some(c) => self.state_riesz(&c.gradient(y)),
            None => vec![0.0; self.state_dim()],
        }
    }

    pub fn phi2_hess_apply(&self, y: &[f64], z: &[f64]) -> Vec<f64> {
        match self.model.terminal_cost() {
            Some(c) => self.state_riesz(&c.hessian_apply(y, z)),
            None => vec![0.0; self.state_dim()],
        }
    }
}
