//! Cost building blocks shared by the built-in models.

use crate::linalg::{dot, Matrix};
use crate::problem::StateFunctional;

/// `g . y + 1/2 y^T Q y`.
#[derive(Debug, Clone)]
pub struct QuadraticFunctional {
    pub linear: Vec<f64>,
    pub quadratic: Option<Matrix>,
}

impl QuadraticFunctional {
    pub fn linear(g: Vec<f64>) -> Self {
        Self {
            linear: g,
            quadratic: None,
        }
    }

    pub fn quadratic(q: Matrix) -> Self {
        Self {
            linear: vec![0.0; q.dim()],
            quadratic: Some(q),
        }
    }
}

impl StateFunctional for QuadraticFunctional {
    fn value(&self, y: &[f64]) -> f64 {
        let mut v = dot(&self.linear, y);
        if let Some(q) = &self.quadratic {
            v += 0.5 * dot(y, &q.apply_vec(y));
        }
        v
    }

    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let mut g = self.linear.clone();
        if let Some(q) = &self.quadratic {
            g.iter_mut().zip(q.apply_vec(y)).for_each(|(a, b)| *a += b);
        }
        g
    }

    fn hessian_apply(&self, _y: &[f64], z: &[f64]) -> Vec<f64> {
        match &self.quadratic {
            Some(q) => q.apply_vec(z),
            None => vec![0.0; z.len()],
        }
    }
}

/// `-beta (log |y_k / y_des|)^2`, penalising a component away from `y_des`.
#[derive(Debug, Clone)]
pub struct LogPenalty {
    pub beta: f64,
    pub target: f64,
    pub component: usize,
    pub dim: usize,
}

impl StateFunctional for LogPenalty {
    fn value(&self, y: &[f64]) -> f64 {
        let l = (y[self.component] / self.target).abs().ln();
        -self.beta * l * l
    }

    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let x = y[self.component];
        let l = (x / self.target).abs().ln();
        let mut g = vec![0.0; self.dim];
        g[self.component] = -2.0 * self.beta * l / x;
        g
    }

    fn hessian_apply(&self, y: &[f64], z: &[f64]) -> Vec<f64> {
        let x = y[self.component];
        let l = (x / self.target).abs().ln();
        let mut out = vec![0.0; self.dim];
        out[self.component] = -2.0 * self.beta * (1.0 - l) / (x * x) * z[self.component];
        out
    }
}

/// `-(alpha / 2) u^T M_c u`, the running cost used by every built-in model.
#[derive(Debug, Clone, Copy)]
pub struct ControlEnergy {
    pub alpha: f64,
}

impl ControlEnergy {
    pub fn value(&self, mass: &Matrix, u: &[f64]) -> f64 {
        -0.5 * self.alpha * dot(u, &mass.apply_vec(u))
    }

    pub fn gradient(&self, mass: &Matrix, u: &[f64]) -> Vec<f64> {
        mass.apply_vec(u).into_iter().map(|v| -self.alpha * v).collect()
    }

    pub fn hessian_apply(&self, mass: &Matrix, v: &[f64]) -> Vec<f64> {
        self.gradient(mass, v)
    }
}
