//! Viscous Burgers equation on `(0, 1)` with homogeneous Dirichlet data,
//! distributed control on `omega` and the energy on `D` as the quantity to
//! maximise, semi-discretised with P1 finite elements.
//!
//! Weak form in coefficient space (interior nodes only):
//! `M y' = -nu A y - beta C(y) + B u`.

use serde::{Deserialize, Serialize};

use super::fem::{interior_block, UniformMesh};
use super::functionals::{ControlEnergy, QuadraticFunctional};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Tridiagonal};
use crate::problem::{ControlProblem, ProblemSpec, SecondOrderPair, StateFunctional};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BurgersParams {
    pub horizon: f64,
    /// Mesh nodes including both boundary nodes.
    pub n_dof: usize,
    pub nu: f64,
    pub beta: f64,
    pub alpha: f64,
    pub omega: [f64; 2],
    pub observation: [f64; 2],
}

impl Default for BurgersParams {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            n_dof: 101,
            nu: 2e-4,
            beta: 0.05,
            alpha: 2e-9,
            omega: [0.0, 0.25],
            observation: [0.25, 0.30],
        }
    }
}

/// Assembled discretisation. Matrices are built once and never mutated.
#[derive(Debug, Clone)]
pub struct BurgersDiscretization {
    pub params: BurgersParams,
    pub mesh: UniformMesh,
    /// Mesh indices carrying a control coefficient.
    pub control_nodes: std::ops::RangeInclusive<usize>,
    /// Interior consistent mass.
    pub mass: Tridiagonal,
    /// Interior stiffness.
    pub stiffness: Tridiagonal,
    /// Mass over `omega`, restricted to the control nodes.
    pub control_mass: Tridiagonal,
    /// Mass over `omega`, all mesh nodes (control load operator).
    pub omega_mass_full: Tridiagonal,
    /// Mass over `D`, interior nodes.
    pub observation_mass: Tridiagonal,
}

impl BurgersDiscretization {
    pub fn new(params: BurgersParams) -> Result<Self> {
        let p = &params;
        if !(p.nu > 0.0 && p.beta >= 0.0 && p.alpha > 0.0 && p.horizon > 0.0) {
            return Err(Error::Config(
                "Burgers: nu, alpha, T must be positive, beta >= 0".into(),
            ));
        }
        let mesh = UniformMesh::new(p.n_dof)?;
        let omega_el = mesh.elements_in(p.omega[0], p.omega[1]);
        let obs_el = mesh.elements_in(p.observation[0], p.observation[1]);
        if omega_el.is_empty() || obs_el.is_empty() {
            return Err(Error::Config(
                "Burgers: omega and D must each contain at least one mesh element".into(),
            ));
        }
        let control_nodes = omega_el.start..=omega_el.end;
        let omega_mass_full = mesh.mass(omega_el);
        let control_mass = Tridiagonal {
            lower: omega_mass_full.lower[*control_nodes.start()..*control_nodes.end()].to_vec(),
            diag: omega_mass_full.diag[control_nodes.clone()].to_vec(),
            upper: omega_mass_full.upper[*control_nodes.start()..*control_nodes.end()].to_vec(),
        };
        Ok(Self {
            mass: interior_block(&mesh.mass(0..mesh.n_elements())),
            stiffness: interior_block(&mesh.stiffness()),
            observation_mass: interior_block(&mesh.mass(obs_el)),
            control_mass,
            omega_mass_full,
            control_nodes,
            mesh,
            params,
        })
    }

    pub fn n_interior(&self) -> usize {
        self.mesh.n_nodes() - 2
    }

    pub fn n_controls(&self) -> usize {
        self.control_nodes.clone().count()
    }

    /// Initial profile `10 (1 - e^{-(1-x)}) (e^{-(1-x)} - e^{-1})`.
    pub fn initial_profile(x: f64) -> f64 {
        let e = (-(1.0 - x)).exp();
        10.0 * (1.0 - e) * (e - (-1.0f64).exp())
    }

    /// Interior coefficients padded with the two boundary zeros.
    pub fn full_state(&self, y: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.mesh.n_nodes()];
        full[1..self.mesh.n_nodes() - 1].copy_from_slice(y);
        full
    }

    /// Control coefficients spread to all mesh nodes.
    pub fn full_control(&self, u: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.mesh.n_nodes()];
        full[self.control_nodes.clone()].copy_from_slice(u);
        full
    }
}

#[derive(Debug, Clone)]
pub struct Burgers {
    disc: BurgersDiscretization,
    y0: Vec<f64>,
    state_mass: Matrix,
    control_mass: Matrix,
    phi1: QuadraticFunctional,
}

pub fn make_burgers(disc: BurgersDiscretization) -> Result<ProblemSpec> {
    ProblemSpec::new(Burgers::new(disc))
}

impl Burgers {
    pub fn new(disc: BurgersDiscretization) -> Self {
        let y0 = (1..disc.mesh.n_nodes() - 1)
            .map(|i| BurgersDiscretization::initial_profile(disc.mesh.node(i)))
            .collect();
        Self {
            y0,
            state_mass: Matrix::Tridiagonal(disc.mass.clone()),
            control_mass: Matrix::Tridiagonal(disc.control_mass.clone()),
            phi1: QuadraticFunctional::quadratic(Matrix::Tridiagonal(disc.observation_mass.clone())),
            disc,
        }
    }

    pub fn discretization(&self) -> &BurgersDiscretization {
        &self.disc
    }

    fn energy(&self) -> ControlEnergy {
        ControlEnergy {
            alpha: self.disc.params.alpha,
        }
    }

    fn interior(&self, full: &[f64]) -> Vec<f64> {
        full[1..self.disc.mesh.n_nodes() - 1].to_vec()
    }
}

impl ControlProblem for Burgers {
    fn name(&self) -> &str {
        "burgers"
    }

    fn state_dim(&self) -> usize {
        self.disc.n_interior()
    }

    fn control_dim(&self) -> usize {
        self.disc.n_controls()
    }

    fn horizon(&self) -> f64 {
        self.disc.params.horizon
    }

    fn initial_state(&self) -> &[f64] {
        &self.y0
    }

    fn state_mass(&self) -> &Matrix {
        &self.state_mass
    }

    fn control_mass(&self) -> &Matrix {
        &self.control_mass
    }

    fn rhs(&self, y: &[f64], u: &[f64], out: &mut [f64]) {
        let d = &self.disc;
        let n = d.mesh.n_nodes();
        let yf = d.full_state(y);
        let mut conv = vec![0.0; n];
        d.mesh.convection(&yf, &mut conv);
        let mut load = vec![0.0; n];
        d.omega_mass_full.apply(&d.full_control(u), &mut load);
        let mut ay = vec![0.0; y.len()];
        d.stiffness.apply(y, &mut ay);
        for i in 0..y.len() {
            out[i] = -d.params.nu * ay[i] - d.params.beta * conv[i + 1] + load[i + 1];
        }
    }

    fn rhs_jacobian_y(&self, y: &[f64], _u: &[f64]) -> Matrix {
        let d = &self.disc;
        let cj = interior_block(&d.mesh.convection_jacobian(&d.full_state(y)));
        Matrix::Tridiagonal(d.stiffness.clone()).combine(-d.params.nu, &Matrix::Tridiagonal(cj), -d.params.beta)
    }

    fn rhs_jacobian_u_apply(&self, _y: &[f64], _u: &[f64], v: &[f64], out: &mut [f64]) {
        let d = &self.disc;
        let mut load = vec![0.0; d.mesh.n_nodes()];
        d.omega_mass_full.apply(&d.full_control(v), &mut load);
        out.copy_from_slice(&self.interior(&load));
    }

    fn rhs_jacobian_u_transpose_apply(&self, _y: &[f64], _u: &[f64], q: &[f64], out: &mut [f64]) {
        let d = &self.disc;
        let mut full = vec![0.0; d.mesh.n_nodes()];
        d.omega_mass_full.apply(&d.full_state(q), &mut full);
        out.copy_from_slice(&full[d.control_nodes.clone()]);
    }

    fn rhs_second_derivative(&self, _y: &[f64], u: &[f64], p: &[f64], z: &[f64], _v: &[f64]) -> SecondOrderPair {
        let d = &self.disc;
        let mut full = vec![0.0; d.mesh.n_nodes()];
        d.mesh
            .convection_second_derivative(&d.full_state(p), &d.full_state(z), &mut full);
        let ry = self.interior(&full).into_iter().map(|v| -d.params.beta * v).collect();
        (ry, vec![0.0; u.len()])
    }

    fn running_cost(&self, _y: &[f64], u: &[f64]) -> f64 {
        self.energy().value(&self.control_mass, u)
    }

    fn running_cost_gradient(&self, y: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0; y.len()], self.energy().gradient(&self.control_mass, u))
    }

    fn running_cost_hessian_apply(&self, y: &[f64], _u: &[f64], _z: &[f64], v: &[f64]) -> SecondOrderPair {
        (vec![0.0; y.len()], self.energy().hessian_apply(&self.control_mass, v))
    }

    fn intermediate_cost(&self) -> &dyn StateFunctional {
        &self.phi1
    }

    fn terminal_cost(&self) -> Option<&dyn StateFunctional> {
        None
    }
}
