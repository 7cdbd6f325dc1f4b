//! The reduced problem seen by the optimiser: a flat vector `x = (u, tau)` on
//! a weighted inner-product space.

use crate::error::{Error, Result};
use crate::grid_values::ControlGrid;
use crate::problem::ProblemSpec;
use crate::reduced::{ReducedPoint, ReducedVector};
use crate::time_transform::{SGrid, TauParameter};

/// Smooth objective to be maximised, with Hessian actions at the last
/// evaluated point.
pub trait ReducedObjective {
    fn dim(&self) -> usize;
    fn inner(&self, a: &[f64], b: &[f64]) -> f64;
    /// Objective value and Riesz gradient; the point becomes the current one.
    fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
    /// Hessian applied to `v` at the current point.
    fn hvp(&mut self, v: &[f64]) -> Result<Vec<f64>>;
    /// Projects `x` onto the admissible set; returns whether it moved.
    fn clamp(&self, x: &mut [f64]) -> bool {
        let _ = x;
        false
    }
    /// First gradient step length, before any curvature information.
    fn initial_step(&self, g: &[f64]) -> f64 {
        1.0 / self.inner(g, g).sqrt()
    }
    /// Free-time component of `x`, if any; reported in the history.
    fn tau_of(&self, x: &[f64]) -> f64 {
        let _ = x;
        f64::NAN
    }
}

/// `J(u, tau)` over the control grid and the free time.
pub struct FreeTimeObjective<'a> {
    problem: &'a ProblemSpec,
    grid: SGrid,
    tau_min_fraction: f64,
    /// Largest initial change of `tau`, as a fraction of `T`.
    first_tau_step_fraction: f64,
    point: Option<ReducedPoint>,
    pub evaluations: usize,
    pub hvp_count: usize,
}

impl<'a> FreeTimeObjective<'a> {
    pub fn new(problem: &'a ProblemSpec, grid: SGrid, tau_min_fraction: f64) -> Self {
        Self {
            problem,
            grid,
            tau_min_fraction,
            first_tau_step_fraction: 0.05,
            point: None,
            evaluations: 0,
            hvp_count: 0,
        }
    }

    pub fn problem(&self) -> &ProblemSpec {
        self.problem
    }

    pub fn grid(&self) -> SGrid {
        self.grid
    }

    pub fn pack(&self, u: &ControlGrid, tau: f64) -> Vec<f64> {
        let mut x = u.as_slice().to_vec();
        x.push(tau);
        x
    }

    pub fn unpack(&self, x: &[f64]) -> Result<ReducedVector> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                what: "reduced vector",
                expected: self.dim(),
                got: x.len(),
            });
        }
        let (u, tau) = x.split_at(x.len() - 1);
        Ok(ReducedVector {
            u: ControlGrid::from_vec(self.grid, self.problem.control_dim(), u.to_vec())?,
            tau: tau[0],
        })
    }

    fn flatten(v: &ReducedVector) -> Vec<f64> {
        let mut x = v.u.as_slice().to_vec();
        x.push(v.tau);
        x
    }

    pub fn current(&self) -> Option<&ReducedPoint> {
        self.point.as_ref()
    }

    pub fn into_point(self) -> Option<ReducedPoint> {
        self.point
    }
}

impl ReducedObjective for FreeTimeObjective<'_> {
    fn dim(&self) -> usize {
        self.grid.n_nodes() * self.problem.control_dim() + 1
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let m = self.problem.control_dim();
        let mc = self.problem.model().control_mass();
        let mut tmp = vec![0.0; m];
        let mut sum = 0.0;
        for i in 0..self.grid.n_nodes() {
            let (ai, bi) = (&a[i * m..(i + 1) * m], &b[i * m..(i + 1) * m]);
            mc.apply(bi, &mut tmp);
            sum += self.grid.trapezoid_weight(i) * crate::linalg::dot(ai, &tmp);
        }
        sum + a[a.len() - 1] * b[b.len() - 1]
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let v = self.unpack(x)?;
        let tp = TauParameter::new(v.tau, self.problem.horizon())?;
        self.point = None;
        let pt = ReducedPoint::evaluate(self.problem, v.u, tp)?;
        self.evaluations += 1;
        let out = (pt.objective, Self::flatten(&pt.gradient));
        self.point = Some(pt);
        Ok(out)
    }

    fn hvp(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        let d = self.unpack(v)?;
        let pt = self
            .point
            .as_ref()
            .ok_or_else(|| Error::Domain("hessian-vector product before any evaluation".into()))?;
        self.hvp_count += 1;
        Ok(Self::flatten(&pt.hvp(self.problem, &d.u, d.tau)?))
    }

    fn clamp(&self, x: &mut [f64]) -> bool {
        let last = x.len() - 1;
        let t = self.problem.horizon();
        let lo = self.tau_min_fraction * t;
        let clamped = x[last].clamp(lo, t - lo);
        // NaN falls through unchanged and is rejected at evaluation.
        let moved = clamped != x[last] && !x[last].is_nan();
        if !x[last].is_nan() {
            x[last] = clamped;
        }
        moved
    }

    fn initial_step(&self, g: &[f64]) -> f64 {
        let sigma = 1.0 / self.inner(g, g).sqrt();
        let g_tau = g[g.len() - 1].abs();
        let cap = self.first_tau_step_fraction * self.problem.horizon();
        if g_tau * sigma > cap {
            cap / g_tau
        } else {
            sigma
        }
    }

    fn tau_of(&self, x: &[f64]) -> f64 {
        x[x.len() - 1]
    }
}
