//! Numerical oracles for the derivative machinery: finite differences of the
//! discrete objective, Hessian symmetry, discrete duality of `K` and `K*`,
//! Taylor-remainder slopes and grid convergence.
//!
//! Adjoint-based quantities discretise the continuous optimality system, so
//! they agree with differences of the discrete objective only up to
//! `O(h^2)`. The random data used here is therefore smooth in `s`: a handful
//! of low-frequency modes with seeded coefficients.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adjoint::k_star_apply_with;
use crate::error::Result;
use crate::forward::{evaluate_objective, forward_solve};
use crate::grid_values::{ControlGrid, NodeValues, SplitValues, Trajectory};
use crate::linalg::dot;
use crate::linearization::Linearization;
use crate::problem::ProblemSpec;
use crate::reduced::{ReducedPoint, ReducedVector};
use crate::sensitivity::{k_apply_with, tangent_u};
use crate::time_transform::{SGrid, TauParameter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// How `measured` is compared against `tolerance`.
    pub comparison: Comparison,
    pub metadata: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// Passes when `measured <= tolerance`.
    AtMost,
    /// Passes when `measured >= tolerance`.
    AtLeast,
    /// Passes when `measured` lies in `[tolerance, upper]`; `upper` is stored
    /// in the metadata.
    Within,
}

impl CheckReport {
    pub fn at_most(id: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self::new(id, measured, tolerance, Comparison::AtMost, measured <= tolerance)
    }

    pub fn at_least(id: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self::new(id, measured, tolerance, Comparison::AtLeast, measured >= tolerance)
    }

    pub fn within(id: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        let mut r = Self::new(id, measured, lo, Comparison::Within, (lo..=hi).contains(&measured));
        r.metadata.insert("upper".into(), hi);
        r
    }

    fn new(id: impl Into<String>, measured: f64, tolerance: f64, comparison: Comparison, passed: bool) -> Self {
        Self {
            id: id.into(),
            measured,
            tolerance,
            passed: passed && !measured.is_nan(),
            comparison,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.metadata.insert(key.into(), value);
        self
    }
}

/// Seeded smooth function of `s` on `[0, 2]`, vector-valued.
#[derive(Debug, Clone)]
pub struct SmoothField {
    /// Per component: cosine and sine coefficients of modes `0..M`.
    coeffs: Vec<Vec<(f64, f64)>>,
}

impl SmoothField {
    pub const MODES: usize = 4;

    /// Coefficients are normalised so that `|f_c(s)| <= amplitude`.
    pub fn random(rng: &mut impl Rng, dim: usize, amplitude: f64) -> Self {
        let coeffs = (0..dim)
            .map(|_| {
                let raw: Vec<(f64, f64)> = (0..Self::MODES)
                    .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let total: f64 = raw.iter().map(|(a, b)| a.abs() + b.abs()).sum();
                raw.into_iter()
                    .map(|(a, b)| (amplitude * a / total, amplitude * b / total))
                    .collect()
            })
            .collect();
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, s: f64, c: usize) -> f64 {
        self.coeffs[c]
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let w = 0.5 * std::f64::consts::PI * k as f64 * s;
                a * w.cos() + b * w.sin()
            })
            .sum()
    }

    pub fn on_grid(&self, grid: SGrid) -> NodeValues {
        NodeValues::from_fn(grid, self.dim(), |_, s, c| self.eval(s, c))
    }

    pub fn on_split_grid(&self, grid: SGrid) -> SplitValues {
        SplitValues::from_fn(grid, self.dim(), |i, _, c| self.eval(grid.node(i), c))
    }

    pub fn at(&self, s: f64) -> Vec<f64> {
        (0..self.dim()).map(|c| self.eval(s, c)).collect()
    }
}

/// Random smooth direction in the reduced space, with a `tau` component of
/// unit size.
pub fn random_direction(rng: &mut impl Rng, grid: SGrid, m: usize) -> ReducedVector {
    ReducedVector {
        u: SmoothField::random(rng, m, 1.0).on_grid(grid),
        tau: rng.random_range(-1.0..1.0),
    }
}

fn perturbed(u: &ControlGrid, tau: f64, d: &ReducedVector, eps: f64) -> (ControlGrid, f64) {
    let mut out = u.clone();
    out.as_mut_slice()
        .iter_mut()
        .zip(d.u.as_slice())
        .for_each(|(a, b)| *a += eps * b);
    (out, tau + eps * d.tau)
}

fn objective_at(problem: &ProblemSpec, u: &ControlGrid, tau: f64) -> Result<f64> {
    let tp = TauParameter::new(tau, problem.horizon())?;
    let y = forward_solve(problem, u, tp)?;
    Ok(evaluate_objective(problem, u, tp, &y))
}

fn relative(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Reduced gradient against central differences of the discrete objective
/// along `n_dirs` random smooth directions and the pure `tau` direction.
/// Measures the worst relative error.
pub fn fd_gradient_check(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    eps: f64,
    n_dirs: usize,
    seed: u64,
    tolerance: f64,
) -> Result<CheckReport> {
    let grid = u.grid();
    let pt = ReducedPoint::evaluate(problem, u.clone(), tp)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs: Vec<ReducedVector> = (0..n_dirs)
        .map(|_| random_direction(&mut rng, grid, problem.control_dim()))
        .collect();
    let mut tau_dir = ReducedVector::zeros(grid, problem.control_dim());
    tau_dir.tau = 1.0;
    dirs.push(tau_dir);
    let mut worst: f64 = 0.0;
    for d in &dirs {
        let (up, tpp) = perturbed(u, tp.tau(), d, eps);
        let (um, tpm) = perturbed(u, tp.tau(), d, -eps);
        let fd = (objective_at(problem, &up, tpp)? - objective_at(problem, &um, tpm)?) / (2.0 * eps);
        let an = pt.gradient.inner(d, problem);
        worst = worst.max(relative(fd, an, 1e-12));
    }
    Ok(CheckReport::at_most("fd-gradient", worst, tolerance)
        .with("n_steps", grid.n_steps() as f64)
        .with("eps", eps)
        .with("seed", seed as f64)
        .with("directions", dirs.len() as f64))
}

/// Hessian-vector products against central differences of the reduced
/// gradient, relative error in the weighted norm.
pub fn fd_hvp_check(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    eps: f64,
    n_dirs: usize,
    seed: u64,
    tolerance: f64,
) -> Result<CheckReport> {
    let grid = u.grid();
    let pt = ReducedPoint::evaluate(problem, u.clone(), tp)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_dirs {
        let d = random_direction(&mut rng, grid, problem.control_dim());
        let hv = pt.hvp(problem, &d.u, d.tau)?;
        let (up, tpp) = perturbed(u, tp.tau(), &d, eps);
        let (um, tpm) = perturbed(u, tp.tau(), &d, -eps);
        let gp = ReducedPoint::evaluate(problem, up, TauParameter::new(tpp, problem.horizon())?)?.gradient;
        let gm = ReducedPoint::evaluate(problem, um, TauParameter::new(tpm, problem.horizon())?)?.gradient;
        let mut diff = gp;
        diff.axpy(-1.0, &gm);
        diff.scale(1.0 / (2.0 * eps));
        diff.axpy(-1.0, &hv);
        let err = diff.inner(&diff, problem).sqrt() / hv.inner(&hv, problem).sqrt().max(1e-300);
        worst = worst.max(err);
    }
    Ok(CheckReport::at_most("fd-hvp", worst, tolerance)
        .with("n_steps", grid.n_steps() as f64)
        .with("eps", eps)
        .with("seed", seed as f64))
}

/// `|<d1, H d2> - <d2, H d1>| / max(|<d1, H d2>|, |<d2, H d1>|)`, worst over
/// `n_pairs` random pairs.
pub fn hvp_symmetry_check(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    n_pairs: usize,
    seed: u64,
    tolerance: f64,
) -> Result<CheckReport> {
    let grid = u.grid();
    let pt = ReducedPoint::evaluate(problem, u.clone(), tp)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_pairs {
        let d1 = random_direction(&mut rng, grid, problem.control_dim());
        let d2 = random_direction(&mut rng, grid, problem.control_dim());
        let h1 = pt.hvp(problem, &d1.u, d1.tau)?;
        let h2 = pt.hvp(problem, &d2.u, d2.tau)?;
        worst = worst.max(relative(d1.inner(&h2, problem), d2.inner(&h1, problem), 1e-300));
    }
    Ok(CheckReport::at_most("hvp-symmetry", worst, tolerance)
        .with("n_steps", grid.n_steps() as f64)
        .with("seed", seed as f64))
}

/// Both sides of the duality identity
/// `<(a, b, w), K xi> = <K*(a, b, w), xi>` on discrete inner products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityPair {
    pub primal: f64,
    pub dual: f64,
}

impl DualityPair {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.primal.abs().max(self.dual.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.primal - self.dual).abs() / scale
        }
    }
}

/// Evaluates both sides for the given data (state coordinates).
pub fn duality_pair(
    problem: &ProblemSpec,
    lin: &Linearization,
    xi: &SplitValues,
    a: &[f64],
    b: &[f64],
    w: &SplitValues,
) -> Result<DualityPair> {
    let grid = lin.grid();
    let z = k_apply_with(problem, lin, xi)?;
    let q = k_star_apply_with(problem, lin, a, b, w)?;
    let primal = problem.state_inner(a, z.node(grid.mid()))
        + problem.state_inner(b, z.node(grid.n_steps()))
        + grid.split_trapezoid(|i, side| problem.state_inner(w.at(i, side), z.node(i)));
    let dual = grid.split_trapezoid(|i, side| problem.state_inner(q.at(i, side), xi.at(i, side)));
    Ok(DualityPair { primal, dual })
}

/// Control evaluated on a grid from a function of `(s, component)`.
pub type ControlFn<'a> = &'a dyn Fn(f64, usize) -> f64;

/// Duality gap for the same smooth random data on each grid in `n_steps`,
/// and the observed reduction factors between consecutive grids.
pub fn duality_gaps(
    problem: &ProblemSpec,
    tp: TauParameter,
    control: ControlFn<'_>,
    n_steps: &[usize],
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.state_dim();
    let xi_f = SmoothField::random(&mut rng, n, 1.0);
    let w_f = SmoothField::random(&mut rng, n, 1.0);
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    n_steps
        .iter()
        .map(|&ns| {
            let grid = SGrid::new(ns)?;
            let u = NodeValues::from_fn(grid, problem.control_dim(), |_, s, c| control(s, c));
            let y = forward_solve(problem, &u, tp)?;
            let lin = Linearization::new(problem, &u, tp, &y)?;
            let pair = duality_pair(
                problem,
                &lin,
                &xi_f.on_split_grid(grid),
                &a,
                &b,
                &w_f.on_split_grid(grid),
            )?;
            Ok(pair.relative_gap())
        })
        .collect()
}

/// Passes when every reduction factor of the duality gap per doubling lies
/// in `[lo, hi]`. The measured value is the factor furthest from 4.
pub fn duality_check(
    problem: &ProblemSpec,
    tp: TauParameter,
    control: ControlFn<'_>,
    n_steps: &[usize],
    seed: u64,
    (lo, hi): (f64, f64),
) -> Result<CheckReport> {
    let gaps = duality_gaps(problem, tp, control, n_steps, seed)?;
    let ratios: Vec<f64> = gaps.windows(2).map(|p| p[0] / p[1]).collect();
    let worst = ratios
        .iter()
        .copied()
        .max_by(|x, y| (x - 4.0).abs().total_cmp(&(y - 4.0).abs()))
        .unwrap_or(f64::NAN);
    let mut r = CheckReport::within("duality-order", worst, lo, hi).with("seed", seed as f64);
    for (ns, g) in n_steps.iter().zip(&gaps) {
        r = r.with(&format!("gap_n{ns}"), *g);
    }
    r.passed &= ratios.iter().all(|x| (lo..=hi).contains(x));
    Ok(r)
}

/// Least-squares slope of `log r(eps)` against `log eps`, ignoring samples
/// at or below `floor`.
pub fn fitted_slope(eps: &[f64], remainders: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(remainders)
        .filter(|(_, r)| **r > floor)
        .map(|(e, r)| (e.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Default step sizes of the Taylor tests.
pub const TAYLOR_EPS: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

/// Slope of a remainder function; passes when the slope is at least
/// `min_slope` or every sample is at the round-off floor.
pub fn taylor_slope_check(
    id: &str,
    mut remainder: impl FnMut(f64) -> Result<f64>,
    eps: &[f64],
    min_slope: f64,
    floor: f64,
) -> Result<CheckReport> {
    let r: Vec<f64> = eps.iter().map(|&e| remainder(e)).collect::<Result<_>>()?;
    let mut report = match fitted_slope(eps, &r, floor) {
        Some(slope) => CheckReport::at_least(id, slope, min_slope),
        None => CheckReport::at_least(id, f64::INFINITY, min_slope).with("at_floor", 1.0),
    };
    for (e, v) in eps.iter().zip(&r) {
        report = report.with(&format!("r_{e:e}"), *v);
    }
    Ok(report)
}

fn trajectory_distance(problem: &ProblemSpec, a: &Trajectory, b: &Trajectory) -> f64 {
    let grid = a.grid();
    grid.split_trapezoid(|i, _| {
        let d: Vec<f64> = a.node(i).iter().zip(b.node(i)).map(|(x, y)| x - y).collect();
        problem.state_inner(&d, &d)
    })
    .sqrt()
}

/// First-order remainder `||S(u + eps v) - S(u) - eps S_u v||` of the
/// control-to-state map.
pub fn state_taylor_check(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    v: &ControlGrid,
    eps: &[f64],
) -> Result<CheckReport> {
    let y = forward_solve(problem, u, tp)?;
    let z = tangent_u(problem, u, tp, &y, v)?;
    let mut lin_pred = y.clone();
    taylor_slope_check(
        "taylor-state",
        |e| {
            let mut up = u.clone();
            up.as_mut_slice()
                .iter_mut()
                .zip(v.as_slice())
                .for_each(|(a, b)| *a += e * b);
            let yp = forward_solve(problem, &up, tp)?;
            lin_pred
                .as_mut_slice()
                .iter_mut()
                .zip(y.as_slice().iter().zip(z.as_slice()))
                .for_each(|(p, (y0, z0))| *p = y0 + e * z0);
            Ok(trajectory_distance(problem, &yp, &lin_pred))
        },
        eps,
        1.9,
        1e-13,
    )
}

/// Remainders of `J` along `d` with the gradient (order 2) and with the
/// gradient plus half the Hessian (order 3) subtracted.
pub fn objective_taylor_checks(
    problem: &ProblemSpec,
    u: &ControlGrid,
    tp: TauParameter,
    d: &ReducedVector,
    eps: &[f64],
) -> Result<(CheckReport, CheckReport)> {
    let pt = ReducedPoint::evaluate(problem, u.clone(), tp)?;
    let j0 = pt.objective;
    let dj = pt.gradient.inner(d, problem);
    let hd = pt.hvp(problem, &d.u, d.tau)?;
    let d2j = d.inner(&hd, problem);
    let floor = 1e-13 * j0.abs().max(1.0);
    let values: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let (up, t) = perturbed(u, tp.tau(), d, e);
            objective_at(problem, &up, t)
        })
        .collect::<Result<_>>()?;
    let mut it = values.iter();
    let first = taylor_slope_check(
        "taylor-objective-1",
        |e| Ok((it.next().unwrap() - j0 - e * dj).abs()),
        eps,
        1.9,
        floor,
    )?;
    let mut it = values.iter();
    let second = taylor_slope_check(
        "taylor-objective-2",
        |e| Ok((it.next().unwrap() - j0 - e * dj - 0.5 * e * e * d2j).abs()),
        eps,
        2.9,
        floor,
    )?;
    Ok((first, second))
}

/// Euclidean error of the terminal state against a reference value, one
/// entry per grid.
pub fn forward_convergence(
    problem: &ProblemSpec,
    tp: TauParameter,
    control: ControlFn<'_>,
    n_steps: &[usize],
    exact_terminal: &[f64],
) -> Result<Vec<f64>> {
    n_steps
        .iter()
        .map(|&ns| {
            let grid = SGrid::new(ns)?;
            let u = NodeValues::from_fn(grid, problem.control_dim(), |_, s, c| control(s, c));
            let y = forward_solve(problem, &u, tp)?;
            let e: Vec<f64> = y.node(ns).iter().zip(exact_terminal).map(|(a, b)| a - b).collect();
            Ok(dot(&e, &e).sqrt())
        })
        .collect()
}

/// Reduction factors `e_k / e_{k+1}` of a sequence of errors.
pub fn reduction_factors(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|p| p[0] / p[1]).collect()
}

/// Constant `C` of the `C / N^2` allowance on the finite-difference gradient
/// check.
pub const GRADIENT_TOL_C: f64 = 200.0;
/// Constant `C` of the `C / N^2` allowance on the Hessian symmetry check.
pub const SYMMETRY_TOL_C: f64 = 2000.0;
pub const HVP_FD_TOL: f64 = 1e-3;
pub const FD_EPS: f64 = 1e-5;

/// `C / N^2 + floor`.
pub fn grid_tolerance(c: f64, n_steps: usize, floor: f64) -> f64 {
    c / (n_steps as f64).powi(2) + floor
}

/// The checks run by the `verify` command: derivative checks at a smooth
/// random point with `tau = 0.4 T`, the duality order on three grids ending
/// at `n_steps`, and the tangent Taylor slope.
pub fn verification_suite(problem: &ProblemSpec, n_steps: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let grid = SGrid::new(n_steps)?;
    let tp = TauParameter::new(0.4 * problem.horizon(), problem.horizon())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = SmoothField::random(&mut rng, problem.control_dim(), 0.1);
    let u = field.on_grid(grid);
    let v = SmoothField::random(&mut rng, problem.control_dim(), 1.0).on_grid(grid);

    let mut reports = vec![
        fd_gradient_check(
            problem,
            &u,
            tp,
            FD_EPS,
            4,
            seed,
            grid_tolerance(GRADIENT_TOL_C, n_steps, 1e-6),
        )?,
        fd_hvp_check(problem, &u, tp, FD_EPS, 4, seed, HVP_FD_TOL)?,
        hvp_symmetry_check(problem, &u, tp, 4, seed, grid_tolerance(SYMMETRY_TOL_C, n_steps, 1e-8))?,
    ];
    let base = (n_steps / 8).max(25) * 2;
    let control = |s: f64, c: usize| field.eval(s, c);
    reports.push(duality_check(
        problem,
        tp,
        &control,
        &[base, 2 * base, 4 * base],
        seed,
        (3.5, 4.5),
    )?);
    reports.push(state_taylor_check(problem, &u, tp, &v, &TAYLOR_EPS)?);
    Ok(reports)
}
