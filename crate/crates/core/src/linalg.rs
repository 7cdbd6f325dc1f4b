//! Small dense/tridiagonal matrix support for the time-stepping systems.
//!
//! ODE models work with tiny dense matrices; the P1 finite-element model has
//! tridiagonal mass, stiffness and convection Jacobians. Both shapes share one
//! enum so the integrators stay agnostic.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Square tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// Sub-diagonal, `lower[i]` sits at `(i + 1, i)`.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// Super-diagonal, `upper[i]` sits at `(i, i + 1)`.
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Adds `v` at `(i, j)`; `|i - j| <= 1` is required.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.diag[i] += v;
        } else if i == j + 1 {
            self.lower[j] += v;
        } else if j == i + 1 {
            self.upper[i] += v;
        } else {
            panic!("entry ({i}, {j}) outside the tridiagonal band");
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.lower[j]
        } else if j == i + 1 {
            self.upper[i]
        } else {
            0.0
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            lower: self.upper.clone(),
            diag: self.diag.clone(),
            upper: self.lower.clone(),
        }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Thomas factorisation without pivoting. The time-stepping matrices are
    /// mass-dominated, so pivoting is not needed; a vanishing pivot is reported.
    pub fn factor(&self) -> Result<TridiagonalLu> {
        let n = self.dim();
        let mut c = vec![0.0; n.saturating_sub(1)];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0];
        if n > 0 {
            check_pivot(piv, self)?;
            d[0] = piv;
        }
        for i in 1..n {
            c[i - 1] = self.upper[i - 1] / piv;
            piv = self.diag[i] - self.lower[i - 1] * c[i - 1];
            check_pivot(piv, self)?;
            d[i] = piv;
        }
        Ok(TridiagonalLu {
            lower: self.lower.clone(),
            pivots: d,
            upper_scaled: c,
        })
    }
}

fn check_pivot(piv: f64, m: &Tridiagonal) -> Result<()> {
    let scale = m.diag.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !piv.is_finite() || piv.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::LinearSolve {
            step: 0,
            reason: "vanishing pivot in tridiagonal factorisation".into(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    pivots: Vec<f64>,
    upper_scaled: Vec<f64>,
}

impl TridiagonalLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.pivots.len();
        if n == 0 {
            return;
        }
        b[0] /= self.pivots[0];
        for i in 1..n {
            b[i] = (b[i] - self.lower[i - 1] * b[i - 1]) / self.pivots[i];
        }
        for i in (0..n - 1).rev() {
            b[i] -= self.upper_scaled[i] * b[i + 1];
        }
    }
}

/// Square matrix acting on state or control coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Identity(usize),
    Dense(DMatrix<f64>),
    Tridiagonal(Tridiagonal),
}

impl Matrix {
    pub fn dim(&self) -> usize {
        match self {
            Matrix::Identity(n) => *n,
            Matrix::Dense(m) => m.nrows(),
            Matrix::Tridiagonal(t) => t.dim(),
        }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Matrix::Identity(_) => out.copy_from_slice(x),
            Matrix::Dense(m) => {
                let n = m.nrows();
                for i in 0..n {
                    let mut s = 0.0;
                    for j in 0..m.ncols() {
                        s += m[(i, j)] * x[j];
                    }
                    out[i] = s;
                }
            }
            Matrix::Tridiagonal(t) => t.apply(x, out),
        }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply(x, &mut out);
        out
    }

    pub fn transpose(&self) -> Matrix {
        match self {
            Matrix::Identity(n) => Matrix::Identity(*n),
            Matrix::Dense(m) => Matrix::Dense(m.transpose()),
            Matrix::Tridiagonal(t) => Matrix::Tridiagonal(t.transpose()),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Matrix::Identity(_) => {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            }
            Matrix::Dense(m) => m[(i, j)],
            Matrix::Tridiagonal(t) => t.get(i, j),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// `alpha * self + beta * other`, keeping the sparsest common shape.
    pub fn combine(&self, alpha: f64, other: &Matrix, beta: f64) -> Matrix {
        use Matrix::*;
        match (self, other) {
            (Tridiagonal(a), Tridiagonal(b)) => Tridiagonal(tri_combine(a, alpha, b, beta)),
            (Tridiagonal(a), Identity(n)) => Tridiagonal(tri_combine(a, alpha, &tri_identity(*n), beta)),
            (Identity(n), Tridiagonal(b)) => Tridiagonal(tri_combine(&tri_identity(*n), alpha, b, beta)),
            _ => Dense(self.to_dense() * alpha + other.to_dense() * beta),
        }
    }

    pub fn factor(&self) -> Result<Factorization> {
        match self {
            Matrix::Identity(_) => Ok(Factorization::Identity),
            Matrix::Dense(m) => {
                let lu = m.clone().lu();
                if !lu.is_invertible() {
                    return Err(Error::LinearSolve {
                        step: 0,
                        reason: "singular dense matrix".into(),
                    });
                }
                Ok(Factorization::Dense(lu))
            }
            Matrix::Tridiagonal(t) => Ok(Factorization::Tridiagonal(t.factor()?)),
        }
    }

    /// Checks symmetry and positive definiteness with a Cholesky factorisation.
    pub fn check_spd(&self, what: &'static str) -> Result<()> {
        if let Matrix::Identity(_) = self {
            return Ok(());
        }
        let dense = self.to_dense();
        let scale = dense.amax().max(f64::MIN_POSITIVE);
        if (&dense - dense.transpose()).amax() > 1e-12 * scale {
            return Err(Error::NotPositiveDefinite(what));
        }
        if dense.cholesky().is_none() {
            return Err(Error::NotPositiveDefinite(what));
        }
        Ok(())
    }
}

fn tri_identity(n: usize) -> Tridiagonal {
    let mut t = Tridiagonal::zeros(n);
    t.diag.iter_mut().for_each(|d| *d = 1.0);
    t
}

fn tri_combine(a: &Tridiagonal, alpha: f64, b: &Tridiagonal, beta: f64) -> Tridiagonal {
    let zip = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| alpha * p + beta * q).collect() };
    Tridiagonal {
        lower: zip(&a.lower, &b.lower),
        diag: zip(&a.diag, &b.diag),
        upper: zip(&a.upper, &b.upper),
    }
}

#[derive(Debug, Clone)]
pub enum Factorization {
    Identity,
    Dense(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
    Tridiagonal(TridiagonalLu),
}

impl Factorization {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        match self {
            Factorization::Identity => {}
            Factorization::Dense(lu) => {
                let mut v = DVector::from_column_slice(b);
                // Invertibility was checked at factorisation time.
                lu.solve_mut(&mut v);
                b.copy_from_slice(v.as_slice());
            }
            Factorization::Tridiagonal(t) => t.solve_in_place(b),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
