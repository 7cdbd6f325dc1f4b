//! Unrestarted GMRES in a general inner product (modified Gram-Schmidt
//! Arnoldi with Givens rotations).

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final residual norm relative to `||b||`.
    pub relative_residual: f64,
    pub converged: bool,
}

/// A linear operator on an inner-product space.
pub trait KrylovSpace {
    fn apply(&mut self, v: &[f64]) -> Result<Vec<f64>>;
    fn inner(&self, a: &[f64], b: &[f64]) -> f64;
}

/// Operator and inner product given as closures.
pub struct FnSpace<A, I> {
    pub apply: A,
    pub inner: I,
}

impl<A, I> KrylovSpace for FnSpace<A, I>
where
    A: FnMut(&[f64]) -> Result<Vec<f64>>,
    I: Fn(&[f64], &[f64]) -> f64,
{
    fn apply(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        (self.apply)(v)
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        (self.inner)(a, b)
    }
}

/// Solves `A x = b` from `x = 0`.
pub fn gmres<S: KrylovSpace + ?Sized>(
    space: &mut S,
    b: &[f64],
    rel_tol: f64,
    max_iters: usize,
) -> Result<GmresOutcome> {
    let n = b.len();
    let beta = space.inner(b, b).sqrt();
    if beta == 0.0 {
        return Ok(GmresOutcome {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        });
    }
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|v| v / beta).collect()];
    // Column j of the Hessenberg matrix, already rotated.
    let mut hess: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<(f64, f64)> = Vec::new();
    let mut rhs = vec![beta];
    let mut residual = beta;
    let mut iterations = 0;

    while iterations < max_iters && residual > rel_tol * beta {
        let j = iterations;
        let mut w = space.apply(&basis[j])?;
        let mut col = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = space.inner(&w, v);
            col[i] = hij;
            w.iter_mut().zip(v).for_each(|(a, b)| *a -= hij * b);
        }
        let wn = space.inner(&w, &w).sqrt();
        col[j + 1] = wn;
        for (i, &(c, s)) in cs.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s * a + c * b;
        }
        let (a, b) = (col[j], col[j + 1]);
        let r = a.hypot(b);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (a / r, b / r) };
        col[j] = r;
        col[j + 1] = 0.0;
        cs.push((c, s));
        rhs.push(-s * rhs[j]);
        rhs[j] *= c;
        residual = rhs[j + 1].abs();
        hess.push(col);
        iterations += 1;
        if wn <= 1e-14 * beta || !wn.is_finite() {
            // Lucky breakdown: the Krylov space is invariant.
            break;
        }
        basis.push(w.iter().map(|v| v / wn).collect());
    }

    // Back substitution on the triangular system.
    let k = iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = rhs[i];
        for (jj, yj) in y.iter().enumerate().skip(i + 1) {
            s -= hess[jj][i] * yj;
        }
        y[i] = if hess[i][i] != 0.0 { s / hess[i][i] } else { 0.0 };
    }
    let mut x = vec![0.0; n];
    for (yi, v) in y.iter().zip(&basis) {
        x.iter_mut().zip(v).for_each(|(a, b)| *a += yi * b);
    }
    let relative_residual = residual / beta;
    Ok(GmresOutcome {
        converged: relative_residual <= rel_tol && x.iter().all(|v| v.is_finite()),
        x,
        iterations,
        relative_residual,
    })
}
