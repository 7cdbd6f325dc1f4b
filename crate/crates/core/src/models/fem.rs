//! P1 finite elements on a uniform mesh of `[0, 1]`.

use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformMesh {
    n_nodes: usize,
}

impl UniformMesh {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < 3 {
            return Err(Error::Config(format!("mesh needs at least 3 nodes, got {n_nodes}")));
        }
        Ok(Self { n_nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_elements(&self) -> usize {
        self.n_nodes - 1
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n_elements() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n_elements() as f64
    }

    /// Elements `[x_e, x_{e+1}]` contained in `[lo, hi]` (up to round-off).
    pub fn elements_in(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let tol = 1e-9 * self.spacing();
        let first = (0..self.n_elements())
            .find(|&e| self.node(e) >= lo - tol)
            .unwrap_or(self.n_elements());
        let last = (0..self.n_elements())
            .rev()
            .find(|&e| self.node(e + 1) <= hi + tol)
            .map_or(first, |e| e + 1);
        first..last.max(first)
    }

    /// Consistent mass matrix over the given elements, all nodes.
    pub fn mass(&self, elements: std::ops::Range<usize>) -> Tridiagonal {
        let h = self.spacing();
        let mut m = Tridiagonal::zeros(self.n_nodes);
        for e in elements {
            m.add(e, e, h / 3.0);
            m.add(e + 1, e + 1, h / 3.0);
            m.add(e, e + 1, h / 6.0);
            m.add(e + 1, e, h / 6.0);
        }
        m
    }

    /// Stiffness matrix `int phi_i' phi_j'`, all nodes.
    pub fn stiffness(&self) -> Tridiagonal {
        let h = self.spacing();
        let mut a = Tridiagonal::zeros(self.n_nodes);
        for e in 0..self.n_elements() {
            a.add(e, e, 1.0 / h);
            a.add(e + 1, e + 1, 1.0 / h);
            a.add(e, e + 1, -1.0 / h);
            a.add(e + 1, e, -1.0 / h);
        }
        a
    }

    /// `C(y)_i = int y y_x phi_i`, exact for P1 `y`, all nodes.
    pub fn convection(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in 0..self.n_elements() {
            let (a, b) = (y[e], y[e + 1]);
            out[e] += (a * b + b * b - 2.0 * a * a) / 6.0;
            out[e + 1] += (2.0 * b * b - a * a - a * b) / 6.0;
        }
    }

    /// Jacobian of [`Self::convection`].
    pub fn convection_jacobian(&self, y: &[f64]) -> Tridiagonal {
        let mut j = Tridiagonal::zeros(self.n_nodes);
        for e in 0..self.n_elements() {
            let (a, b) = (y[e], y[e + 1]);
            j.add(e, e, (b - 4.0 * a) / 6.0);
            j.add(e, e + 1, (a + 2.0 * b) / 6.0);
            j.add(e + 1, e, (-2.0 * a - b) / 6.0);
            j.add(e + 1, e + 1, (4.0 * b - a) / 6.0);
        }
        j
    }

    /// Second derivative of `p . C(y)` applied to `z` (independent of `y`).
    pub fn convection_second_derivative(&self, p: &[f64], z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in 0..self.n_elements() {
            let (pa, pb) = (p[e], p[e + 1]);
            let (za, zb) = (z[e], z[e + 1]);
            // pa * [[-4, 1], [1, 2]] / 6 + pb * [[-2, -1], [-1, 4]] / 6
            let h11 = (-4.0 * pa - 2.0 * pb) / 6.0;
            let h12 = (pa - pb) / 6.0;
            let h22 = (2.0 * pa + 4.0 * pb) / 6.0;
            out[e] += h11 * za + h12 * zb;
            out[e + 1] += h12 * za + h22 * zb;
        }
    }
}

/// Restriction of an all-node tridiagonal matrix to the nodes `1..n-1`.
pub fn interior_block(full: &Tridiagonal) -> Tridiagonal {
    let n = full.dim();
    Tridiagonal {
        lower: full.lower[1..n - 2].to_vec(),
        diag: full.diag[1..n - 1].to_vec(),
        upper: full.upper[1..n - 2].to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_row_sums_equal_spacing() {
        let mesh = UniformMesh::new(11).unwrap();
        let m = mesh.mass(0..mesh.n_elements());
        let ones = vec![1.0; 11];
        let mut out = vec![0.0; 11];
        m.apply(&ones, &mut out);
        for v in &out[1..10] {
            assert!((v - 0.1).abs() < 1e-15);
        }
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let mesh = UniformMesh::new(11).unwrap();
        let mut out = vec![0.0; 11];
        mesh.stiffness().apply(&[2.5; 11], &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn element_ranges() {
        let mesh = UniformMesh::new(101).unwrap();
        assert_eq!(mesh.elements_in(0.0, 0.25), 0..25);
        assert_eq!(mesh.elements_in(0.25, 0.30), 25..30);
    }

    #[test]
    fn convection_is_skew_in_total() {
        let mesh = UniformMesh::new(21).unwrap();
        let y: Vec<f64> = (0..21)
            .map(|i| {
                let x = mesh.node(i);
                (3.0 * x).sin() * x * (1.0 - x) + if i == 0 || i == 20 { 0.0 } else { 0.1 }
            })
            .collect();
        let mut c = vec![0.0; 21];
        let mut y0 = y.clone();
        y0[0] = 0.0;
        y0[20] = 0.0;
        mesh.convection(&y0, &mut c);
        assert!(c.iter().sum::<f64>().abs() < 1e-14);
        // y . C(y) = int y^2 y_x = 0 as well.
        let yc: f64 = y0.iter().zip(&c).map(|(a, b)| a * b).sum();
        assert!(yc.abs() < 1e-14);
    }

    #[test]
    fn convection_vanishes_on_constant_patch() {
        let mesh = UniformMesh::new(11).unwrap();
        let mut y = vec![0.0; 11];
        for v in &mut y[3..8] {
            *v = 1.7;
        }
        let mut c = vec![0.0; 11];
        mesh.convection(&y, &mut c);
        for v in &c[4..7] {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn convection_derivatives_match_differences() {
        let mesh = UniformMesh::new(9).unwrap();
        let y: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).cos()).collect();
        let z: Vec<f64> = (0..9).map(|i| (i as f64 * 1.3).sin()).collect();
        let p: Vec<f64> = (0..9).map(|i| 0.2 * i as f64 - 0.5).collect();
        let eps = 1e-6;
        let plus: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + eps * b).collect();
        let minus: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - eps * b).collect();
        let (mut cp, mut cm) = (vec![0.0; 9], vec![0.0; 9]);
        mesh.convection(&plus, &mut cp);
        mesh.convection(&minus, &mut cm);
        let mut jz = vec![0.0; 9];
        mesh.convection_jacobian(&y).apply(&z, &mut jz);
        for i in 0..9 {
            assert!(((cp[i] - cm[i]) / (2.0 * eps) - jz[i]).abs() < 1e-9);
        }
        // d/dy (J(y)^T p) . z versus the second-derivative action.
        let jt = |y: &[f64]| {
            let mut o = vec![0.0; 9];
            mesh.convection_jacobian(y).transpose().apply(&p, &mut o);
            o
        };
        let (a, b) = (jt(&plus), jt(&minus));
        let mut h = vec![0.0; 9];
        mesh.convection_second_derivative(&p, &z, &mut h);
        for i in 0..9 {
            assert!(((a[i] - b[i]) / (2.0 * eps) - h[i]).abs() < 1e-9);
        }
    }
}
