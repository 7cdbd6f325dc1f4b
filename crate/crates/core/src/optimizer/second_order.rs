//! Sign check of the reduced Hessian at a computed maximiser.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::objective::ReducedObjective;
use super::report::SecondOrderCheck;
use crate::error::Result;

/// Power iteration on `v -> H v` in the objective's inner product.
///
/// A first pass finds the dominant eigenvalue. If it is negative, a second
/// pass on `H - lambda_1 I` locates the other end of the spectrum, which is
/// the largest algebraic eigenvalue.
pub fn second_order_check(
    obj: &mut dyn ReducedObjective,
    iterations: usize,
    tolerance: f64,
    seed: u64,
) -> Result<SecondOrderCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..obj.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let dominant = power_iteration(obj, &start, iterations, 0.0)?;
    let lambda_max = if dominant < 0.0 {
        power_iteration(obj, &start, iterations, dominant)? + dominant
    } else {
        dominant
    };
    Ok(SecondOrderCheck {
        lambda_max,
        lambda_dominant: dominant,
        iterations,
        tolerance,
        consistent_with_local_max: lambda_max <= tolerance,
    })
}

/// Rayleigh quotient estimate of the dominant eigenvalue of `H - shift I`.
fn power_iteration(obj: &mut dyn ReducedObjective, start: &[f64], iterations: usize, shift: f64) -> Result<f64> {
    let mut v = start.to_vec();
    normalize(obj, &mut v);
    let mut lambda = 0.0;
    for _ in 0..iterations.max(1) {
        let mut w = obj.hvp(&v)?;
        w.iter_mut().zip(&v).for_each(|(a, b)| *a -= shift * b);
        lambda = obj.inner(&v, &w);
        let norm = obj.inner(&w, &w).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        v = w.into_iter().map(|a| a / norm).collect();
    }
    Ok(lambda)
}

fn normalize(obj: &dyn ReducedObjective, v: &mut [f64]) {
    let n = obj.inner(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|a| *a /= n);
    }
}
