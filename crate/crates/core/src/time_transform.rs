//! Piecewise-affine reparameterisation of `[0, T]` onto the fixed interval
//! `[0, 2]`, with the free time `tau` pinned to `s = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half-interval governs a one-sided quantity at `s = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `[0, 1]`, the part before `tau`.
    Left,
    /// `[1, 2]`, the part after `tau`.
    Right,
}

impl Side {
    pub fn of(s: f64, at_one: Side) -> Side {
        if s < 1.0 {
            Side::Left
        } else if s > 1.0 {
            Side::Right
        } else {
            at_one
        }
    }
}

/// Free time `tau` together with the horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauParameter {
    tau: f64,
    horizon: f64,
}

/// Fraction of the horizon kept away from the endpoints.
pub const DEFAULT_TAU_MIN_FRACTION: f64 = 1e-6;

impl TauParameter {
    /// Builds the parameter, rejecting values outside the open interval.
    pub fn new(tau: f64, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        if !(tau > 0.0 && tau < horizon) {
            return Err(Error::Domain(format!("tau must lie in (0, {horizon}), got {tau}")));
        }
        Ok(Self { tau, horizon })
    }

    /// Builds the parameter with `tau` clamped to `[f T, (1 - f) T]`.
    /// The flag reports whether the clamp was active.
    pub fn clamped(tau: f64, horizon: f64, min_fraction: f64) -> Result<(Self, bool)> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        if !tau.is_finite() {
            return Err(Error::Domain(format!("tau is not finite: {tau}")));
        }
        let lo = min_fraction * horizon;
        let hi = horizon - lo;
        let c = tau.clamp(lo, hi);
        Ok((Self { tau: c, horizon }, c != tau))
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `pi(s, tau)`.
    pub fn pi_map(&self, s: f64) -> Result<f64> {
        check_s(s)?;
        Ok(if s <= 1.0 {
            self.tau * s
        } else {
            (self.horizon - self.tau) * s + 2.0 * self.tau - self.horizon
        })
    }

    /// Inverse of [`pi_map`](Self::pi_map).
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.horizon)));
        }
        Ok(if t <= self.tau {
            t / self.tau
        } else {
            1.0 + (t - self.tau) / (self.horizon - self.tau)
        })
    }

    /// `d pi / ds`: `tau` on the left half, `T - tau` on the right half.
    pub fn pi_dot(&self, s: f64, at_one: Side) -> Result<f64> {
        check_s(s)?;
        Ok(self.pi_dot_side(Side::of(s, at_one)))
    }

    pub fn pi_dot_side(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.tau,
            Side::Right => self.horizon - self.tau,
        }
    }

    /// Physical time of every grid node; entry `N/2` is exactly `tau`.
    pub fn physical_times(&self, grid: &SGrid) -> Vec<f64> {
        let k = grid.mid();
        (0..=grid.n_steps())
            .map(|i| {
                if i == k {
                    self.tau
                } else if i == grid.n_steps() {
                    self.horizon
                } else {
                    // Nodes are in range by construction.
                    self.pi_map(grid.node(i)).expect("grid node in [0, 2]")
                }
            })
            .collect()
    }
}

/// `d^2 pi / (ds dtau)`, independent of `tau`.
pub fn pi_dot_tau(s: f64, at_one: Side) -> Result<f64> {
    check_s(s)?;
    Ok(pi_dot_tau_side(Side::of(s, at_one)))
}

pub fn pi_dot_tau_side(side: Side) -> f64 {
    match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&s) {
        return Err(Error::Domain(format!("s = {s} outside [0, 2]")));
    }
    Ok(())
}

/// Uniform grid on `[0, 2]` with an even number of steps, so `s = 1` is a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SGrid {
    n_steps: usize,
}

impl SGrid {
    pub fn new(n_steps: usize) -> Result<Self> {
        if n_steps == 0 || !n_steps.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "number of steps must be a positive even integer, got {n_steps}"
            )));
        }
        Ok(Self { n_steps })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    /// Index of the node `s = 1`.
    pub fn mid(&self) -> usize {
        self.n_steps / 2
    }

    pub fn step(&self) -> f64 {
        2.0 / self.n_steps as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        2.0 * i as f64 / self.n_steps as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|i| self.node(i)).collect()
    }

    /// Half-interval containing the step `i -> i + 1`.
    pub fn step_side(&self, i: usize) -> Side {
        if i < self.mid() {
            Side::Left
        } else {
            Side::Right
        }
    }

    /// Trapezoidal weight of node `i` over `[0, 2]`.
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n_steps {
            0.5 * self.step()
        } else {
            self.step()
        }
    }

    /// Split trapezoidal quadrature `sum over sides` of a function whose value
    /// at `s = 1` may be one-sided. `f(i, side)` is called once per node and
    /// once more at the middle node.
    pub fn split_trapezoid(&self, mut f: impl FnMut(usize, Side) -> f64) -> f64 {
        let h = self.step();
        let k = self.mid();
        let mut left = 0.5 * (f(0, Side::Left) + f(k, Side::Left));
        for i in 1..k {
            left += f(i, Side::Left);
        }
        let mut right = 0.5 * (f(k, Side::Right) + f(self.n_steps, Side::Right));
        for i in k + 1..self.n_steps {
            right += f(i, Side::Right);
        }
        h * (left + right)
    }
}
