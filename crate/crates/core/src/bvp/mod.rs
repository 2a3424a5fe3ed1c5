//! Two-point boundary value problem for the unfolded equation `z̈ = g*_m(t, z)`.
//!
//! The problem is written as the fixed point of
//!
//! ```text
//! (T_m y)(t) = (t/T) z_T + ((T - t)/T) A + ∫₀ᵀ G(t,s) g*_m(s, y(s)) ds
//! ```
//!
//! with the Dirichlet Green function of `ÿ = 0`. The kernel integral is taken
//! with the composite trapezoid rule split at the kink `s = t`; because each
//! branch of `G` is linear in `s`, the whole operator reduces to two running
//! sums and costs `O(N)` per application.

mod anderson;
mod solver;

pub(crate) use solver::CROSSING_EXCLUSION_STEPS;
pub use solver::{
    continuation_solve, integrated_residual, quadrature_error_estimate, solve_regularized,
    ContinuationOutcome, LevelReport, RegularizedSolve, SolverConfig,
};

use serde::Serialize;

use crate::domain::{BoxDomain, Point};
use crate::error::{Error, Result};
use crate::forces::{g_star_into, ForceField};
use crate::scalar::{norm, Real};

/// Uniform grid `t_k = kT/N`, `k = 0..=N`, with `N` even.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid<S> {
    horizon: S,
    intervals: usize,
}

impl<S: Real> TimeGrid<S> {
    pub fn new(horizon: S, intervals: usize) -> Result<Self> {
        if !(horizon > S::zero()) || !horizon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if intervals < 2 || !intervals.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "grid needs an even number of intervals >= 2, got {intervals}"
            )));
        }
        Ok(TimeGrid { horizon, intervals })
    }

    pub fn horizon(&self) -> S {
        self.horizon
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> S {
        self.horizon / S::from_count(self.intervals)
    }

    pub fn node(&self, k: usize) -> S {
        if k == self.intervals {
            self.horizon
        } else {
            self.horizon * S::from_count(k) / S::from_count(self.intervals)
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = S> + '_ {
        (0..=self.intervals).map(move |k| self.node(k))
    }
}

/// Samples of a candidate `z` and its derivative on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedTrajectory<S> {
    grid: TimeGrid<S>,
    dim: usize,
    values: Vec<S>,
    derivs: Vec<S>,
    start: Point<S>,
    target: Point<S>,
}

impl<S: Real> UnfoldedTrajectory<S> {
    /// Uniform motion from `start` to `target`.
    pub fn straight_line(grid: TimeGrid<S>, start: &[S], target: &[S]) -> Self {
        let n = start.len();
        let horizon = grid.horizon();
        let slope: Vec<S> = start
            .iter()
            .zip(target)
            .map(|(&a, &b)| (b - a) / horizon)
            .collect();
        let mut values = Vec::with_capacity(grid.len() * n);
        let mut derivs = Vec::with_capacity(grid.len() * n);
        for t in grid.nodes() {
            let w = t / horizon;
            for i in 0..n {
                values.push(w * target[i] + (S::one() - w) * start[i]);
                derivs.push(slope[i]);
            }
        }
        let mut line = UnfoldedTrajectory {
            grid,
            dim: n,
            values,
            derivs,
            start: Point::from(start),
            target: Point::from(target),
        };
        line.pin_endpoints();
        line
    }

    /// Assembles a trajectory from raw node samples (`values[k*n + i]`).
    pub fn from_samples(
        grid: TimeGrid<S>,
        start: Point<S>,
        target: Point<S>,
        values: Vec<S>,
        derivs: Vec<S>,
    ) -> Result<Self> {
        let n = start.dim();
        if target.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: target.dim(),
            });
        }
        for v in [&values, &derivs] {
            if v.len() != grid.len() * n {
                return Err(Error::DimensionMismatch {
                    expected: grid.len() * n,
                    got: v.len(),
                });
            }
        }
        let mut traj = UnfoldedTrajectory {
            grid,
            dim: n,
            values,
            derivs,
            start,
            target,
        };
        traj.pin_endpoints();
        Ok(traj)
    }

    fn pin_endpoints(&mut self) {
        let n = self.dim;
        let last = self.grid.intervals() * n;
        self.values[..n].copy_from_slice(&self.start);
        self.values[last..last + n].copy_from_slice(&self.target);
    }

    pub fn grid(&self) -> &TimeGrid<S> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn start(&self) -> &Point<S> {
        &self.start
    }

    pub fn target(&self) -> &Point<S> {
        &self.target
    }

    pub fn value(&self, k: usize) -> &[S] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn deriv(&self, k: usize) -> &[S] {
        &self.derivs[k * self.dim..(k + 1) * self.dim]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn derivs(&self) -> &[S] {
        &self.derivs
    }

    /// Velocity of uniform motion `(z_T − A)/T`.
    pub fn mean_velocity(&self) -> Vec<S> {
        self.start
            .iter()
            .zip(self.target.iter())
            .map(|(&a, &b)| (b - a) / self.grid.horizon())
            .collect()
    }

    /// `max_k ‖z(t_k)‖`.
    pub fn sup_norm(&self) -> S {
        self.values
            .chunks(self.dim)
            .map(norm)
            .fold(S::zero(), S::max)
    }

    /// `max_k ‖ż(t_k) − (z_T − A)/T‖`.
    pub fn max_velocity_deviation(&self) -> S {
        let mean = self.mean_velocity();
        max_deviation(&self.derivs, &mean)
    }

    /// `max_k ‖z(t_k) − w(t_k)‖` over a shared grid.
    pub fn sup_distance(&self, other: &Self) -> S {
        self.values
            .chunks(self.dim)
            .zip(other.values.chunks(other.dim))
            .map(|(a, b)| crate::scalar::dist(a, b))
            .fold(S::zero(), S::max)
    }

    /// Cubic Hermite interpolant of component `axis` on `[t_k, t_{k+1}]` at
    /// local parameter `u ∈ [0,1]`: returns value and time derivative.
    pub fn hermite(&self, axis: usize, k: usize, u: S) -> (S, S) {
        let h = self.grid.step();
        let n = self.dim;
        let (y0, y1) = (self.values[k * n + axis], self.values[(k + 1) * n + axis]);
        let (d0, d1) = (
            self.derivs[k * n + axis] * h,
            self.derivs[(k + 1) * n + axis] * h,
        );
        hermite(y0, y1, d0, d1, u, h)
    }

    /// Interpolated `(z(t), ż(t))` by piecewise cubic Hermite.
    pub fn interpolate(&self, t: S) -> (Vec<S>, Vec<S>) {
        let (k, u) = self.locate(t);
        (0..self.dim).map(|i| self.hermite(i, k, u)).unzip()
    }

    /// Interval index and local parameter of time `t` (clamped to `[0,T]`).
    pub fn locate(&self, t: S) -> (usize, S) {
        let h = self.grid.step();
        let n_int = self.grid.intervals();
        let x = (t / h).max(S::zero());
        let k = x.floor().to_usize().unwrap_or(0).min(n_int - 1);
        let u = ((t - self.grid.node(k)) / h).max(S::zero()).min(S::one());
        (k, u)
    }
}

pub(crate) fn hermite<S: Real>(y0: S, y1: S, d0: S, d1: S, u: S, h: S) -> (S, S) {
    let one = S::one();
    let two = S::lit(2.0);
    let three = S::lit(3.0);
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = two * u3 - three * u2 + one;
    let h10 = u3 - two * u2 + u;
    let h01 = -two * u3 + three * u2;
    let h11 = u3 - u2;
    let value = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
    let six = S::lit(6.0);
    let dh00 = six * u2 - six * u;
    let dh10 = three * u2 - S::lit(4.0) * u + one;
    let dh01 = -six * u2 + six * u;
    let dh11 = three * u2 - two * u;
    let slope = (dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1) / h;
    (value, slope)
}

fn max_deviation<S: Real>(samples: &[S], center: &[S]) -> S {
    let n = center.len();
    samples
        .chunks(n)
        .map(|d| crate::scalar::dist(d, center))
        .fold(S::zero(), S::max)
}

/// Dirichlet Green function of `ÿ = 0` on `[0,T]`.
pub fn green<S: Real>(t: S, s: S, horizon: S) -> S {
    if t <= s {
        t * (s - horizon) / horizon
    } else {
        s * (t - horizon) / horizon
    }
}

/// `∂G/∂t`; at `t = s` the right-hand branch is returned.
pub fn green_dt<S: Real>(t: S, s: S, horizon: S) -> S {
    if t < s {
        (s - horizon) / horizon
    } else {
        s / horizon
    }
}

/// Scratch buffers for repeated operator applications.
#[derive(Debug, Default)]
pub(crate) struct Workspace<S> {
    load: Vec<S>,
    tail: Vec<S>,
    folded: Vec<S>,
}

/// Applies `T_m` to the node values `input`, writing node values and
/// derivatives of the image.
#[allow(clippy::too_many_arguments)]
pub(crate) fn apply_into<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    grid: &TimeGrid<S>,
    start: &[S],
    target: &[S],
    input: &[S],
    level: u64,
    ws: &mut Workspace<S>,
    values: &mut [S],
    derivs: &mut [S],
) {
    let n = start.len();
    let len = grid.len();
    let horizon = grid.horizon();
    let half_h = grid.step() / S::lit(2.0);
    ws.load.resize(len * n, S::zero());
    ws.tail.resize(len * n, S::zero());
    ws.folded.resize(n, S::zero());

    for k in 0..len {
        let t = grid.node(k);
        let (z, out) = (&input[k * n..(k + 1) * n], &mut ws.load[k * n..(k + 1) * n]);
        g_star_into(field, domain, t, z, level, &mut ws.folded, out);
    }

    // tail[k] = trapezoid of (s - T) g(s) over [t_k, T]
    let last = len - 1;
    ws.tail[last * n..].iter_mut().for_each(|v| *v = S::zero());
    for k in (0..last).rev() {
        let (s0, s1) = (grid.node(k) - horizon, grid.node(k + 1) - horizon);
        for i in 0..n {
            let inc = half_h * (s0 * ws.load[k * n + i] + s1 * ws.load[(k + 1) * n + i]);
            ws.tail[k * n + i] = ws.tail[(k + 1) * n + i] + inc;
        }
    }

    // head = trapezoid of s g(s) over [0, t_k], accumulated forward
    let mut head = vec![S::zero(); n];
    for k in 0..len {
        let t = grid.node(k);
        if k > 0 {
            let s0 = grid.node(k - 1);
            for (i, h) in head.iter_mut().enumerate() {
                *h += half_h * (s0 * ws.load[(k - 1) * n + i] + t * ws.load[k * n + i]);
            }
        }
        let w = t / horizon;
        let left = (t - horizon) / horizon;
        for i in 0..n {
            let line = w * target[i] + (S::one() - w) * start[i];
            let slope = (target[i] - start[i]) / horizon;
            let tail = ws.tail[k * n + i];
            values[k * n + i] = line + left * head[i] + w * tail;
            derivs[k * n + i] = slope + (head[i] + tail) / horizon;
        }
    }
    values[..n].copy_from_slice(start);
    values[last * n..].copy_from_slice(target);
}

/// One application of `T_m` at regularization level `level`.
pub fn apply_operator<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    y: &UnfoldedTrajectory<S>,
    level: u64,
) -> UnfoldedTrajectory<S> {
    let mut out = y.clone();
    let mut ws = Workspace::default();
    apply_into(
        field,
        domain,
        &y.grid,
        &y.start,
        &y.target,
        &y.values,
        level,
        &mut ws,
        &mut out.values,
        &mut out.derivs,
    );
    out
}
