//! Force fields, their mirrored extension over the unfolded space, and the
//! ramp-regularized extension used by the fixed-point solver.

use std::sync::Arc;

use serde::Serialize;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::scalar::{norm, Real};

/// Number of cells used to integrate a bound profile.
const BOUND_QUADRATURE_CELLS: usize = 1024;

/// Right-hand side `f(t, x)` on `[0,T] × K` together with an integrable bound
/// `m(t) ≥ ‖f(t,x)‖`.
///
/// Implementations must be free of side effects: the solver evaluates them
/// concurrently from several branch solves.
pub trait ForceField<S: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// Time horizon `T > 0`.
    fn horizon(&self) -> S;

    /// Writes `f(t, x)` into `out`.
    fn eval(&self, t: S, x: &[S], out: &mut [S]);

    /// Pointwise bound `m(t)`.
    fn bound(&self, t: S) -> S;

    /// `m̄ = ∫₀ᵀ m(t) dt`, with `m` taken piecewise constant (midpoint samples).
    fn bound_integral(&self) -> S {
        let n = BOUND_QUADRATURE_CELLS;
        let h = self.horizon() / S::from_count(n);
        (0..n)
            .map(|k| self.bound((S::from_count(k) + S::lit(0.5)) * h) * h)
            .sum()
    }

    fn eval_vec(&self, t: S, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim()];
        self.eval(t, x, &mut out);
        out
    }
}

impl<S: Real, F: ForceField<S> + ?Sized> ForceField<S> for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn horizon(&self) -> S {
        (**self).horizon()
    }
    fn eval(&self, t: S, x: &[S], out: &mut [S]) {
        (**self).eval(t, x, out)
    }
    fn bound(&self, t: S) -> S {
        (**self).bound(t)
    }
    fn bound_integral(&self) -> S {
        (**self).bound_integral()
    }
}

impl<S: Real, F: ForceField<S> + ?Sized> ForceField<S> for Arc<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn horizon(&self) -> S {
        (**self).horizon()
    }
    fn eval(&self, t: S, x: &[S], out: &mut [S]) {
        (**self).eval(t, x, out)
    }
    fn bound(&self, t: S) -> S {
        (**self).bound(t)
    }
    fn bound_integral(&self) -> S {
        (**self).bound_integral()
    }
}

impl<S: Real, F: ForceField<S> + ?Sized> ForceField<S> for Box<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn horizon(&self) -> S {
        (**self).horizon()
    }
    fn eval(&self, t: S, x: &[S], out: &mut [S]) {
        (**self).eval(t, x, out)
    }
    fn bound(&self, t: S) -> S {
        (**self).bound(t)
    }
    fn bound_integral(&self) -> S {
        (**self).bound_integral()
    }
}

/// `f ≡ 0`, bound `m ≡ 0`.
#[derive(Debug, Clone)]
pub struct ZeroField<S> {
    dim: usize,
    horizon: S,
}

impl<S: Real> ZeroField<S> {
    pub fn new(dim: usize, horizon: S) -> Self {
        ZeroField { dim, horizon }
    }
}

impl<S: Real> ForceField<S> for ZeroField<S> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn horizon(&self) -> S {
        self.horizon
    }
    fn eval(&self, _t: S, _x: &[S], out: &mut [S]) {
        out.iter_mut().for_each(|o| *o = S::zero());
    }
    fn bound(&self, _t: S) -> S {
        S::zero()
    }
    fn bound_integral(&self) -> S {
        S::zero()
    }
}

/// Constant force; by default bounded by its own norm.
#[derive(Debug, Clone)]
pub struct ConstantField<S> {
    value: Vec<S>,
    horizon: S,
    bound: S,
}

impl<S: Real> ConstantField<S> {
    pub fn new(value: Vec<S>, horizon: S) -> Self {
        let bound = norm(&value);
        ConstantField {
            value,
            horizon,
            bound,
        }
    }

    /// Overrides the bound constant (it is not checked here; see [`audit_bound`]).
    pub fn with_bound(mut self, bound: S) -> Self {
        self.bound = bound;
        self
    }
}

impl<S: Real> ForceField<S> for ConstantField<S> {
    fn dim(&self) -> usize {
        self.value.len()
    }
    fn horizon(&self) -> S {
        self.horizon
    }
    fn eval(&self, _t: S, _x: &[S], out: &mut [S]) {
        out.copy_from_slice(&self.value);
    }
    fn bound(&self, _t: S) -> S {
        self.bound
    }
    fn bound_integral(&self) -> S {
        self.bound * self.horizon
    }
}

/// Affine field `f(t, x) = M x + b` with a constant bound.
#[derive(Debug, Clone)]
pub struct AffineField<S> {
    matrix: Vec<Vec<S>>,
    offset: Vec<S>,
    horizon: S,
    bound: S,
}

impl<S: Real> AffineField<S> {
    /// The bound is the maximum of `‖M x + b‖` over the vertices of `domain`,
    /// which is the maximum over the whole box since the norm is convex.
    pub fn new(
        matrix: Vec<Vec<S>>,
        offset: Vec<S>,
        horizon: S,
        domain: &BoxDomain<S>,
    ) -> Result<Self> {
        let n = offset.len();
        domain.check_dim(n)?;
        if matrix.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        let mut field = AffineField {
            matrix,
            offset,
            horizon,
            bound: S::zero(),
        };
        let mut vertex = vec![S::zero(); n];
        let mut out = vec![S::zero(); n];
        let mut bound = S::zero();
        for mask in 0..(1usize << n) {
            for (i, v) in vertex.iter_mut().enumerate() {
                *v = if mask >> i & 1 == 1 {
                    domain.upper()[i]
                } else {
                    domain.lower()[i]
                };
            }
            field.eval(S::zero(), &vertex, &mut out);
            bound = bound.max(norm(&out));
        }
        field.bound = bound;
        Ok(field)
    }

    pub fn with_bound(mut self, bound: S) -> Self {
        self.bound = bound;
        self
    }
}

impl<S: Real> ForceField<S> for AffineField<S> {
    fn dim(&self) -> usize {
        self.offset.len()
    }
    fn horizon(&self) -> S {
        self.horizon
    }
    fn eval(&self, _t: S, x: &[S], out: &mut [S]) {
        for (o, (row, &b)) in out.iter_mut().zip(self.matrix.iter().zip(&self.offset)) {
            *o = row.iter().zip(x).map(|(&m, &xi)| m * xi).sum::<S>() + b;
        }
    }
    fn bound(&self, _t: S) -> S {
        self.bound
    }
    fn bound_integral(&self) -> S {
        self.bound * self.horizon
    }
}

/// `f(t, x) = inner(t, x + shift)`: re-expresses a field given in original
/// box coordinates in the anchored frame. The bound is unchanged.
#[derive(Clone)]
pub struct Shifted<S, F> {
    inner: F,
    shift: Vec<S>,
}

impl<S: Real, F: ForceField<S>> Shifted<S, F> {
    pub fn new(inner: F, shift: Vec<S>) -> Self {
        Shifted { inner, shift }
    }
}

impl<S: Real, F: ForceField<S>> ForceField<S> for Shifted<S, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn horizon(&self) -> S {
        self.inner.horizon()
    }
    fn eval(&self, t: S, x: &[S], out: &mut [S]) {
        const STACK: usize = 8;
        let n = x.len();
        if n <= STACK {
            let mut moved = [S::zero(); STACK];
            for ((m, &a), &b) in moved.iter_mut().zip(x).zip(&self.shift) {
                *m = a + b;
            }
            self.inner.eval(t, &moved[..n], out)
        } else {
            let moved: Vec<S> = x.iter().zip(&self.shift).map(|(&a, &b)| a + b).collect();
            self.inner.eval(t, &moved, out)
        }
    }
    fn bound(&self, t: S) -> S {
        self.inner.bound(t)
    }
    fn bound_integral(&self) -> S {
        self.inner.bound_integral()
    }
}

type Potential<S> = Arc<dyn Fn(S, S) -> S + Send + Sync>;
type Gradient<S> = Arc<dyn Fn(S, S) -> (S, S) + Send + Sync>;

/// Height profile `V(x, y)` of an uneven, frictionless table under gravity `g`.
#[derive(Clone)]
pub struct PotentialTable<S> {
    potential: Potential<S>,
    gradient: Option<Gradient<S>>,
    gravity: S,
}

impl<S: Real> PotentialTable<S> {
    /// Table with a numerically differentiated profile.
    pub fn new(potential: impl Fn(S, S) -> S + Send + Sync + 'static, gravity: S) -> Self {
        PotentialTable {
            potential: Arc::new(potential),
            gradient: None,
            gravity,
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(S, S) -> (S, S) + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    /// `V(x, y) = x y exp(-x² - y²)`, with its analytic gradient.
    pub fn gaussian_dimple(gravity: S) -> Self {
        PotentialTable::new(|x: S, y: S| x * y * (-(x * x) - y * y).exp(), gravity).with_gradient(
            |x: S, y: S| {
                let e = (-(x * x) - y * y).exp();
                let two = S::lit(2.0);
                (
                    y * (S::one() - two * x * x) * e,
                    x * (S::one() - two * y * y) * e,
                )
            },
        )
    }

    pub fn gravity(&self) -> S {
        self.gravity
    }

    pub fn height(&self, x: S, y: S) -> S {
        (self.potential)(x, y)
    }

    /// `∇V`, analytic when supplied, central differences otherwise.
    pub fn gradient(&self, x: S, y: S) -> (S, S) {
        if let Some(g) = &self.gradient {
            return g(x, y);
        }
        let hx = S::lit(1e-6) * x.abs().max(S::one());
        let hy = S::lit(1e-6) * y.abs().max(S::one());
        let v = &self.potential;
        (
            (v(x + hx, y) - v(x - hx, y)) / (hx + hx),
            (v(x, y + hy) - v(x, y - hy)) / (hy + hy),
        )
    }

    /// Horizontal component of gravity along the surface: `-g ∇V / (|∇V|² + 1)`.
    pub fn force(&self, x: S, y: S) -> (S, S) {
        let (vx, vy) = self.gradient(x, y);
        let scale = -self.gravity / (vx * vx + vy * vy + S::one());
        (scale * vx, scale * vy)
    }
}

/// Force field derived from a [`PotentialTable`] on a rectangle.
#[derive(Clone)]
pub struct TableField<S> {
    table: PotentialTable<S>,
    horizon: S,
    bound: S,
}

/// Samples per axis used to estimate `sup ‖f‖` for a table.
pub const TABLE_BOUND_SAMPLES: usize = 512;
/// Safety factor applied to the sampled supremum.
pub const TABLE_BOUND_SAFETY: f64 = 1.05;

impl<S: Real> TableField<S> {
    pub fn table(&self) -> &PotentialTable<S> {
        &self.table
    }

    /// Replaces the bound constant.
    pub fn with_bound(mut self, bound: S) -> Self {
        self.bound = bound;
        self
    }
}

/// Builds the table force on `domain` (original coordinates, 2-D).
///
/// The bound constant is `1.05 · max ‖f‖` over a 512×512 uniform grid, capped
/// by the analytic bound `g/2` (from `u/(u²+1) ≤ 1/2`).
pub fn table_force<S: Real>(
    table: PotentialTable<S>,
    domain: &BoxDomain<S>,
    horizon: S,
) -> Result<TableField<S>> {
    domain.check_dim(2)?;
    let n = TABLE_BOUND_SAMPLES;
    let step = |axis: usize| domain.edge(axis) / S::from_count(n - 1);
    let (hx, hy) = (step(0), step(1));
    let mut sup = S::zero();
    for i in 0..n {
        let x = domain.lower()[0] + S::from_count(i) * hx;
        for j in 0..n {
            let y = domain.lower()[1] + S::from_count(j) * hy;
            let (fx, fy) = table.force(x, y);
            sup = sup.max((fx * fx + fy * fy).sqrt());
        }
    }
    let analytic = table.gravity / S::lit(2.0);
    let bound = (sup * S::lit(TABLE_BOUND_SAFETY)).min(analytic);
    Ok(TableField {
        table,
        horizon,
        bound,
    })
}

impl<S: Real> ForceField<S> for TableField<S> {
    fn dim(&self) -> usize {
        2
    }
    fn horizon(&self) -> S {
        self.horizon
    }
    fn eval(&self, _t: S, x: &[S], out: &mut [S]) {
        let (fx, fy) = self.table.force(x[0], x[1]);
        out[0] = fx;
        out[1] = fy;
    }
    fn bound(&self, _t: S) -> S {
        self.bound
    }
    fn bound_integral(&self) -> S {
        self.bound * self.horizon
    }
}

/// Mirrored extension `f*ᵢ(t, z) = θᵢ(zᵢ) fᵢ(t, ψ(z))` into `out`.
/// `folded` is scratch space of length `n`.
pub fn extend_f_star_into<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    t: S,
    z: &[S],
    folded: &mut [S],
    out: &mut [S],
) {
    domain.fold_into(z, folded);
    field.eval(t, folded, out);
    for (i, o) in out.iter_mut().enumerate() {
        *o *= domain.theta(i, z[i]).signum::<S>();
    }
}

/// Mirrored extension `f*(t, z)` of `field` to all of `ℝⁿ`; `2c`-periodic.
pub fn extend_f_star<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    t: S,
    z: &[S],
) -> Vec<S> {
    let n = domain.dim();
    let mut folded = vec![S::zero(); n];
    let mut out = vec![S::zero(); n];
    extend_f_star_into(field, domain, t, z, &mut folded, &mut out);
    out
}

/// Ramp `η` on `[0, cᵢ]` without the range check.
#[inline]
pub(crate) fn ramp<S: Real>(edge: S, s: S, level: u64) -> S {
    let width = edge / (S::lit(2.0) * S::from_u64(level).expect("level fits in scalar"));
    if s < width {
        (s / width).max(S::zero())
    } else if s < edge - width {
        S::one()
    } else {
        ((edge - s) / width).max(S::zero())
    }
}

/// Ramp `η_m` on axis `axis`: rises linearly from 0 on `[0, c/2m)`, equals 1
/// on the plateau, falls back to 0 at `c`.
pub fn eta<S: Real>(domain: &BoxDomain<S>, axis: usize, s: S, level: u64) -> Result<S> {
    domain.check_axis(axis)?;
    let edge = domain.edge(axis);
    if !(s >= S::zero() && s <= edge) || level == 0 {
        return Err(Error::RampDomain {
            axis,
            value: s.as_f64(),
            edge: edge.as_f64(),
        });
    }
    Ok(ramp(edge, s, level))
}

/// Regularized extension `g*_m(t, z)` into `out`; `folded` is scratch.
pub fn g_star_into<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    t: S,
    z: &[S],
    level: u64,
    folded: &mut [S],
    out: &mut [S],
) {
    extend_f_star_into(field, domain, t, z, folded, out);
    for (i, o) in out.iter_mut().enumerate() {
        *o *= ramp(domain.edge(i), domain.mod_edge(i, z[i]), level);
    }
}

/// Regularized extension `g*_m(t, z) = (η_m(zᵢ mod cᵢ) f*ᵢ(t, z))ᵢ`.
pub fn g_star<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    t: S,
    z: &[S],
    level: u64,
) -> Vec<S> {
    let n = domain.dim();
    let mut folded = vec![S::zero(); n];
    let mut out = vec![S::zero(); n];
    g_star_into(field, domain, t, z, level, &mut folded, &mut out);
    out
}

/// Outcome of a sampled bound audit.
#[derive(Debug, Clone, Serialize)]
pub struct BoundAudit {
    pub samples: usize,
    /// `max (‖f(t,x)‖ − m(t))` over the samples; negative when the bound holds.
    pub max_excess: f64,
    /// `-max_excess`.
    pub slack: f64,
}

/// Absolute tolerance on bound excess.
pub const BOUND_AUDIT_TOL: f64 = 1e-12;

/// Checks `‖f(t,x)‖ ≤ m(t)` on a Halton sequence over `[0,T] × K`.
pub fn audit_bound<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    samples: usize,
) -> Result<BoundAudit> {
    domain.check_dim(field.dim())?;
    if samples == 0 {
        return Err(Error::InvalidConfig(
            "audit needs at least one sample".into(),
        ));
    }
    let n = domain.dim();
    let mut x = vec![S::zero(); n];
    let mut out = vec![S::zero(); n];
    let mut max_excess = f64::NEG_INFINITY;
    for k in 1..=samples {
        let t = field.horizon() * S::lit(radical_inverse(k, PRIMES[0]));
        for (i, xi) in x.iter_mut().enumerate() {
            let u = S::lit(radical_inverse(k, PRIMES[(i + 1) % PRIMES.len()]));
            *xi = domain.lower()[i] + u * domain.edge(i);
        }
        field.eval(t, &x, &mut out);
        let excess = (norm(&out) - field.bound(t)).as_f64();
        if excess > BOUND_AUDIT_TOL {
            return Err(Error::BoundViolation {
                excess,
                t: t.as_f64(),
                x: x.iter().map(|v| v.as_f64()).collect(),
            });
        }
        max_excess = max_excess.max(excess);
    }
    Ok(BoundAudit {
        samples,
        max_excess,
        slack: -max_excess,
    })
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut k: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while k > 0 {
        acc += (k % base) as f64 * scale;
        k /= base;
        scale *= inv;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit2() -> BoxDomain<f64> {
        BoxDomain::unit(2).unwrap()
    }

    struct FirstCoordinate;
    impl ForceField<f64> for FirstCoordinate {
        fn dim(&self) -> usize {
            2
        }
        fn horizon(&self) -> f64 {
            1.0
        }
        fn eval(&self, _t: f64, x: &[f64], out: &mut [f64]) {
            out[0] = x[0];
            out[1] = 0.0;
        }
        fn bound(&self, _t: f64) -> f64 {
            1.0
        }
    }

    #[test]
    fn zero_field_extends_to_zero() {
        let f = ZeroField::new(2, 1.0);
        assert_eq!(
            extend_f_star(&f, &unit2(), 0.3, &[7.3, -2.2]),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn constant_field_picks_up_orientation() {
        let f = ConstantField::new(vec![1.0, 1.0], 1.0);
        assert_eq!(
            extend_f_star(&f, &unit2(), 0.0, &[0.5, 1.5]),
            vec![1.0, -1.0]
        );
    }

    #[test]
    fn state_dependent_extension() {
        let out = extend_f_star(&FirstCoordinate, &unit2(), 0.0, &[1.25, 0.5]);
        assert_abs_diff_eq!(out[0], -0.75);
        assert_abs_diff_eq!(out[1], 0.0);
    }

    #[test]
    fn eta_values() {
        let k = BoxDomain::<f64>::unit(1).unwrap();
        assert_eq!(eta(&k, 0, 0.0, 2).unwrap(), 0.0);
        assert_eq!(eta(&k, 0, 1.0, 2).unwrap(), 0.0);
        assert_eq!(eta(&k, 0, 0.5, 2).unwrap(), 1.0);
        assert_abs_diff_eq!(eta(&k, 0, 0.125, 2).unwrap(), 0.5);
        assert_abs_diff_eq!(eta(&k, 0, 0.9, 2).unwrap(), 0.4, epsilon = 1e-12);
        assert!(matches!(eta(&k, 0, 1.5, 2), Err(Error::RampDomain { .. })));
        assert!(eta(&k, 0, -0.1, 2).is_err());
    }

    #[test]
    fn g_star_values() {
        let k = BoxDomain::<f64>::unit(1).unwrap();
        let f = ConstantField::new(vec![1.0], 1.0);
        assert_abs_diff_eq!(g_star(&f, &k, 0.0, &[2.125], 2)[0], 0.5);
        assert_eq!(g_star(&f, &k, 0.0, &[3.0], 2)[0], 0.0);
        let k2 = unit2();
        let f2 = ConstantField::new(vec![0.3, -0.7], 1.0);
        let z = [0.4, 1.6];
        assert_eq!(
            g_star(&f2, &k2, 0.0, &z, 4),
            extend_f_star(&f2, &k2, 0.0, &z)
        );
    }

    #[test]
    fn plateau_fraction() {
        // fraction of [0, c] where η_m = 1 is 1 - 1/m
        let k = BoxDomain::<f64>::anchored(vec![3.0]).unwrap();
        for m in [1u64, 2, 5, 16] {
            let n = 300_000;
            let ones = (0..n)
                .filter(|&j| eta(&k, 0, 3.0 * (j as f64 + 0.5) / n as f64, m).unwrap() == 1.0)
                .count();
            assert_abs_diff_eq!(ones as f64 / n as f64, 1.0 - 1.0 / m as f64, epsilon = 1e-4);
        }
    }

    #[test]
    fn dimple_force_at_origin_and_bound() {
        let k = BoxDomain::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let field = table_force(PotentialTable::gaussian_dimple(9.81), &k, 1.0).unwrap();
        assert_eq!(field.eval_vec(0.0, &[0.0, 0.0]), vec![0.0, 0.0]);
        let g_half = 9.81 / 2.0;
        let n = 400;
        for i in 0..=n {
            for j in 0..=n {
                let x = -2.0 + 4.0 * i as f64 / n as f64;
                let y = -2.0 + 4.0 * j as f64 / n as f64;
                let f = field.eval_vec(0.0, &[x, y]);
                assert!(norm(&f) <= g_half);
                let g = field.eval_vec(0.0, &[-x, -y]);
                assert_abs_diff_eq!(f[0], -g[0], epsilon = 1e-14);
                assert_abs_diff_eq!(f[1], -g[1], epsilon = 1e-14);
            }
        }
        assert!(field.bound(0.0) <= g_half);
        assert!(audit_bound(&field, &k, 20_000).is_ok());
    }

    #[test]
    fn numeric_gradient_matches_analytic() {
        let analytic = PotentialTable::<f64>::gaussian_dimple(9.81);
        let numeric = PotentialTable::new(|x: f64, y: f64| x * y * (-x * x - y * y).exp(), 9.81);
        for &(x, y) in &[(0.3, -0.7), (1.5, 1.2), (-1.9, 0.1), (0.0, 0.0)] {
            let (a, b) = analytic.gradient(x, y);
            let (c, d) = numeric.gradient(x, y);
            assert_abs_diff_eq!(a, c, epsilon = 1e-8);
            assert_abs_diff_eq!(b, d, epsilon = 1e-8);
        }
    }

    #[test]
    fn audit_cases() {
        let k = unit2();
        let zero = ConstantField::new(vec![0.0, 0.0], 1.0).with_bound(1.0);
        let report = audit_bound(&zero, &k, 100).unwrap();
        assert_abs_diff_eq!(report.slack, 1.0);
        let strong = ConstantField::new(vec![2.0, 0.0], 1.0).with_bound(1.0);
        assert!(matches!(
            audit_bound(&strong, &k, 10),
            Err(Error::BoundViolation { .. })
        ));
    }

    #[test]
    fn affine_bound_from_vertices() {
        let k = BoxDomain::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        let f = AffineField::new(
            vec![vec![0.0, 1.0], vec![-1.0, 0.0]],
            vec![0.5, 0.0],
            1.0,
            &k,
        )
        .unwrap();
        // vertex (-1, 2): (2.5, 1)
        assert_abs_diff_eq!(f.bound(0.0), (2.5f64 * 2.5 + 1.0).sqrt());
        assert!(audit_bound(&f, &k, 5000).is_ok());
    }

    #[test]
    fn shifted_field_translates() {
        let f = Shifted::new(FirstCoordinate, vec![-2.0, 5.0]);
        assert_eq!(f.eval_vec(0.0, &[3.0, 1.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn bound_integral_of_profile() {
        struct Ramp;
        impl ForceField<f64> for Ramp {
            fn dim(&self) -> usize {
                1
            }
            fn horizon(&self) -> f64 {
                2.0
            }
            fn eval(&self, t: f64, _x: &[f64], out: &mut [f64]) {
                out[0] = t;
            }
            fn bound(&self, t: f64) -> f64 {
                t
            }
        }
        assert_abs_diff_eq!(Ramp.bound_integral(), 2.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn f_star_is_periodic(
            z0 in -10.0f64..10.0, z1 in -10.0f64..10.0,
            k0 in -5i32..5, k1 in -5i32..5,
        ) {
            let k = BoxDomain::anchored(vec![1.0, 2.0]).unwrap();
            let f = PotentialTable::gaussian_dimple(9.81);
            let field = table_force(f, &BoxDomain::anchored(vec![1.0, 2.0]).unwrap(), 1.0).unwrap();
            let a = extend_f_star(&field, &k, 0.0, &[z0, z1]);
            let b = extend_f_star(&field, &k, 0.0, &[z0 + 2.0 * k0 as f64, z1 + 4.0 * k1 as f64]);
            prop_assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        }

        #[test]
        fn f_star_reflection_antisymmetry(z0 in 0.01f64..0.99, z1 in -3.0f64..3.0) {
            let k = unit2();
            let field = ConstantField::new(vec![0.8, -0.3], 1.0);
            let a = extend_f_star(&field, &k, 0.0, &[z0, z1]);
            let b = extend_f_star(&field, &k, 0.0, &[2.0 - z0, z1]);
            prop_assert!((a[0] + b[0]).abs() < 1e-12);
        }

        #[test]
        fn g_star_dominated(z0 in -5.0f64..5.0, z1 in -5.0f64..5.0, m in 1u64..64) {
            let k = unit2();
            let field = FirstCoordinate;
            let g = g_star(&field, &k, 0.0, &[z0, z1], m);
            let f = extend_f_star(&field, &k, 0.0, &[z0, z1]);
            prop_assert!(norm(&g) <= norm(&f) + 1e-15);
            prop_assert!(norm(&f) <= 1.0);
        }
    }
}
