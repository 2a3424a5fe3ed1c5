//! Box geometry and the folding primitives of the mirrored-cell mosaic.
//!
//! A box `K = [α₁,β₁]×…×[αₙ,βₙ]` is translated to the origin-anchored box
//! `[0,c₁]×…×[0,cₙ]`; the real line on each axis is then tiled by copies of
//! `[0,cᵢ]`, alternately mirrored. [`BoxDomain::delta`] maps a coordinate of
//! that tiling back into the fundamental cell and [`BoxDomain::theta`] gives the
//! orientation of the copy it lives in.
//!
//! Axis indices are zero-based throughout.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point (or vector) in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<S>(pub Vec<S>);

impl<S: Real> Point<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Point(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![S::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> S {
        crate::scalar::norm(&self.0)
    }

    pub fn into_inner(self) -> Vec<S> {
        self.0
    }
}

impl<S> Deref for Point<S> {
    type Target = [S];
    fn deref(&self) -> &[S] {
        &self.0
    }
}

impl<S> DerefMut for Point<S> {
    fn deref_mut(&mut self) -> &mut [S] {
        &mut self.0
    }
}

impl<S> From<Vec<S>> for Point<S> {
    fn from(v: Vec<S>) -> Self {
        Point(v)
    }
}

impl<S: Clone> From<&[S]> for Point<S> {
    fn from(v: &[S]) -> Self {
        Point(v.to_vec())
    }
}

/// Sign of the copy of `[0,cᵢ]` containing a coordinate, or `Zero` on a grid line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Reversed,
    Zero,
    Forward,
}

impl Orientation {
    pub fn signum<S: Real>(self) -> S {
        match self {
            Orientation::Reversed => -S::one(),
            Orientation::Zero => S::zero(),
            Orientation::Forward => S::one(),
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Orientation::Reversed => -1,
            Orientation::Zero => 0,
            Orientation::Forward => 1,
        }
    }
}

/// Axis-aligned billiard box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain<S> {
    lower: Vec<S>,
    upper: Vec<S>,
    edges: Vec<S>,
}

impl<S: Real> BoxDomain<S> {
    /// Box `[lower₁,upper₁]×…×[lowerₙ,upperₙ]`.
    pub fn new(lower: Vec<S>, upper: Vec<S>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidConfig(
                "box dimension must be positive".into(),
            ));
        }
        for (axis, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidBox {
                    axis,
                    lower: lo.as_f64(),
                    upper: hi.as_f64(),
                });
            }
        }
        let edges = lower.iter().zip(&upper).map(|(&lo, &hi)| hi - lo).collect();
        Ok(BoxDomain {
            lower,
            upper,
            edges,
        })
    }

    /// Origin-anchored box `[0,c₁]×…×[0,cₙ]`.
    pub fn anchored(edges: Vec<S>) -> Result<Self> {
        BoxDomain::new(vec![S::zero(); edges.len()], edges)
    }

    /// Unit cube `[0,1]ⁿ`.
    pub fn unit(n: usize) -> Result<Self> {
        BoxDomain::anchored(vec![S::one(); n])
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn lower(&self) -> &[S] {
        &self.lower
    }

    pub fn upper(&self) -> &[S] {
        &self.upper
    }

    pub fn edges(&self) -> &[S] {
        &self.edges
    }

    pub fn edge(&self, axis: usize) -> S {
        self.edges[axis]
    }

    pub fn min_edge(&self) -> S {
        self.edges.iter().copied().fold(S::infinity(), S::min)
    }

    pub fn diameter(&self) -> S {
        crate::scalar::norm(&self.edges)
    }

    pub fn is_anchored(&self) -> bool {
        self.lower.iter().all(|&a| a == S::zero())
    }

    /// `ε_grid` for one axis: `1e-9 · cᵢ`.
    pub fn grid_tol(&self, axis: usize) -> S {
        S::grid_rel_tol() * self.edges[axis]
    }

    /// Margin used for the strict-interiority test: `1e-9 · min cᵢ`.
    pub fn interior_margin(&self) -> S {
        S::grid_rel_tol() * self.min_edge()
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dim() {
            Ok(())
        } else {
            Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim(),
            })
        }
    }

    pub fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            })
        }
    }

    /// Closed-box membership with absolute slack `tol` on every face.
    pub fn contains(&self, x: &[S], tol: S) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&xi, (&lo, &hi))| xi >= lo - tol && xi <= hi + tol)
    }

    /// Checks `x` is at least `interior_margin` away from every face.
    pub fn check_interior(&self, which: &'static str, x: &[S]) -> Result<()> {
        self.check_dim(x.len())?;
        let margin = self.interior_margin();
        for (axis, &xi) in x.iter().enumerate() {
            if !(xi > self.lower[axis] + margin && xi < self.upper[axis] - margin) {
                return Err(Error::NotInterior {
                    which,
                    axis,
                    value: xi.as_f64(),
                });
            }
        }
        Ok(())
    }

    /// `s mod 2cᵢ`, always in `[0, 2cᵢ)`.
    pub fn mod_double(&self, axis: usize, s: S) -> S {
        wrap(s, self.edges[axis] + self.edges[axis])
    }

    /// `s mod cᵢ`, always in `[0, cᵢ)`.
    pub fn mod_edge(&self, axis: usize, s: S) -> S {
        wrap(s, self.edges[axis])
    }

    /// True when `s` is within `ε_grid` of a multiple of `cᵢ`.
    pub fn on_grid_line(&self, axis: usize, s: S) -> bool {
        let c = self.edges[axis];
        let r = wrap(s, c);
        let tol = self.grid_tol(axis);
        r <= tol || c - r <= tol
    }

    /// Orientation θᵢ(s) of the mirrored copy containing `s`.
    pub fn theta(&self, axis: usize, s: S) -> Orientation {
        if self.on_grid_line(axis, s) {
            Orientation::Zero
        } else if self.mod_double(axis, s) < self.edges[axis] {
            Orientation::Forward
        } else {
            Orientation::Reversed
        }
    }

    /// Triangle wave Δᵢ(s) ∈ `[0, cᵢ]`: even, `2cᵢ`-periodic, slope ±1.
    pub fn delta(&self, axis: usize, s: S) -> S {
        let c = self.edges[axis];
        let r = self.mod_double(axis, s);
        if r < c {
            r
        } else {
            c + c - r
        }
    }

    /// Componentwise fold ψ into the anchored box.
    pub fn fold(&self, z: &[S]) -> Point<S> {
        Point(
            z.iter()
                .enumerate()
                .map(|(i, &s)| self.delta(i, s))
                .collect(),
        )
    }

    pub(crate) fn fold_into(&self, z: &[S], out: &mut [S]) {
        for (i, (o, &s)) in out.iter_mut().zip(z).enumerate() {
            *o = self.delta(i, s);
        }
    }

    /// Index ⌊s / cᵢ⌋ of the cell containing `s`; grid-line values are rejected.
    pub fn cell_index(&self, axis: usize, s: S) -> Result<i64> {
        if self.on_grid_line(axis, s) {
            return Err(Error::GridLine {
                axis,
                value: s.as_f64(),
            });
        }
        Ok(floor_index(s / self.edges[axis]))
    }

    /// Translates into the anchored frame: `x - α`.
    pub fn to_anchored(&self, x: &[S]) -> Point<S> {
        Point(x.iter().zip(&self.lower).map(|(&xi, &a)| xi - a).collect())
    }

    /// Translates back from the anchored frame: `x + α`.
    pub fn from_anchored(&self, x: &[S]) -> Point<S> {
        Point(x.iter().zip(&self.lower).map(|(&xi, &a)| xi + a).collect())
    }
}

pub(crate) fn floor_index<S: Real>(x: S) -> i64 {
    x.floor().to_i64().expect("cell index fits in i64")
}

fn wrap<S: Real>(s: S, period: S) -> S {
    let r = s - period * (s / period).floor();
    if r < S::zero() {
        S::zero()
    } else if r >= period {
        r - period
    } else {
        r
    }
}

/// Problem data after translation to the anchored box.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized<S> {
    pub domain: BoxDomain<S>,
    pub start: Point<S>,
    pub end: Point<S>,
    /// `α`; add it to map anchored results back to the original box.
    pub shift: Point<S>,
}

/// Shifts the box, `A` and `B` by `-α` so the box becomes `[0,c₁]×…×[0,cₙ]`.
pub fn normalize<S: Real>(domain: &BoxDomain<S>, a: &[S], b: &[S]) -> Result<Normalized<S>> {
    domain.check_interior("A", a)?;
    domain.check_interior("B", b)?;
    Ok(Normalized {
        domain: BoxDomain::anchored(domain.edges.clone())?,
        start: domain.to_anchored(a),
        end: domain.to_anchored(b),
        shift: Point(domain.lower.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit1() -> BoxDomain<f64> {
        BoxDomain::unit(1).unwrap()
    }

    #[test]
    fn normalize_symmetric_square() {
        let k = BoxDomain::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let n = normalize(&k, &[-1.0, 0.5], &[0.0, 0.0]).unwrap();
        assert_eq!(n.domain.upper(), &[4.0, 4.0]);
        assert_eq!(n.start.0, vec![1.0, 2.5]);
        assert_eq!(n.shift.0, vec![-2.0, -2.0]);
    }

    #[test]
    fn normalize_unit_box_is_identity() {
        let k = BoxDomain::<f64>::unit(3).unwrap();
        let a = [0.1, 0.2, 0.9];
        let n = normalize(&k, &a, &a).unwrap();
        assert_eq!(n.start.0, a.to_vec());
        assert_eq!(n.shift.0, vec![0.0; 3]);
        assert_eq!(n.domain, k);
    }

    #[test]
    fn normalize_rectangle() {
        let k = BoxDomain::new(vec![1.0, -1.0], vec![3.0, 4.0]).unwrap();
        let n = normalize(&k, &[2.0, 2.0], &[2.0, 0.0]).unwrap();
        assert_eq!(n.end.0, vec![1.0, 1.0]);
        assert_eq!(n.domain.edges(), &[2.0, 5.0]);
    }

    #[test]
    fn normalize_rejects_boundary_points() {
        let k = BoxDomain::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let err = normalize(&k, &[-2.0, 0.0], &[0.0, 0.0]).unwrap_err();
        assert!(matches!(
            err,
            Error::NotInterior {
                which: "A",
                axis: 0,
                ..
            }
        ));
        let err = normalize(&k, &[0.0, 0.0], &[0.0, 5.0]).unwrap_err();
        assert!(matches!(
            err,
            Error::NotInterior {
                which: "B",
                axis: 1,
                ..
            }
        ));
    }

    #[test]
    fn degenerate_box_rejected() {
        assert!(matches!(
            BoxDomain::new(vec![0.0, 1.0], vec![1.0, 1.0]),
            Err(Error::InvalidBox { axis: 1, .. })
        ));
    }

    #[test]
    fn theta_values() {
        let k = unit1();
        assert_eq!(k.theta(0, 0.5), Orientation::Forward);
        assert_eq!(k.theta(0, 1.5), Orientation::Reversed);
        assert_eq!(k.theta(0, 2.0), Orientation::Zero);
        assert_eq!(k.theta(0, -0.5), Orientation::Reversed);
    }

    #[test]
    fn delta_values() {
        let k = unit1();
        assert_abs_diff_eq!(k.delta(0, 0.25), 0.25);
        assert_abs_diff_eq!(k.delta(0, 1.25), 0.75);
        assert_abs_diff_eq!(k.delta(0, -0.25), 0.25);
        assert_abs_diff_eq!(k.delta(0, 2.25), 0.25);
    }

    #[test]
    fn fold_values() {
        let k = BoxDomain::<f64>::unit(2).unwrap();
        assert_eq!(k.fold(&[0.3, 0.4]).0, vec![0.3, 0.4]);
        assert_eq!(k.fold(&[1.5, 2.5]).0, vec![0.5, 0.5]);
        assert_eq!(k.fold(&[2.0, 3.0]).0, vec![0.0, 1.0]);
    }

    #[test]
    fn cell_index_values() {
        let k = unit1();
        assert_eq!(k.cell_index(0, 2.75).unwrap(), 2);
        assert_eq!(k.cell_index(0, -0.25).unwrap(), -1);
        assert!(matches!(
            k.cell_index(0, 3.0),
            Err(Error::GridLine { axis: 0, .. })
        ));
    }

    #[test]
    fn single_precision_folding() {
        let k = BoxDomain::<f32>::anchored(vec![2.0]).unwrap();
        assert_eq!(k.delta(0, 5.5), 1.5);
        assert_eq!(k.theta(0, 5.5), Orientation::Forward);
        assert_eq!(k.delta(0, 6.5), 1.5);
        assert_eq!(k.theta(0, 6.5), Orientation::Reversed);
        assert_eq!(k.theta(0, 4.0), Orientation::Zero);
    }

    proptest! {
        #[test]
        fn delta_range_period_even(s in -50.0f64..50.0, c in 0.1f64..5.0) {
            let k = BoxDomain::anchored(vec![c]).unwrap();
            let d = k.delta(0, s);
            prop_assert!(d >= 0.0 && d <= c);
            prop_assert!((k.delta(0, s + 2.0 * c) - d).abs() < 1e-9 * (1.0 + s.abs()));
            prop_assert!((k.delta(0, -s) - d).abs() < 1e-9 * (1.0 + s.abs()));
        }

        #[test]
        fn delta_is_one_lipschitz(s in -20.0f64..20.0, t in -20.0f64..20.0, c in 0.1f64..5.0) {
            let k = BoxDomain::anchored(vec![c]).unwrap();
            prop_assert!((k.delta(0, s) - k.delta(0, t)).abs() <= (s - t).abs() + 1e-12 * (1.0 + s.abs() + t.abs()));
        }

        #[test]
        fn theta_is_slope_of_delta(s in -20.0f64..20.0, c in 0.5f64..3.0) {
            let k = BoxDomain::anchored(vec![c]).unwrap();
            let h = 1e-7;
            // skip points whose finite-difference stencil straddles a grid line
            let r = k.mod_edge(0, s);
            prop_assume!(r > 10.0 * h && c - r > 10.0 * h);
            let slope = (k.delta(0, s + h) - k.delta(0, s - h)) / (2.0 * h);
            prop_assert!((slope - k.theta(0, s).signum::<f64>()).abs() < 1e-5);
        }

        #[test]
        fn fold_fixes_fundamental_cell(x in 0.0f64..1.0, y in 0.0f64..2.0) {
            let k = BoxDomain::anchored(vec![1.0, 2.0]).unwrap();
            let z = k.fold(&[x, y]);
            prop_assert_eq!(z.0, vec![x, y]);
        }
    }
}
