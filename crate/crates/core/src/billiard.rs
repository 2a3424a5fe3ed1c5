//! Folding a strictly monotone unfolded trajectory back into the box.
//!
//! Every time a component `zᵢ` crosses a multiple of `cᵢ`, the folded
//! trajectory `x = ψ(z)` hits the face `xᵢ ∈ {0, cᵢ}` and the `i`-th velocity
//! component flips sign. Crossings of several axes at the same instant become
//! one impact of higher multiplicity (an edge or a vertex of the box).

use serde::Serialize;

use crate::bvp::UnfoldedTrajectory;
use crate::domain::{floor_index, BoxDomain, Point};
use crate::error::{Error, Result};
use crate::forces::{ForceField, Shifted};
use crate::scalar::{dist, norm, Real};

/// Bisection steps allowed when refining a crossing time.
const REFINE_STEPS: usize = 50;

/// One impact with the boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpactEvent<S> {
    pub time: S,
    pub point: Vec<S>,
    /// Axes whose coordinate sits on a face, in increasing order.
    pub axes: Vec<usize>,
    pub v_pre: Vec<S>,
    pub v_post: Vec<S>,
}

impl<S: Real> ImpactEvent<S> {
    pub fn multiplicity(&self) -> usize {
        self.axes.len()
    }

    /// Largest deviation from `v_post = v_pre` with the impact axes negated.
    pub fn reflection_violation(&self) -> S {
        self.v_pre
            .iter()
            .zip(&self.v_post)
            .enumerate()
            .map(|(i, (&pre, &post))| {
                if self.axes.contains(&i) {
                    (post + pre).abs()
                } else {
                    (post - pre).abs()
                }
            })
            .fold(S::zero(), S::max)
    }
}

/// Smooth arc between two consecutive impacts.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub id: usize,
    /// Time interval `[start, end]`; impact times or `0` / `T`.
    pub start: S,
    pub end: S,
    pub times: Vec<S>,
    /// Folded positions, `n` per sample.
    pub positions: Vec<S>,
    /// Folded velocities, `n` per sample.
    pub velocities: Vec<S>,
    /// Source samples `(z, ż)` of the unfolded trajectory, when known.
    pub unfolded: Option<(Vec<S>, Vec<S>)>,
}

impl<S: Real> Segment<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Billiard trajectory in the anchored box `[0,c₁]×…×[0,cₙ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilliardSolution<S> {
    domain: BoxDomain<S>,
    horizon: S,
    pub segments: Vec<Segment<S>>,
    pub impacts: Vec<ImpactEvent<S>>,
    pub start: Point<S>,
    pub end: Point<S>,
    /// Offset `α` of the original box; add it to report original coordinates.
    pub shift: Point<S>,
}

impl<S: Real> BilliardSolution<S> {
    /// Assembles a solution from raw parts (e.g. read back from disk).
    pub fn from_parts(
        domain: BoxDomain<S>,
        horizon: S,
        segments: Vec<Segment<S>>,
        impacts: Vec<ImpactEvent<S>>,
        start: Point<S>,
        end: Point<S>,
        shift: Point<S>,
    ) -> Result<Self> {
        let n = domain.dim();
        for p in [&start, &end, &shift] {
            domain.check_dim(p.dim())?;
        }
        if segments.len() != impacts.len() + 1 {
            return Err(Error::InvalidConfig(format!(
                "{} segments cannot bracket {} impacts",
                segments.len(),
                impacts.len()
            )));
        }
        for seg in &segments {
            if seg.positions.len() != seg.times.len() * n
                || seg.velocities.len() != seg.times.len() * n
            {
                return Err(Error::DimensionMismatch {
                    expected: seg.times.len() * n,
                    got: seg.positions.len(),
                });
            }
        }
        Ok(BilliardSolution {
            domain,
            horizon,
            segments,
            impacts,
            start,
            end,
            shift,
        })
    }

    pub fn domain(&self) -> &BoxDomain<S> {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn horizon(&self) -> S {
        self.horizon
    }

    /// Number of impacts `p`.
    pub fn impact_count(&self) -> usize {
        self.impacts.len()
    }

    /// Impacts counted with multiplicity, `mult(x)`.
    pub fn total_multiplicity(&self) -> usize {
        self.impacts.iter().map(ImpactEvent::multiplicity).sum()
    }

    /// `ẋ(0+)`.
    pub fn initial_velocity(&self) -> Vec<S> {
        let n = self.dim();
        self.segments[0].velocities[..n].to_vec()
    }

    /// `x(0)` sample.
    pub fn initial_position(&self) -> Vec<S> {
        let n = self.dim();
        self.segments[0].positions[..n].to_vec()
    }

    /// `x(T)` sample.
    pub fn final_position(&self) -> Vec<S> {
        let n = self.dim();
        let last = self.segments.last().expect("at least one segment");
        last.positions[last.positions.len() - n..].to_vec()
    }

    /// Smallest sup distance between source unfolded samples, or `None` when
    /// either solution lacks them.
    pub fn unfolded_distance(&self, other: &Self) -> Option<S> {
        let collect = |s: &Self| -> Option<Vec<S>> {
            let mut out = Vec::new();
            for seg in &s.segments {
                out.extend_from_slice(&seg.unfolded.as_ref()?.0);
            }
            Some(out)
        };
        let (a, b) = (collect(self)?, collect(other)?);
        if a.len() != b.len() {
            return None;
        }
        let n = self.dim();
        Some(
            a.chunks(n)
                .zip(b.chunks(n))
                .map(|(x, y)| dist(x, y))
                .fold(S::zero(), S::max),
        )
    }
}

/// Per-axis and total impact counts implied by the unfolded endpoints:
/// `Σᵢ |⌊zᵢ(0)/cᵢ⌋ − ⌊zᵢ(T)/cᵢ⌋|` and the per-axis terms.
pub fn impact_count_formula<S: Real>(
    domain: &BoxDomain<S>,
    z0: &[S],
    z_t: &[S],
) -> Result<(usize, Vec<usize>)> {
    let mut per_axis = Vec::with_capacity(domain.dim());
    for axis in 0..domain.dim() {
        let a = domain
            .cell_index(axis, z0[axis])
            .map_err(|_| Error::EndpointOnGridLine { axis })?;
        let b = domain
            .cell_index(axis, z_t[axis])
            .map_err(|_| Error::EndpointOnGridLine { axis })?;
        per_axis.push((a - b).unsigned_abs() as usize);
    }
    Ok((per_axis.iter().sum(), per_axis))
}

/// One grid-line crossing of one axis.
#[derive(Debug, Clone, Copy)]
struct Crossing<S> {
    time: S,
    axis: usize,
    line: i64,
    increasing: bool,
}

/// Axis sign of a component: `+1` when increasing, `-1` when decreasing.
fn axis_direction<S: Real>(traj: &UnfoldedTrajectory<S>, axis: usize) -> Result<bool> {
    let grid = traj.grid();
    let increasing = traj.deriv(0)[axis] > S::zero();
    for k in 0..grid.len() {
        let d = traj.deriv(k)[axis];
        let ok = if increasing {
            d > S::zero()
        } else {
            d < S::zero()
        };
        let step_ok = k == 0 || {
            let (a, b) = (traj.value(k - 1)[axis], traj.value(k)[axis]);
            if increasing {
                b > a
            } else {
                b < a
            }
        };
        if !ok || !step_ok {
            return Err(Error::MonotonicityLost {
                axis,
                time: grid.node(k).as_f64(),
            });
        }
    }
    Ok(increasing)
}

fn axis_crossings<S: Real>(
    traj: &UnfoldedTrajectory<S>,
    domain: &BoxDomain<S>,
    axis: usize,
) -> Result<Vec<Crossing<S>>> {
    let grid = traj.grid();
    let c = domain.edge(axis);
    let tol = domain.grid_tol(axis);
    let increasing = axis_direction(traj, axis)?;
    let z0 = traj.value(0)[axis];
    let z1 = traj.value(grid.intervals())[axis];
    let (lo, hi) = if increasing { (z0, z1) } else { (z1, z0) };
    let first = floor_index(lo / c) + 1;
    let last = (hi / c).ceil().to_i64().expect("cell index fits in i64") - 1;
    let values: Vec<S> = (0..grid.len()).map(|k| traj.value(k)[axis]).collect();

    let mut lines: Vec<i64> = (first..=last).collect();
    if !increasing {
        lines.reverse();
    }
    let mut out = Vec::with_capacity(lines.len());
    for line in lines {
        let level = S::from_i64(line).expect("line index representable") * c;
        // first node at or beyond the line
        let idx = if increasing {
            values.partition_point(|&v| v < level)
        } else {
            values.partition_point(|&v| v > level)
        };
        let k = idx.clamp(1, grid.intervals()) - 1;
        let signed = |v: S| if increasing { v - level } else { level - v };
        let (mut a, mut b) = (S::zero(), S::one());
        let mut u = S::one();
        if signed(values[k + 1]) != S::zero() {
            for _ in 0..REFINE_STEPS {
                u = (a + b) / S::lit(2.0);
                let (v, _) = traj.hermite(axis, k, u);
                let r = signed(v);
                if r.abs() <= tol {
                    break;
                }
                if r < S::zero() {
                    a = u;
                } else {
                    b = u;
                }
            }
        }
        let time = grid.node(k) + u * grid.step();
        if let Some(prev) = out.last().map(|c: &Crossing<S>| c.time) {
            if time <= prev {
                return Err(Error::MonotonicityLost {
                    axis,
                    time: time.as_f64(),
                });
            }
        }
        out.push(Crossing {
            time,
            axis,
            line,
            increasing,
        });
    }
    Ok(out)
}

/// Times at which each component crosses a multiple of its edge length,
/// sorted per axis. The count on axis `i` equals `|⌊zᵢ(0)/cᵢ⌋ − ⌊zᵢ(T)/cᵢ⌋|`.
pub fn locate_crossings<S: Real>(
    traj: &UnfoldedTrajectory<S>,
    domain: &BoxDomain<S>,
) -> Result<Vec<Vec<S>>> {
    domain.check_dim(traj.dim())?;
    (0..traj.dim())
        .map(|axis| {
            Ok(axis_crossings(traj, domain, axis)?
                .iter()
                .map(|c| c.time)
                .collect())
        })
        .collect()
}

fn parity_sign<S: Real>(cell: i64) -> S {
    if cell.rem_euclid(2) == 0 {
        S::one()
    } else {
        -S::one()
    }
}

/// Folds `traj` into the box, producing impacts and smooth segments.
///
/// Crossings of different axes closer than `merge_tol` in time are merged into
/// one impact. `traj` lives in the anchored frame; `shift` is stored for
/// reporting.
pub fn fold_trajectory<S: Real>(
    traj: &UnfoldedTrajectory<S>,
    domain: &BoxDomain<S>,
    merge_tol: S,
    shift: &[S],
) -> Result<BilliardSolution<S>> {
    let n = traj.dim();
    domain.check_dim(n)?;
    domain.check_dim(shift.len())?;
    let grid = *traj.grid();
    let z0 = traj.value(0).to_vec();
    let z_t = traj.value(grid.intervals()).to_vec();
    impact_count_formula(domain, &z0, &z_t)?;

    let mut crossings = Vec::new();
    for axis in 0..n {
        crossings.extend(axis_crossings(traj, domain, axis)?);
    }
    crossings.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("finite crossing times"));

    let mut groups: Vec<Vec<Crossing<S>>> = Vec::new();
    for c in crossings {
        match groups.last_mut() {
            Some(g) if c.time - g[0].time <= merge_tol => {
                if g.iter().any(|o| o.axis == c.axis) {
                    return Err(Error::MonotonicityLost {
                        axis: c.axis,
                        time: c.time.as_f64(),
                    });
                }
                g.push(c);
            }
            _ => groups.push(vec![c]),
        }
    }

    let mut signs: Vec<S> = (0..n)
        .map(|i| parity_sign(floor_index(z0[i] / domain.edge(i))))
        .collect();
    let mut segment_signs = vec![signs.clone()];
    let mut impacts = Vec::with_capacity(groups.len());
    for group in &groups {
        let time = group.iter().map(|c| c.time).sum::<S>() / S::from_count(group.len());
        let (k, u) = traj.locate(time);
        let mut point = Vec::with_capacity(n);
        let mut v_pre = Vec::with_capacity(n);
        let mut v_post = Vec::with_capacity(n);
        let mut after = signs.clone();
        for i in 0..n {
            let (z, dz) = traj.hermite(i, k, u);
            match group.iter().find(|c| c.axis == i) {
                Some(c) => {
                    point.push(if c.line.rem_euclid(2) == 0 {
                        S::zero()
                    } else {
                        domain.edge(i)
                    });
                    let after_cell = if c.increasing { c.line } else { c.line - 1 };
                    after[i] = parity_sign(after_cell);
                }
                None => point.push(domain.delta(i, z)),
            }
            v_pre.push(signs[i] * dz);
            v_post.push(after[i] * dz);
        }
        let mut axes: Vec<usize> = group.iter().map(|c| c.axis).collect();
        axes.sort_unstable();
        impacts.push(ImpactEvent {
            time,
            point,
            axes,
            v_pre,
            v_post,
        });
        signs = after;
        segment_signs.push(signs.clone());
    }

    let mut bounds = vec![S::zero()];
    bounds.extend(impacts.iter().map(|e| e.time));
    bounds.push(grid.horizon());
    let mut segments: Vec<Segment<S>> = (0..=impacts.len())
        .map(|id| Segment {
            id,
            start: bounds[id],
            end: bounds[id + 1],
            times: Vec::new(),
            positions: Vec::new(),
            velocities: Vec::new(),
            unfolded: Some((Vec::new(), Vec::new())),
        })
        .collect();
    for k in 0..grid.len() {
        let t = grid.node(k);
        let id = impacts.partition_point(|e| e.time <= t);
        let seg = &mut segments[id];
        let z = traj.value(k);
        let dz = traj.deriv(k);
        seg.times.push(t);
        seg.positions.extend(domain.fold(z).iter());
        seg.velocities
            .extend(dz.iter().zip(&segment_signs[id]).map(|(&d, &s)| s * d));
        let src = seg.unfolded.as_mut().expect("constructed with samples");
        src.0.extend_from_slice(z);
        src.1.extend_from_slice(dz);
    }

    BilliardSolution::from_parts(
        domain.clone(),
        grid.horizon(),
        segments,
        impacts,
        domain.fold(&z0),
        domain.fold(&z_t),
        Point::from(shift),
    )
}

/// Residual checks of a billiard solution.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// Largest `‖ẍ − f(t,x)‖` from second differences at interior nodes.
    pub ode_residual: f64,
    /// Largest deviation from the reflection law over all impacts.
    pub reflection_violation: f64,
    /// Largest relative change of speed across an impact.
    pub speed_change: f64,
    pub start_error: f64,
    pub end_error: f64,
    /// Largest distance of a sample outside the box.
    pub containment_error: f64,
    /// Samples on the boundary away from every impact time.
    pub stray_boundary_samples: usize,
    /// Sample spacing at which boundary contact is certified.
    pub resolution: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that `sol` solves the impact problem for `field`, which is given in
/// original box coordinates.
pub fn verify_solution<S: Real, F: ForceField<S> + ?Sized>(
    sol: &BilliardSolution<S>,
    field: &F,
    tol: S,
) -> VerificationReport {
    let n = sol.dim();
    let local = Shifted::new(field, sol.shift.to_vec());
    let domain = &sol.domain;
    let mut ode = S::zero();
    let mut resolution = S::zero();
    let mut out = vec![S::zero(); n];
    let mut containment = S::zero();
    let mut stray = 0;
    let edge_tol = domain.min_edge() * S::grid_rel_tol();
    let impact_tol = sol.horizon * S::lit(1e-8);

    for seg in &sol.segments {
        let times = &seg.times;
        for w in times.windows(2) {
            resolution = resolution.max(w[1] - w[0]);
        }
        for (j, &t) in times.iter().enumerate() {
            let x = &seg.positions[j * n..(j + 1) * n];
            for i in 0..n {
                containment = containment.max(-x[i]).max(x[i] - domain.edge(i));
            }
            let touches = (0..n).any(|i| x[i] <= edge_tol || x[i] >= domain.edge(i) - edge_tol);
            let at_impact = sol.impacts.iter().any(|e| (e.time - t).abs() <= impact_tol);
            if touches && !at_impact {
                stray += 1;
            }
            if j == 0 || j + 1 == times.len() {
                continue;
            }
            let (hm, hp) = (t - times[j - 1], times[j + 1] - t);
            let window = S::lit(crate::bvp::CROSSING_EXCLUSION_STEPS) * hm.max(hp);
            let near_impact = (seg.id > 0 && t - seg.start <= window)
                || (seg.id + 1 < sol.segments.len() && seg.end - t <= window);
            if near_impact {
                continue;
            }
            let xm = &seg.positions[(j - 1) * n..j * n];
            let xp = &seg.positions[(j + 1) * n..(j + 2) * n];
            local.eval(t, x, &mut out);
            let two = S::lit(2.0);
            let mut r2 = S::zero();
            for i in 0..n {
                let acc = two * ((xp[i] - x[i]) / hp - (x[i] - xm[i]) / hm) / (hm + hp);
                r2 += (acc - out[i]) * (acc - out[i]);
            }
            ode = ode.max(r2.sqrt());
        }
    }

    let mut reflection = S::zero();
    let mut speed = S::zero();
    for e in &sol.impacts {
        reflection = reflection.max(e.reflection_violation());
        let (a, b) = (norm(&e.v_pre), norm(&e.v_post));
        if a > S::zero() {
            speed = speed.max((a - b).abs() / a);
        }
    }
    let start_error = dist(&sol.initial_position(), &sol.start);
    let end_error = dist(&sol.final_position(), &sol.end);

    let pass = [ode, reflection, start_error, end_error, containment]
        .iter()
        .all(|&v| v <= tol)
        && stray == 0;
    VerificationReport {
        ode_residual: ode.as_f64(),
        reflection_violation: reflection.as_f64(),
        speed_change: speed.as_f64(),
        start_error: start_error.as_f64(),
        end_error: end_error.as_f64(),
        containment_error: containment.max(S::zero()).as_f64(),
        stray_boundary_samples: stray,
        resolution: resolution.as_f64(),
        tolerance: tol.as_f64(),
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::TimeGrid;
    use crate::forces::ZeroField;
    use approx::assert_abs_diff_eq;

    fn line(n_int: usize, a: &[f64], b: &[f64]) -> UnfoldedTrajectory<f64> {
        UnfoldedTrajectory::straight_line(TimeGrid::new(1.0, n_int).unwrap(), a, b)
    }

    #[test]
    fn one_dimensional_crossings() {
        let k = BoxDomain::unit(1).unwrap();
        let z = line(64, &[0.5], &[2.5]);
        let c = locate_crossings(&z, &k).unwrap();
        assert_eq!(c[0].len(), 2);
        assert_abs_diff_eq!(c[0][0], 0.25, epsilon = 1e-9);
        assert_abs_diff_eq!(c[0][1], 0.75, epsilon = 1e-9);
    }

    #[test]
    fn free_branch_crossings_and_counts() {
        let k = BoxDomain::unit(2).unwrap();
        let z = line(90, &[0.25, 0.25], &[2.75, 2.5]);
        let c = locate_crossings(&z, &k).unwrap();
        assert_abs_diff_eq!(c[0][0], 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(c[0][1], 0.7, epsilon = 1e-9);
        assert_abs_diff_eq!(c[1][0], 1.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c[1][1], 7.0 / 9.0, epsilon = 1e-9);
        for axis in 0..2 {
            let expected = (k.cell_index(axis, z.value(0)[axis]).unwrap()
                - k.cell_index(axis, z.value(90)[axis]).unwrap())
            .unsigned_abs() as usize;
            assert_eq!(c[axis].len(), expected);
        }

        let sol = fold_trajectory(&z, &k, 1e-8, &[0.0, 0.0]).unwrap();
        assert_eq!(sol.total_multiplicity(), 4);
        assert_eq!(sol.impact_count(), 4);
        assert!(sol.impacts.iter().all(|e| e.multiplicity() == 1));
        let times: Vec<f64> = sol.impacts.iter().map(|e| e.time).collect();
        assert!(times.windows(2).all(|w| w[0] < w[1]));
        assert!(times[0] > 0.0 && times[3] < 1.0);
        assert_eq!(
            impact_count_formula(&k, &[0.25, 0.25], &[2.75, 2.5])
                .unwrap()
                .0,
            4
        );
        let report = verify_solution(&sol, &ZeroField::new(2, 1.0), 1e-10);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn decreasing_component_crossings() {
        let k = BoxDomain::unit(1).unwrap();
        let z = line(40, &[0.5], &[-1.5]);
        let c = locate_crossings(&z, &k).unwrap();
        assert_eq!(c[0].len(), 2);
        assert_abs_diff_eq!(c[0][0], 0.25, epsilon = 1e-9);
        assert_abs_diff_eq!(c[0][1], 0.75, epsilon = 1e-9);
        let sol = fold_trajectory(&z, &k, 1e-8, &[0.0]).unwrap();
        assert_eq!(sol.impacts[0].point, vec![0.0]);
        assert_eq!(sol.impacts[1].point, vec![1.0]);
        assert_abs_diff_eq!(sol.impacts[0].v_pre[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.impacts[0].v_post[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.final_position()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn corner_impact_merges() {
        let k = BoxDomain::unit(2).unwrap();
        let z = line(64, &[0.5, 0.5], &[1.5, 1.5]);
        let sol = fold_trajectory(&z, &k, 1e-8, &[0.0, 0.0]).unwrap();
        assert_eq!(sol.impact_count(), 1);
        assert_eq!(sol.total_multiplicity(), 2);
        let e = &sol.impacts[0];
        assert_abs_diff_eq!(e.time, 0.5, epsilon = 1e-9);
        assert_eq!(e.point, vec![1.0, 1.0]);
        assert_eq!(e.v_post, vec![-e.v_pre[0], -e.v_pre[1]]);
    }

    #[test]
    fn endpoint_on_grid_line_rejected() {
        let k = BoxDomain::unit(1).unwrap();
        let z = line(8, &[0.5], &[2.0]);
        assert_eq!(
            fold_trajectory(&z, &k, 1e-8, &[0.0]).unwrap_err(),
            Error::EndpointOnGridLine { axis: 0 }
        );
    }

    #[test]
    fn fold_commutes_with_samples() {
        let k = BoxDomain::anchored(vec![1.0, 2.0]).unwrap();
        let z = line(32, &[0.3, 1.1], &[-2.9, 7.7]);
        let sol = fold_trajectory(&z, &k, 1e-8, &[0.0, 0.0]).unwrap();
        let mut node = 0;
        for seg in &sol.segments {
            for j in 0..seg.len() {
                assert_eq!(
                    &seg.positions[2 * j..2 * j + 2],
                    &k.fold(z.value(node)).0[..]
                );
                node += 1;
            }
        }
        assert_eq!(node, 33);
        assert!(sol.impact_count() <= sol.total_multiplicity());
        assert!(sol.total_multiplicity() <= 2 * sol.impact_count());
    }

    #[test]
    fn corrupted_reflection_detected() {
        let k = BoxDomain::unit(1).unwrap();
        let z = line(32, &[0.5], &[2.5]);
        let mut sol = fold_trajectory(&z, &k, 1e-8, &[0.0]).unwrap();
        sol.impacts[0].v_post = sol.impacts[0].v_pre.clone();
        let report = verify_solution(&sol, &ZeroField::new(1, 1.0), 1e-10);
        assert_abs_diff_eq!(report.reflection_violation, 4.0, epsilon = 1e-12);
        assert!(!report.pass);
    }

    #[test]
    fn non_monotone_input_rejected() {
        let k = BoxDomain::unit(1).unwrap();
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let values = vec![0.5, 1.5, 1.2, 1.8, 2.5];
        let derivs = vec![1.0, 1.0, -1.0, 1.0, 1.0];
        let z = UnfoldedTrajectory::from_samples(
            grid,
            vec![0.5].into(),
            vec![2.5].into(),
            values,
            derivs,
        )
        .unwrap();
        assert!(matches!(
            locate_crossings(&z, &k),
            Err(Error::MonotonicityLost { axis: 0, .. })
        ));
    }
}
