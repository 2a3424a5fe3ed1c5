use serde::Serialize;

use super::anderson::Anderson;
use super::{apply_into, TimeGrid, UnfoldedTrajectory, Workspace};
use crate::billiard::locate_crossings;
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::forces::{extend_f_star_into, ForceField};
use crate::scalar::{norm, Real};

/// Discretization and iteration controls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig<S> {
    /// Grid intervals `N` (even).
    pub intervals: usize,
    /// Fixed-point tolerance on `‖y − T_m y‖_sup`.
    pub tol_fp: S,
    pub max_iter: usize,
    /// Damping `λ ∈ (0, 1]` in `y ← (1−λ) y + λ T_m y`.
    pub damping: S,
    /// Extrapolation window; 0 disables it.
    pub anderson_depth: usize,
    /// Strictly increasing regularization levels, each warm-started from the last.
    pub m_schedule: Vec<u64>,
    /// Tolerance of the integrated-equation check on the final iterate.
    pub tol_residual: S,
    /// Keep raising `m` past the schedule until every ramp zone fits inside
    /// the window excluded around grid-line crossings.
    pub resolve_ramps: bool,
}

impl<S: Real> Default for SolverConfig<S> {
    fn default() -> Self {
        SolverConfig {
            intervals: 1024,
            tol_fp: S::lit(1e-10),
            max_iter: 500,
            damping: S::lit(0.5),
            anderson_depth: 3,
            m_schedule: vec![4, 8, 16, 32, 64, 128],
            tol_residual: S::lit(1e-6),
            resolve_ramps: true,
        }
    }
}

impl<S: Real> SolverConfig<S> {
    pub fn with_intervals(mut self, intervals: usize) -> Self {
        self.intervals = intervals;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.intervals < 2 || !self.intervals.is_multiple_of(2) {
            return bad("N must be even and at least 2");
        }
        if !(self.tol_fp > S::zero()) || !(self.tol_residual > S::zero()) {
            return bad("tolerances must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive");
        }
        if !(self.damping > S::zero() && self.damping <= S::one()) {
            return bad("damping must lie in (0, 1]");
        }
        if self.m_schedule.is_empty() || self.m_schedule[0] == 0 {
            return bad("m_schedule must be non-empty with levels >= 1");
        }
        if self.m_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return bad("m_schedule must be strictly increasing");
        }
        Ok(())
    }
}

/// Fixed point of `T_m` at one regularization level.
#[derive(Debug, Clone)]
pub struct RegularizedSolve<S> {
    /// `T_m y*` for the accepted iterate `y*`: its derivative samples are the
    /// operator's own, and its values are within `tol_fp` of `y*`.
    pub trajectory: UnfoldedTrajectory<S>,
    pub iterations: usize,
    pub residual: S,
    /// Iterates that left `‖y‖ ≤ ‖A‖+‖z_T‖+T m̄` or `‖ẏ − (z_T−A)/T‖ ≤ m̄`.
    pub bound_violations: usize,
    /// Largest `‖y‖_sup` over all iterates.
    pub max_norm: S,
    /// Largest `max_k ‖ẏ(t_k) − (z_T−A)/T‖` over all iterates.
    pub max_velocity_deviation: S,
}

struct Bounds<S> {
    norm: S,
    velocity: S,
    mean: Vec<S>,
}

impl<S: Real> Bounds<S> {
    fn new(start: &[S], target: &[S], horizon: S, m_bar: S) -> Self {
        let slack = S::grid_rel_tol();
        let norm_bound = norm(start) + norm(target) + horizon * m_bar;
        Bounds {
            norm: norm_bound + slack * (S::one() + norm_bound),
            velocity: m_bar + slack * (S::one() + m_bar),
            mean: start
                .iter()
                .zip(target)
                .map(|(&a, &b)| (b - a) / horizon)
                .collect(),
        }
    }

    /// Returns `(sup norm, sup velocity deviation)`.
    fn measure(&self, values: &[S], derivs: &[S]) -> (S, S) {
        let n = self.mean.len();
        let sup = values.chunks(n).map(norm).fold(S::zero(), S::max);
        let dev = derivs
            .chunks(n)
            .map(|d| crate::scalar::dist(d, &self.mean))
            .fold(S::zero(), S::max);
        (sup, dev)
    }

    fn admits(&self, measured: (S, S)) -> bool {
        measured.0 <= self.norm && measured.1 <= self.velocity
    }
}

/// Solves `z̈ = g*_m(t, z)`, `z(0) = A`, `z(T) = z_T` by damped fixed-point
/// iteration on `T_m`, starting from `warm_start` or the straight line.
pub fn solve_regularized<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    start: &[S],
    target: &[S],
    level: u64,
    config: &SolverConfig<S>,
    warm_start: Option<&UnfoldedTrajectory<S>>,
) -> Result<RegularizedSolve<S>> {
    config.validate()?;
    let n = domain.dim();
    domain.check_dim(start.len())?;
    domain.check_dim(target.len())?;
    domain.check_dim(field.dim())?;
    if level == 0 {
        return Err(Error::InvalidConfig(
            "regularization level must be >= 1".into(),
        ));
    }
    let grid = TimeGrid::new(field.horizon(), config.intervals)?;
    let mut current = match warm_start {
        Some(w) if w.grid() == &grid && w.dim() == n => UnfoldedTrajectory::from_samples(
            grid,
            start.into(),
            target.into(),
            w.values.clone(),
            w.derivs.clone(),
        )?,
        _ => UnfoldedTrajectory::straight_line(grid, start, target),
    };

    let bounds = Bounds::new(start, target, grid.horizon(), field.bound_integral());
    let lambda = config.damping;
    let mut ws = Workspace::default();
    let mut image = current.clone();
    let mut anderson = Anderson::new(config.anderson_depth);
    let mut violations = 0;
    let mut max_norm = S::zero();
    let mut max_dev = S::zero();
    let mut previous_residual = S::infinity();
    let len = grid.len() * n;

    for iteration in 1..=config.max_iter {
        let measured = bounds.measure(&current.values, &current.derivs);
        if !bounds.admits(measured) {
            violations += 1;
        }
        max_norm = max_norm.max(measured.0);
        max_dev = max_dev.max(measured.1);

        apply_into(
            field,
            domain,
            &grid,
            start,
            target,
            &current.values,
            level,
            &mut ws,
            &mut image.values,
            &mut image.derivs,
        );
        let residual = image
            .values
            .iter()
            .zip(&current.values)
            .map(|(&a, &b)| (a - b).abs())
            .fold(S::zero(), S::max);
        if !residual.is_finite() {
            break;
        }
        if residual <= config.tol_fp {
            let measured = bounds.measure(&image.values, &image.derivs);
            if !bounds.admits(measured) {
                violations += 1;
            }
            return Ok(RegularizedSolve {
                trajectory: image,
                iterations: iteration,
                residual,
                bound_violations: violations,
                max_norm: max_norm.max(measured.0),
                max_velocity_deviation: max_dev.max(measured.1),
            });
        }
        if residual > previous_residual {
            anderson.reset();
        }
        previous_residual = residual;

        // damped image, values followed by derivatives
        let mut damped = Vec::with_capacity(2 * len);
        damped.extend(
            current
                .values
                .iter()
                .zip(&image.values)
                .map(|(&y, &ty)| y + lambda * (ty - y)),
        );
        damped.extend(
            current
                .derivs
                .iter()
                .zip(&image.derivs)
                .map(|(&y, &ty)| y + lambda * (ty - y)),
        );
        let step: Vec<S> = damped[..len]
            .iter()
            .zip(&current.values)
            .map(|(&g, &y)| g - y)
            .collect();
        let next = match anderson.push(damped.clone(), step) {
            Some(mixed) if bounds.admits(bounds.measure(&mixed[..len], &mixed[len..])) => mixed,
            Some(_) => {
                anderson.reset();
                damped
            }
            None => damped,
        };
        current.values.copy_from_slice(&next[..len]);
        current.derivs.copy_from_slice(&next[len..]);
        current.pin_endpoints();
    }

    Err(Error::NotConverged {
        level,
        iterations: config.max_iter,
        residual: previous_residual.as_f64(),
    })
}

/// Per-level record of a continuation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub level: u64,
    pub iterations: usize,
    pub residual: f64,
    /// Sup distance to the previous level's solution.
    pub drift: Option<f64>,
    /// Level added beyond the configured schedule to resolve ramp zones.
    pub appended: bool,
}

/// Result of [`continuation_solve`].
#[derive(Debug, Clone)]
pub struct ContinuationOutcome<S> {
    pub trajectory: UnfoldedTrajectory<S>,
    pub levels: Vec<LevelReport>,
    /// The sweep stopped because two successive levels agreed within `tol_fp`.
    /// This stopping rule is a heuristic: no convergence rate in `m` is known.
    pub stopped_on_drift: bool,
    /// Integrated-equation residual of the final iterate.
    pub limit_residual: S,
    pub bound_violations: usize,
    pub max_norm: S,
    pub max_velocity_deviation: S,
    /// `m̄` of the field.
    pub m_bar: S,
}

/// Safety factor on the level needed to fit ramp zones inside the crossing
/// exclusion window.
const RAMP_SAFETY: f64 = 1.5;
/// Half-width, in grid steps, of the window excluded around crossings.
pub(crate) const CROSSING_EXCLUSION_STEPS: f64 = 2.0;

/// Sweeps the regularization levels with warm starts and accepts the final
/// iterate as a strictly monotone solution of `z̈ = f*(t, z)`.
///
/// Requires `|z_Tᵢ − aᵢ| > T m̄` on every axis, and `A`, `z_T` off grid lines.
pub fn continuation_solve<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    start: &[S],
    target: &[S],
    config: &SolverConfig<S>,
) -> Result<ContinuationOutcome<S>> {
    config.validate()?;
    let n = domain.dim();
    domain.check_dim(start.len())?;
    domain.check_dim(target.len())?;
    domain.check_dim(field.dim())?;
    if !domain.is_anchored() {
        return Err(Error::InvalidConfig(
            "the unfolded problem lives on an anchored box".into(),
        ));
    }
    for axis in 0..n {
        if domain.on_grid_line(axis, start[axis]) || domain.on_grid_line(axis, target[axis]) {
            return Err(Error::EndpointOnGridLine { axis });
        }
    }
    let horizon = field.horizon();
    let m_bar = field.bound_integral();
    let required = horizon * m_bar;
    for axis in 0..n {
        let gap = (target[axis] - start[axis]).abs();
        if !(gap > required) {
            return Err(Error::HypothesisViolated {
                axis,
                gap: gap.as_f64(),
                required: required.as_f64(),
            });
        }
    }

    let mut levels = Vec::new();
    let mut current: Option<RegularizedSolve<S>> = None;
    let mut violations = 0;
    let mut max_norm = S::zero();
    let mut max_dev = S::zero();
    let mut stopped_on_drift = false;

    let mut run_level =
        |level: u64, appended: bool, current: &mut Option<RegularizedSolve<S>>| -> Result<bool> {
            let warm = current.as_ref().map(|c| &c.trajectory);
            let solve = solve_regularized(field, domain, start, target, level, config, warm)?;
            let drift = warm.map(|w| w.sup_distance(&solve.trajectory));
            violations += solve.bound_violations;
            max_norm = max_norm.max(solve.max_norm);
            max_dev = max_dev.max(solve.max_velocity_deviation);
            levels.push(LevelReport {
                level,
                iterations: solve.iterations,
                residual: solve.residual.as_f64(),
                drift: drift.map(|d| d.as_f64()),
                appended,
            });
            *current = Some(solve);
            Ok(drift.is_some_and(|d| d <= config.tol_fp))
        };

    for &level in &config.m_schedule {
        if run_level(level, false, &mut current)? {
            stopped_on_drift = true;
            break;
        }
    }

    if config.resolve_ramps && !stopped_on_drift {
        let traj = &current.as_ref().expect("schedule is non-empty").trajectory;
        check_monotone(traj)?;
        let needed = resolving_level(traj, domain);
        let mut level = *config.m_schedule.last().expect("schedule is non-empty");
        while level < needed {
            level = level.saturating_mul(2).min(needed);
            if run_level(level, true, &mut current)? {
                stopped_on_drift = true;
                break;
            }
        }
    }

    let trajectory = current.expect("schedule is non-empty").trajectory;
    check_monotone(&trajectory)?;
    let limit_residual = integrated_residual(field, domain, &trajectory)?;
    if !(limit_residual <= config.tol_residual) {
        return Err(Error::LimitResidual {
            residual: limit_residual.as_f64(),
            tolerance: config.tol_residual.as_f64(),
        });
    }
    Ok(ContinuationOutcome {
        trajectory,
        levels,
        stopped_on_drift,
        limit_residual,
        bound_violations: violations,
        max_norm,
        max_velocity_deviation: max_dev,
        m_bar,
    })
}

/// Every derivative component keeps one strict sign over the grid.
fn check_monotone<S: Real>(traj: &UnfoldedTrajectory<S>) -> Result<()> {
    let n = traj.dim();
    for axis in 0..n {
        let sign = traj.deriv(0)[axis].signum();
        for k in 0..traj.grid().len() {
            let d = traj.deriv(k)[axis];
            if d == S::zero() || d.signum() != sign {
                return Err(Error::MonotonicityLost {
                    axis,
                    time: traj.grid().node(k).as_f64(),
                });
            }
        }
    }
    Ok(())
}

/// Smallest level whose ramp zones (half-width `cᵢ/2m` in space) are crossed
/// within the exclusion window, given the slowest observed speed per axis.
fn resolving_level<S: Real>(traj: &UnfoldedTrajectory<S>, domain: &BoxDomain<S>) -> u64 {
    let h = traj.grid().step();
    let window = S::lit(CROSSING_EXCLUSION_STEPS) * h;
    (0..traj.dim())
        .map(|axis| {
            let speed = (0..traj.grid().len())
                .map(|k| traj.deriv(k)[axis].abs())
                .fold(S::infinity(), S::min);
            let level = S::lit(RAMP_SAFETY) * domain.edge(axis) / (S::lit(2.0) * window * speed);
            level.ceil().to_u64().unwrap_or(u64::MAX)
        })
        .max()
        .unwrap_or(1)
        .max(1)
}

/// Largest `|ż(s₂) − ż(s₁) − ∫_{s₁}^{s₂} f*(s, z(s)) ds|` over node pairs
/// lying in one open interval between grid-line crossings. Nodes within two
/// grid steps of a crossing are left out; the integral is the trapezoid rule
/// over the nodes in between.
pub fn integrated_residual<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    traj: &UnfoldedTrajectory<S>,
) -> Result<S> {
    let n = traj.dim();
    let grid = traj.grid();
    let h = grid.step();
    let window = S::lit(CROSSING_EXCLUSION_STEPS) * h;
    let mut crossings: Vec<S> = locate_crossings(traj, domain)?
        .into_iter()
        .flatten()
        .collect();
    crossings.sort_by(|a, b| a.partial_cmp(b).expect("finite crossing times"));

    let excluded = |t: S| {
        let idx = crossings.partition_point(|&c| c < t);
        let near = |j: usize| crossings.get(j).is_some_and(|&c| (c - t).abs() <= window);
        near(idx) || (idx > 0 && near(idx - 1))
    };

    let mut folded = vec![S::zero(); n];
    let mut load = vec![S::zero(); n];
    let mut prev_load = vec![S::zero(); n];
    let mut acc = vec![S::zero(); n];
    let mut lo = vec![S::zero(); n];
    let mut hi = vec![S::zero(); n];
    let mut worst = S::zero();
    let mut run_start: Option<usize> = None;

    let close_run = |lo: &[S], hi: &[S], worst: &mut S| {
        for (a, b) in lo.iter().zip(hi) {
            *worst = worst.max(*b - *a);
        }
    };

    for k in 0..grid.len() {
        let t = grid.node(k);
        if excluded(t) {
            if run_start.take().is_some() {
                close_run(&lo, &hi, &mut worst);
            }
            continue;
        }
        extend_f_star_into(field, domain, t, traj.value(k), &mut folded, &mut load);
        match run_start {
            None => {
                run_start = Some(k);
                acc.iter_mut().for_each(|a| *a = S::zero());
                lo.iter_mut().for_each(|v| *v = S::zero());
                hi.iter_mut().for_each(|v| *v = S::zero());
            }
            Some(k0) => {
                for i in 0..n {
                    acc[i] += h / S::lit(2.0) * (prev_load[i] + load[i]);
                    let r = traj.deriv(k)[i] - traj.deriv(k0)[i] - acc[i];
                    lo[i] = lo[i].min(r);
                    hi[i] = hi[i].max(r);
                }
            }
        }
        prev_load.copy_from_slice(&load);
    }
    if run_start.is_some() {
        close_run(&lo, &hi, &mut worst);
    }
    Ok(worst)
}

/// Richardson estimate of the quadrature error: solves at `N` by
/// continuation, re-solves at `2N` with the regularization level the `N` run
/// ended on, and returns `4/3` of the largest difference at shared nodes,
/// over values and derivatives.
pub fn quadrature_error_estimate<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    start: &[S],
    target: &[S],
    config: &SolverConfig<S>,
) -> Result<S> {
    let outcome = continuation_solve(field, domain, start, target, config)?;
    let level = outcome.levels.last().expect("at least one level").level;
    let coarse = outcome.trajectory;
    let fine_config = config.clone().with_intervals(config.intervals * 2);
    let fine_grid = TimeGrid::new(coarse.grid().horizon(), fine_config.intervals)?;
    let n = coarse.dim();
    let mut values = Vec::with_capacity(fine_grid.len() * n);
    let mut derivs = Vec::with_capacity(fine_grid.len() * n);
    for t in fine_grid.nodes() {
        let (v, d) = coarse.interpolate(t);
        values.extend(v);
        derivs.extend(d);
    }
    let warm = UnfoldedTrajectory::from_samples(
        fine_grid,
        coarse.start().clone(),
        coarse.target().clone(),
        values,
        derivs,
    )?;
    let fine = solve_regularized(
        field,
        domain,
        start,
        target,
        level,
        &fine_config,
        Some(&warm),
    )?
    .trajectory;
    let mut diff = S::zero();
    for k in 0..coarse.grid().len() {
        for i in 0..n {
            diff = diff
                .max((coarse.value(k)[i] - fine.value(2 * k)[i]).abs())
                .max((coarse.deriv(k)[i] - fine.deriv(2 * k)[i]).abs());
        }
    }
    Ok(diff * S::lit(4.0) / S::lit(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forces::{ConstantField, ZeroField};
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_field_converges_immediately() {
        let k = BoxDomain::unit(2).unwrap();
        let f = ZeroField::new(2, 1.0);
        let cfg = SolverConfig::default().with_intervals(64);
        let s = solve_regularized(&f, &k, &[0.25, 0.25], &[2.75, 2.5], 4, &cfg, None).unwrap();
        assert_eq!(s.iterations, 1);
        let line =
            UnfoldedTrajectory::straight_line(*s.trajectory.grid(), &[0.25, 0.25], &[2.75, 2.5]);
        assert!(s.trajectory.sup_distance(&line) <= 1e-12);
    }

    #[test]
    fn zero_field_continuation_stops_on_drift() {
        let k = BoxDomain::unit(2).unwrap();
        let f = ZeroField::new(2, 1.0);
        let cfg = SolverConfig::default().with_intervals(128);
        let out = continuation_solve(&f, &k, &[0.25, 0.25], &[2.75, 2.5], &cfg).unwrap();
        assert!(out.stopped_on_drift);
        assert_eq!(out.levels.len(), 2);
        assert_eq!(out.limit_residual, 0.0);
    }

    #[test]
    fn hypothesis_boundary_is_rejected() {
        let k = BoxDomain::unit(1).unwrap();
        // T m̄ = 2 exactly equals |z_T − a|
        let f = ConstantField::new(vec![2.0], 1.0);
        let err =
            continuation_solve(&f, &k, &[0.25], &[2.25], &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { axis: 0, .. }));
    }

    #[test]
    fn grid_line_endpoints_rejected() {
        let k = BoxDomain::unit(1).unwrap();
        let f = ZeroField::new(1, 1.0);
        let err =
            continuation_solve(&f, &k, &[0.25], &[3.0], &SolverConfig::default()).unwrap_err();
        assert_eq!(err, Error::EndpointOnGridLine { axis: 0 });
    }

    #[test]
    fn constant_field_matches_closed_form_between_crossings() {
        // ẍ = κ in the anchored frame; unfolded: z̈ = θ(z) κ with z increasing
        // through cells [0,1], [1,2], [2,3]. Check the solution against a
        // shooting solve of the same piecewise-constant ODE.
        let k = BoxDomain::unit(1).unwrap();
        let kappa = 0.6;
        let f = ConstantField::new(vec![kappa], 1.0);
        let cfg = SolverConfig::default().with_intervals(2048);
        let out = continuation_solve(&f, &k, &[0.3], &[2.6], &cfg).unwrap();
        assert_eq!(out.bound_violations, 0);
        assert!(out.limit_residual <= 1e-6);
        let z = &out.trajectory;

        // exact: bisection on initial speed of the piecewise-parabolic motion
        let shoot = |v0: f64| {
            let (mut t, mut x, mut v) = (0.0f64, 0.3f64, v0);
            let dt = 1e-6;
            while t < 1.0 - 1e-12 {
                let acc = if (x.rem_euclid(2.0)) < 1.0 {
                    kappa
                } else {
                    -kappa
                };
                v += acc * dt;
                x += v * dt;
                t += dt;
            }
            x
        };
        let (mut lo, mut hi) = (1.0, 4.0);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if shoot(mid) < 2.6 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert_abs_diff_eq!(z.deriv(0)[0], 0.5 * (lo + hi), epsilon = 2e-4);
    }

    #[test]
    fn velocity_sandwich_holds() {
        let k = BoxDomain::unit(2).unwrap();
        let f = ConstantField::new(vec![0.4, -0.3], 1.0);
        let cfg = SolverConfig::default().with_intervals(512);
        let out = continuation_solve(&f, &k, &[0.2, 0.7], &[-1.8, 3.3], &cfg).unwrap();
        let z = &out.trajectory;
        let mean = z.mean_velocity();
        for kk in 0..z.grid().len() {
            for i in 0..2 {
                let d = z.deriv(kk)[i];
                assert!(d >= mean[i] - out.m_bar - 1e-12 && d <= mean[i] + out.m_bar + 1e-12);
            }
        }
        // uniform continuity: |ż(t_k) − ż(t_j)| ≤ m̄ |t_k − t_j|
        let h = z.grid().step();
        for kk in (0..z.grid().len()).step_by(37) {
            for j in (0..z.grid().len()).step_by(53) {
                let gap = crate::scalar::dist(z.deriv(kk), z.deriv(j));
                assert!(gap <= out.m_bar * h * (kk as f64 - j as f64).abs() + 1e-12);
            }
        }
    }

    #[test]
    fn invalid_configs() {
        let cfg = SolverConfig::<f64> {
            m_schedule: vec![4, 4],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig::<f64> {
            damping: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig::<f64>::default().with_intervals(7);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let k = BoxDomain::unit(1).unwrap();
        let f = ConstantField::new(vec![0.5], 1.0);
        let cfg = SolverConfig::<f64> {
            max_iter: 2,
            anderson_depth: 0,
            damping: 0.1,
            intervals: 64,
            ..Default::default()
        };
        let err = solve_regularized(&f, &k, &[0.3], &[2.6], 4, &cfg, None).unwrap_err();
        assert!(matches!(err, Error::NotConverged { iterations: 2, .. }));
    }
}
