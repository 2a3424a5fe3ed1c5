//! Forward simulation of the impact system, independent of the unfolding.
//!
//! The oracle integrates `ẍ = f(t, x)` directly in the box with a classical
//! fixed-step Runge–Kutta scheme. A step that leaves the box is cut back by
//! bisection to the first face crossing, the crossing velocity components are
//! negated, and integration resumes from the face.

use serde::Serialize;

use crate::billiard::{BilliardSolution, ImpactEvent};
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::forces::ForceField;
use crate::scalar::{dist, Real};

const BISECTION_STEPS: usize = 50;
const MAX_EVENTS_PER_STEP: usize = 1000;

/// Integrator settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleConfig<S> {
    pub step_count: usize,
    /// Event time tolerance; `None` means `10⁻¹²·T`.
    pub event_tol: Option<S>,
}

impl<S: Real> Default for OracleConfig<S> {
    fn default() -> Self {
        OracleConfig {
            step_count: 8192,
            event_tol: None,
        }
    }
}

/// Sampled forward trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult<S> {
    pub times: Vec<S>,
    /// `n` entries per sample.
    pub positions: Vec<S>,
    pub velocities: Vec<S>,
    pub impacts: Vec<ImpactEvent<S>>,
    pub final_position: Vec<S>,
    pub final_velocity: Vec<S>,
}

impl<S: Real> ShootResult<S> {
    pub fn total_multiplicity(&self) -> usize {
        self.impacts.iter().map(ImpactEvent::multiplicity).sum()
    }
}

struct Integrator<'a, S, F: ?Sized> {
    field: &'a F,
    domain: &'a BoxDomain<S>,
    n: usize,
    clamped: Vec<S>,
    stage: Vec<S>,
    k: [Vec<S>; 8],
}

impl<'a, S: Real, F: ForceField<S> + ?Sized> Integrator<'a, S, F> {
    fn new(field: &'a F, domain: &'a BoxDomain<S>) -> Self {
        let n = domain.dim();
        Integrator {
            field,
            domain,
            n,
            clamped: vec![S::zero(); n],
            stage: vec![S::zero(); n],
            k: std::array::from_fn(|_| vec![S::zero(); n]),
        }
    }

    fn accel(&mut self, t: S, x: &[S], out_slot: usize) {
        for i in 0..self.n {
            self.clamped[i] = x[i].max(self.domain.lower()[i]).min(self.domain.upper()[i]);
        }
        let mut out = std::mem::take(&mut self.k[out_slot]);
        self.field.eval(t, &self.clamped, &mut out);
        self.k[out_slot] = out;
    }

    /// One RK4 step of length `dt` from `(t, x, v)`.
    fn step(&mut self, t: S, x: &[S], v: &[S], dt: S, x_out: &mut [S], v_out: &mut [S]) {
        let n = self.n;
        let half = dt / S::lit(2.0);
        // slots: 0..4 accelerations, 4..8 velocities at each stage
        self.k[4].copy_from_slice(v);
        self.accel(t, x, 0);

        for i in 0..n {
            self.stage[i] = x[i] + half * self.k[4][i];
        }
        let stage = std::mem::take(&mut self.stage);
        self.accel(t + half, &stage, 1);
        self.stage = stage;
        for i in 0..n {
            self.k[5][i] = v[i] + half * self.k[0][i];
        }

        for i in 0..n {
            self.stage[i] = x[i] + half * self.k[5][i];
        }
        let stage = std::mem::take(&mut self.stage);
        self.accel(t + half, &stage, 2);
        self.stage = stage;
        for i in 0..n {
            self.k[6][i] = v[i] + half * self.k[1][i];
        }

        for i in 0..n {
            self.stage[i] = x[i] + dt * self.k[6][i];
        }
        let stage = std::mem::take(&mut self.stage);
        self.accel(t + dt, &stage, 3);
        self.stage = stage;
        for i in 0..n {
            self.k[7][i] = v[i] + dt * self.k[2][i];
        }

        let sixth = dt / S::lit(6.0);
        let two = S::lit(2.0);
        for i in 0..n {
            x_out[i] = x[i]
                + sixth * (self.k[4][i] + two * self.k[5][i] + two * self.k[6][i] + self.k[7][i]);
            v_out[i] = v[i]
                + sixth * (self.k[0][i] + two * self.k[1][i] + two * self.k[2][i] + self.k[3][i]);
        }
    }
}

fn inside<S: Real>(domain: &BoxDomain<S>, x: &[S]) -> bool {
    x.iter()
        .zip(domain.lower().iter().zip(domain.upper()))
        .all(|(&xi, (&lo, &hi))| xi >= lo && xi <= hi)
}

/// Integrates the impact system from `(x0, v0)` over `[0, T]`, `T` being
/// the field's horizon. Coordinates are those of `domain`.
pub fn simulate<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    x0: &[S],
    v0: &[S],
    config: &OracleConfig<S>,
) -> Result<ShootResult<S>> {
    let n = domain.dim();
    domain.check_dim(field.dim())?;
    domain.check_dim(v0.len())?;
    domain.check_interior("x0", x0)?;
    if config.step_count == 0 {
        return Err(Error::InvalidConfig("step_count must be positive".into()));
    }
    let horizon = field.horizon();
    let event_tol = config.event_tol.unwrap_or(S::lit(1e-12) * horizon);
    if !(event_tol > S::zero()) {
        return Err(Error::InvalidConfig("event_tol must be positive".into()));
    }
    let h = horizon / S::from_count(config.step_count);
    let face_slack = domain.min_edge() * S::epsilon() * S::lit(16.0);

    let mut integ = Integrator::new(field, domain);
    let (mut x, mut v) = (x0.to_vec(), v0.to_vec());
    let (mut x1, mut v1) = (vec![S::zero(); n], vec![S::zero(); n]);
    let mut t = S::zero();
    let mut times = vec![t];
    let mut positions = x.clone();
    let mut velocities = v.clone();
    let mut impacts = Vec::new();

    for step in 0..config.step_count {
        let t_end = if step + 1 == config.step_count {
            horizon
        } else {
            h * S::from_count(step + 1)
        };
        let mut events = 0;
        while t < t_end {
            let dt = t_end - t;
            integ.step(t, &x, &v, dt, &mut x1, &mut v1);
            if inside(domain, &x1) {
                std::mem::swap(&mut x, &mut x1);
                std::mem::swap(&mut v, &mut v1);
                t = t_end;
                break;
            }
            let (mut lo, mut hi) = (S::zero(), dt);
            for _ in 0..BISECTION_STEPS {
                if hi - lo <= event_tol {
                    break;
                }
                let mid = (lo + hi) / S::lit(2.0);
                integ.step(t, &x, &v, mid, &mut x1, &mut v1);
                if inside(domain, &x1) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            integ.step(t, &x, &v, hi, &mut x1, &mut v1);
            let window = S::lit(2.0) * event_tol;
            let mut axes = Vec::new();
            for i in 0..n {
                let (low, up) = (domain.lower()[i], domain.upper()[i]);
                let near_low =
                    x1[i] - low <= v1[i].abs() * window + face_slack && v1[i] < S::zero();
                let near_up = up - x1[i] <= v1[i].abs() * window + face_slack && v1[i] > S::zero();
                if x1[i] < low || near_low {
                    x1[i] = low;
                    axes.push(i);
                } else if x1[i] > up || near_up {
                    x1[i] = up;
                    axes.push(i);
                }
            }
            let v_pre = v1.clone();
            for &i in &axes {
                v1[i] = -v1[i];
            }
            t += hi;
            impacts.push(ImpactEvent {
                time: t,
                point: x1.clone(),
                axes,
                v_pre,
                v_post: v1.clone(),
            });
            std::mem::swap(&mut x, &mut x1);
            std::mem::swap(&mut v, &mut v1);
            events += 1;
            if events > MAX_EVENTS_PER_STEP {
                return Err(Error::StuckAtBoundary {
                    time: t.as_f64(),
                    events,
                });
            }
        }
        times.push(t);
        positions.extend_from_slice(&x);
        velocities.extend_from_slice(&v);
    }

    Ok(ShootResult {
        times,
        positions,
        velocities,
        impacts,
        final_position: x,
        final_velocity: v,
    })
}

/// Agreement between a folded solution and its forward simulation.
#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    /// `‖x_sim(T) − B‖`.
    pub terminal_gap: f64,
    pub diameter: f64,
    pub horizon: f64,
    pub impacts_solution: usize,
    pub impacts_simulated: usize,
    pub total_mult_solution: usize,
    pub total_mult_simulated: usize,
    /// Largest gap between matching impact times, when the counts agree.
    pub max_impact_time_gap: Option<f64>,
}

impl CrosscheckReport {
    pub fn counts_match(&self) -> bool {
        self.impacts_solution == self.impacts_simulated
            && self.total_mult_solution == self.total_mult_simulated
    }

    /// Terminal gap within `space_rel·diam(K)`, equal counts, and impact
    /// times within `time_rel·T`.
    pub fn passes(&self, space_rel: f64, time_rel: f64) -> bool {
        self.terminal_gap <= space_rel * self.diameter
            && self.counts_match()
            && self
                .max_impact_time_gap
                .is_some_and(|g| g <= time_rel * self.horizon)
    }
}

/// Shoots from `(A, ẋ(0+))` of `sol` with `field` in original coordinates.
pub fn crosscheck<S: Real, F: ForceField<S> + ?Sized>(
    sol: &BilliardSolution<S>,
    field: &F,
    config: &OracleConfig<S>,
) -> Result<CrosscheckReport> {
    let lower = sol.shift.to_vec();
    let upper: Vec<S> = lower
        .iter()
        .zip(sol.domain().edges())
        .map(|(&l, &c)| l + c)
        .collect();
    let domain = BoxDomain::new(lower.clone(), upper)?;
    let start: Vec<S> = sol.start.iter().zip(&lower).map(|(&a, &l)| a + l).collect();
    let end: Vec<S> = sol.end.iter().zip(&lower).map(|(&b, &l)| b + l).collect();
    let shot = simulate(field, &domain, &start, &sol.initial_velocity(), config)?;
    let max_impact_time_gap = (shot.impacts.len() == sol.impacts.len()).then(|| {
        shot.impacts
            .iter()
            .zip(&sol.impacts)
            .map(|(a, b)| (a.time - b.time).abs().as_f64())
            .fold(0.0, f64::max)
    });
    Ok(CrosscheckReport {
        terminal_gap: dist(&shot.final_position, &end).as_f64(),
        diameter: domain.diameter().as_f64(),
        horizon: sol.horizon().as_f64(),
        impacts_solution: sol.impact_count(),
        impacts_simulated: shot.impacts.len(),
        total_mult_solution: sol.total_multiplicity(),
        total_mult_simulated: shot.total_multiplicity(),
        max_impact_time_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forces::{ConstantField, ZeroField};
    use crate::scalar::norm;
    use approx::assert_abs_diff_eq;

    fn config(step_count: usize) -> OracleConfig<f64> {
        OracleConfig {
            step_count,
            event_tol: None,
        }
    }

    #[test]
    fn free_bounce_in_interval() {
        let k = BoxDomain::unit(1).unwrap();
        let shot = simulate(&ZeroField::new(1, 1.0), &k, &[0.5], &[2.0], &config(64)).unwrap();
        assert_eq!(shot.impacts.len(), 2);
        assert_abs_diff_eq!(shot.impacts[0].time, 0.25, epsilon = 1e-11);
        assert_abs_diff_eq!(shot.impacts[1].time, 0.75, epsilon = 1e-11);
        assert_abs_diff_eq!(shot.final_position[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(shot.final_velocity[0], 2.0, epsilon = 1e-14);
        assert_eq!(shot.times.len(), 65);
    }

    #[test]
    fn diagonal_corner_shot() {
        let k = BoxDomain::unit(2).unwrap();
        let shot = simulate(
            &ZeroField::new(2, 1.0),
            &k,
            &[0.5, 0.5],
            &[1.0, 1.0],
            &config(50),
        )
        .unwrap();
        assert_eq!(shot.impacts.len(), 1);
        let e = &shot.impacts[0];
        assert_eq!(e.axes, vec![0, 1]);
        assert_abs_diff_eq!(e.time, 0.5, epsilon = 1e-11);
        assert_eq!(e.point, vec![1.0, 1.0]);
        assert_abs_diff_eq!(shot.final_position[..], [0.5, 0.5][..], epsilon = 1e-10);
        assert_abs_diff_eq!(shot.final_velocity[..], [-1.0, -1.0][..], epsilon = 1e-14);
    }

    /// Closed-form bounce of `ẍ = −κ` in `[0, 1]`: the ball lands at
    /// `t₁ = (v₀ + √(v₀² + 2κ x₀))/κ` with speed `κ t₁ − v₀`.
    #[test]
    fn parabolic_bounce_matches_closed_form() {
        let kappa = 4.0;
        let (x0, v0) = (0.5, 0.5);
        let k = BoxDomain::new(vec![0.0, 0.0], vec![10.0, 1.0]).unwrap();
        let field = ConstantField::new(vec![0.0, -kappa], 1.0);
        let shot = simulate(&field, &k, &[5.0, x0], &[0.0, v0], &config(200)).unwrap();
        let t1 = (v0 + (v0 * v0 + 2.0 * kappa * x0).sqrt()) / kappa;
        let w = kappa * t1 - v0;
        assert_eq!(shot.impacts.len(), 1);
        assert_abs_diff_eq!(shot.impacts[0].time, t1, epsilon = 1e-11);
        let s = 1.0 - t1;
        assert_abs_diff_eq!(
            shot.final_position[1],
            w * s - 0.5 * kappa * s * s,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(shot.final_velocity[1], w - kappa * s, epsilon = 1e-10);
    }

    #[test]
    fn fourth_order_between_events() {
        use crate::forces::ForceField;
        struct Spring;
        impl ForceField<f64> for Spring {
            fn dim(&self) -> usize {
                1
            }
            fn horizon(&self) -> f64 {
                1.0
            }
            fn eval(&self, _t: f64, x: &[f64], out: &mut [f64]) {
                out[0] = -(x[0] - 5.0);
            }
            fn bound(&self, _t: f64) -> f64 {
                5.0
            }
        }
        let k = BoxDomain::new(vec![0.0], vec![10.0]).unwrap();
        let exact = 5.0 + (1.0f64).cos();
        let err = |steps| {
            (simulate(&Spring, &k, &[6.0], &[0.0], &config(steps))
                .unwrap()
                .final_position[0]
                - exact)
                .abs()
        };
        let ratio = err(10) / err(20);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn reflection_preserves_speed() {
        let k = BoxDomain::unit(3).unwrap();
        let field = ConstantField::new(vec![0.3, -0.7, 0.2], 1.0);
        let shot = simulate(
            &field,
            &k,
            &[0.2, 0.6, 0.9],
            &[3.1, -2.3, 4.4],
            &config(400),
        )
        .unwrap();
        assert!(shot.impacts.len() > 5);
        for e in &shot.impacts {
            assert!((norm(&e.v_pre) - norm(&e.v_post)).abs() <= 1e-14 * norm(&e.v_pre));
            assert!(k.contains(&e.point, 0.0));
        }
        for x in shot.positions.chunks(3) {
            assert!(k.contains(x, 0.0));
        }
    }

    #[test]
    fn non_interior_start_rejected() {
        let k = BoxDomain::unit(1).unwrap();
        assert!(matches!(
            simulate(&ZeroField::new(1, 1.0), &k, &[1.0], &[1.0], &config(8)),
            Err(Error::NotInterior { .. })
        ));
    }
}
