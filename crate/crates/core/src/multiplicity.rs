//! Branch enumeration: one unfolded target per mosaic vertex, one billiard
//! trajectory per converged branch.

use rayon::prelude::*;
use serde::Serialize;

use crate::billiard::{fold_trajectory, verify_solution, BilliardSolution, VerificationReport};
use crate::bvp::{continuation_solve, LevelReport, SolverConfig};
use crate::domain::{normalize, BoxDomain, Point};
use crate::error::{Error, Result};
use crate::forces::{ForceField, Shifted};
use crate::scalar::Real;

/// One choice of target cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSpec<S> {
    pub p: u64,
    /// Sign vector `ξ ∈ {−1, +1}ⁿ`.
    pub xi: Vec<i8>,
    /// Mosaic vertex `u = (ξ₁c₁, …, ξₙcₙ)`.
    pub u: Vec<S>,
    /// `B` for even `p`, `c − B` for odd `p`.
    pub zeta: Vec<S>,
    /// `z_T = p·u + ζ_p`.
    pub target: Vec<S>,
    pub start: Vec<S>,
}

/// Smallest integer strictly greater than `maxᵢ T·m̄/cᵢ + 1`.
pub fn min_impact_budget<S: Real>(horizon: S, m_bar: S, edges: &[S]) -> u64 {
    let ratio = edges
        .iter()
        .map(|&c| horizon * m_bar / c)
        .fold(S::zero(), S::max);
    let floor = (ratio + S::one())
        .floor()
        .to_u64()
        .expect("impact budget fits in u64");
    floor + 1
}

/// [`min_impact_budget`] for a field on a box.
pub fn min_p<S: Real, F: ForceField<S> + ?Sized>(domain: &BoxDomain<S>, field: &F) -> u64 {
    min_impact_budget(field.horizon(), field.bound_integral(), domain.edges())
}

/// All `2ⁿ` targets for budget `p`, with sign vectors in lexicographic order
/// (`−1` before `+1`, first axis most significant). `domain` is anchored and
/// `a`, `b` are in its coordinates.
pub fn branch_targets<S: Real>(
    domain: &BoxDomain<S>,
    a: &[S],
    b: &[S],
    p: u64,
) -> Result<Vec<BranchSpec<S>>> {
    let n = domain.dim();
    if !domain.is_anchored() {
        return Err(Error::InvalidConfig(
            "branch targets are built on an anchored box".into(),
        ));
    }
    domain.check_interior("A", a)?;
    domain.check_interior("B", b)?;
    if p == 0 {
        return Err(Error::InvalidConfig(
            "impact budget p must be positive".into(),
        ));
    }
    if n >= usize::BITS as usize - 1 {
        return Err(Error::InvalidConfig(format!(
            "{n} axes give too many branches"
        )));
    }
    let zeta: Vec<S> = if p.is_multiple_of(2) {
        b.to_vec()
    } else {
        b.iter()
            .zip(domain.edges())
            .map(|(&bi, &c)| c - bi)
            .collect()
    };
    let scale = S::from_u64(p).expect("budget fits in scalar");
    Ok((0..1usize << n)
        .map(|code| {
            let xi: Vec<i8> = (0..n)
                .map(|i| if code >> (n - 1 - i) & 1 == 1 { 1 } else { -1 })
                .collect();
            let u: Vec<S> = xi
                .iter()
                .zip(domain.edges())
                .map(|(&s, &c)| S::lit(f64::from(s)) * c)
                .collect();
            let target = u
                .iter()
                .zip(&zeta)
                .map(|(&ui, &zi)| scale * ui + zi)
                .collect();
            BranchSpec {
                p,
                xi,
                u,
                zeta: zeta.clone(),
                target,
                start: a.to_vec(),
            }
        })
        .collect())
}

/// Settings for [`enumerate_solutions`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationConfig<S> {
    pub solver: SolverConfig<S>,
    /// Merge window for simultaneous crossings; `None` means `10⁻⁸·T`.
    pub merge_tol: Option<S>,
    /// Pass threshold handed to [`verify_solution`].
    pub verify_tol: S,
}

impl<S: Real> Default for EnumerationConfig<S> {
    fn default() -> Self {
        EnumerationConfig {
            solver: SolverConfig::default(),
            merge_tol: None,
            verify_tol: S::lit(1e-5),
        }
    }
}

impl<S: Real> EnumerationConfig<S> {
    pub fn merge_tol_for(&self, horizon: S) -> S {
        self.merge_tol.unwrap_or(S::lit(1e-8) * horizon)
    }
}

/// Result of one branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchStatus {
    Converged,
    /// Solved and folded, but `verify_solution` or the impact count failed.
    InvariantViolated {
        reason: String,
    },
    Failed {
        error: Error,
    },
}

impl BranchStatus {
    pub fn is_converged(&self) -> bool {
        matches!(self, BranchStatus::Converged)
    }
}

/// Per-branch record of a certificate.
#[derive(Debug, Clone, Serialize)]
pub struct BranchOutcome<S> {
    pub spec: BranchSpec<S>,
    pub status: BranchStatus,
    /// Index into [`MultiplicityCertificate::solutions`].
    pub solution: Option<usize>,
    pub p_impacts: Option<usize>,
    pub total_mult: Option<usize>,
    pub limit_residual: Option<f64>,
    pub max_velocity_deviation: Option<f64>,
    pub bound_violations: Option<usize>,
    pub stopped_on_drift: Option<bool>,
    pub levels: Vec<LevelReport>,
    pub verification: Option<VerificationReport>,
}

/// Everything produced for one budget `p`.
#[derive(Debug, Clone)]
pub struct MultiplicityCertificate<S> {
    pub p: u64,
    pub min_p: u64,
    pub m_bar: S,
    pub horizon: S,
    /// The anchored box the branches were solved on.
    pub domain: BoxDomain<S>,
    pub shift: Point<S>,
    pub branches: Vec<BranchOutcome<S>>,
    pub solutions: Vec<BilliardSolution<S>>,
    /// Sup distance between unfolded solutions, indexed like `solutions`.
    pub distinctness: Vec<Vec<S>>,
    /// Some branch did not end in [`BranchStatus::Converged`].
    pub partial: bool,
}

impl<S: Real> MultiplicityCertificate<S> {
    pub fn converged(&self) -> usize {
        self.branches
            .iter()
            .filter(|b| b.status.is_converged())
            .count()
    }

    /// `c_min / 2`.
    pub fn distinctness_threshold(&self) -> S {
        self.domain.min_edge() / S::lit(2.0)
    }

    /// Every off-diagonal entry exceeds [`Self::distinctness_threshold`].
    pub fn all_distinct(&self) -> bool {
        let threshold = self.distinctness_threshold();
        self.distinctness.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, &d)| i == j || d > threshold)
        })
    }
}

struct Solved<S> {
    outcome: BranchOutcome<S>,
    solution: Option<BilliardSolution<S>>,
}

fn run_branch<S: Real, F: ForceField<S> + ?Sized>(
    field: &F,
    domain: &BoxDomain<S>,
    shift: &Point<S>,
    spec: BranchSpec<S>,
    config: &EnumerationConfig<S>,
) -> Solved<S> {
    let mut outcome = BranchOutcome {
        spec,
        status: BranchStatus::Converged,
        solution: None,
        p_impacts: None,
        total_mult: None,
        limit_residual: None,
        max_velocity_deviation: None,
        bound_violations: None,
        stopped_on_drift: None,
        levels: Vec::new(),
        verification: None,
    };
    let local = Shifted::new(field, shift.to_vec());
    let solved = match continuation_solve(
        &local,
        domain,
        &outcome.spec.start,
        &outcome.spec.target,
        &config.solver,
    ) {
        Ok(s) => s,
        Err(error) => {
            outcome.status = BranchStatus::Failed { error };
            return Solved {
                outcome,
                solution: None,
            };
        }
    };
    outcome.limit_residual = Some(solved.limit_residual.as_f64());
    outcome.max_velocity_deviation = Some(solved.max_velocity_deviation.as_f64());
    outcome.bound_violations = Some(solved.bound_violations);
    outcome.stopped_on_drift = Some(solved.stopped_on_drift);
    outcome.levels = solved.levels;

    let merge_tol = config.merge_tol_for(field.horizon());
    let sol = match fold_trajectory(&solved.trajectory, domain, merge_tol, shift) {
        Ok(s) => s,
        Err(error) => {
            outcome.status = BranchStatus::Failed { error };
            return Solved {
                outcome,
                solution: None,
            };
        }
    };
    let report = verify_solution(&sol, field, config.verify_tol);
    let expected = domain.dim() as u64 * outcome.spec.p;
    outcome.p_impacts = Some(sol.impact_count());
    outcome.total_mult = Some(sol.total_multiplicity());
    if !report.pass {
        outcome.status = BranchStatus::InvariantViolated {
            reason: format!("verification failed: {report:?}"),
        };
    } else if sol.total_multiplicity() as u64 != expected
        || (sol.impact_count() as u64) < outcome.spec.p
    {
        outcome.status = BranchStatus::InvariantViolated {
            reason: format!(
                "impact count: total_mult = {}, impacts = {}, expected total_mult {expected}",
                sol.total_multiplicity(),
                sol.impact_count()
            ),
        };
    }
    outcome.verification = Some(report);
    Solved {
        outcome,
        solution: Some(sol),
    }
}

/// Solves the single branch with sign vector `xi` for budget `p` (default:
/// the minimal budget). Inputs are in original coordinates; a branch failure
/// is reported in the outcome's status, not as an error.
pub fn solve_branch<S: Real, F: ForceField<S> + ?Sized>(
    domain: &BoxDomain<S>,
    field: &F,
    a: &[S],
    b: &[S],
    p: Option<u64>,
    xi: &[i8],
    config: &EnumerationConfig<S>,
) -> Result<(BranchOutcome<S>, Option<BilliardSolution<S>>)> {
    config.solver.validate()?;
    domain.check_dim(field.dim())?;
    domain.check_dim(xi.len())?;
    if xi.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidConfig(format!(
            "sign vector {xi:?} must contain only +1 and -1"
        )));
    }
    let normalized = normalize(domain, a, b)?;
    let least = min_p(&normalized.domain, field);
    let p = p.unwrap_or(least);
    if p < least {
        return Err(Error::BudgetTooSmall { p, min_p: least });
    }
    let spec = branch_targets(&normalized.domain, &normalized.start, &normalized.end, p)?
        .into_iter()
        .find(|s| s.xi == xi)
        .expect("every sign vector is enumerated");
    let Solved { outcome, solution } =
        run_branch(field, &normalized.domain, &normalized.shift, spec, config);
    Ok((outcome, solution))
}

/// Solves all `2ⁿ` branches for budget `p` (default: the minimal budget).
///
/// `domain`, `field`, `a` and `b` are in original coordinates. Branch
/// failures are recorded in the certificate; only invalid input is an error.
/// Branches run on the current rayon pool and are reported in branch order.
pub fn enumerate_solutions<S: Real, F: ForceField<S> + ?Sized>(
    domain: &BoxDomain<S>,
    field: &F,
    a: &[S],
    b: &[S],
    p: Option<u64>,
    config: &EnumerationConfig<S>,
) -> Result<MultiplicityCertificate<S>> {
    config.solver.validate()?;
    domain.check_dim(field.dim())?;
    let normalized = normalize(domain, a, b)?;
    let local_domain = normalized.domain;
    let least = min_p(&local_domain, field);
    let p = p.unwrap_or(least);
    if p < least {
        return Err(Error::BudgetTooSmall { p, min_p: least });
    }
    let specs = branch_targets(&local_domain, &normalized.start, &normalized.end, p)?;
    let shift = normalized.shift;
    let solved: Vec<Solved<S>> = specs
        .into_par_iter()
        .map(|spec| run_branch(field, &local_domain, &shift, spec, config))
        .collect();

    let mut branches = Vec::with_capacity(solved.len());
    let mut solutions = Vec::new();
    for Solved {
        mut outcome,
        solution,
    } in solved
    {
        if let Some(sol) = solution {
            outcome.solution = Some(solutions.len());
            solutions.push(sol);
        }
        branches.push(outcome);
    }
    let distinctness = solutions
        .iter()
        .map(|x| {
            solutions
                .iter()
                .map(|y| x.unfolded_distance(y).unwrap_or(S::infinity()))
                .collect()
        })
        .collect();
    let partial = branches.iter().any(|b| !b.status.is_converged());
    Ok(MultiplicityCertificate {
        p,
        min_p: least,
        m_bar: field.bound_integral(),
        horizon: field.horizon(),
        domain: local_domain,
        shift,
        branches,
        solutions,
        distinctness,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forces::{ConstantField, ZeroField};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit2() -> BoxDomain<f64> {
        BoxDomain::unit(2).unwrap()
    }

    #[test]
    fn budget_examples() {
        assert_eq!(min_impact_budget(1.0, 0.0, &[1.0, 1.0]), 2);
        assert_eq!(min_impact_budget(1.0, 4.905, &[4.0, 4.0]), 3);
        assert_eq!(min_impact_budget(1.0, 2.0, &[1.0, 3.0]), 4);
        assert_eq!(min_p(&unit2(), &ZeroField::new(2, 1.0)), 2);
    }

    #[test]
    fn branch_target_examples() {
        let k = unit2();
        let even = branch_targets(&k, &[0.25, 0.25], &[0.75, 0.5], 2).unwrap();
        assert_eq!(even.len(), 4);
        assert_eq!(even[0].xi, vec![-1, -1]);
        assert_eq!(even[1].xi, vec![-1, 1]);
        assert_eq!(even[3].xi, vec![1, 1]);
        assert_eq!(even[3].zeta, vec![0.75, 0.5]);
        assert_eq!(even[3].target, vec![2.75, 2.5]);
        assert_eq!(even[1].target, vec![-1.25, 2.5]);
        let odd = branch_targets(&k, &[0.25, 0.25], &[0.75, 0.5], 3).unwrap();
        assert_eq!(odd[3].zeta, vec![0.25, 0.5]);
        assert_eq!(odd[3].target, vec![3.25, 3.5]);
        for spec in even.iter().chain(&odd) {
            assert_abs_diff_eq!(k.fold(&spec.target).0[..], [0.75, 0.5][..], epsilon = 1e-12);
        }
    }

    #[test]
    fn branch_targets_reject_boundary_points() {
        let k = unit2();
        assert!(matches!(
            branch_targets(&k, &[0.0, 0.5], &[0.5, 0.5], 2),
            Err(Error::NotInterior { which: "A", .. })
        ));
    }

    #[test]
    fn free_enumeration_one_dimension() {
        let k = BoxDomain::unit(1).unwrap();
        let cert = enumerate_solutions(
            &k,
            &ZeroField::new(1, 1.0),
            &[0.5],
            &[0.5],
            Some(2),
            &EnumerationConfig::default(),
        )
        .unwrap();
        assert!(!cert.partial);
        assert_eq!(cert.solutions.len(), 2);
        assert_eq!(cert.branches[0].spec.target, vec![-1.5]);
        assert_eq!(cert.branches[1].spec.target, vec![2.5]);
        assert_abs_diff_eq!(
            cert.solutions[0].initial_velocity()[0],
            -2.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            cert.solutions[1].initial_velocity()[0],
            2.0,
            epsilon = 1e-10
        );
        assert!(cert.all_distinct());
    }

    #[test]
    fn free_enumeration_two_dimensions() {
        let k = BoxDomain::new(vec![-1.0, 2.0], vec![0.0, 3.0]).unwrap();
        let cert = enumerate_solutions(
            &k,
            &ZeroField::new(2, 1.0),
            &[-0.75, 2.25],
            &[-0.25, 2.5],
            None,
            &EnumerationConfig::default(),
        )
        .unwrap();
        assert_eq!(cert.p, 2);
        assert_eq!(cert.converged(), 4);
        for b in &cert.branches {
            assert_eq!(b.total_mult, Some(4));
            assert!(b.p_impacts.unwrap() >= 2);
        }
        assert!(cert.all_distinct());
        assert_eq!(cert.shift.0, vec![-1.0, 2.0]);
    }

    #[test]
    fn single_branch_matches_enumeration() {
        let k = BoxDomain::unit(1).unwrap();
        let field = ZeroField::new(1, 1.0);
        let (outcome, sol) = solve_branch(
            &k,
            &field,
            &[0.5],
            &[0.5],
            None,
            &[-1],
            &EnumerationConfig::default(),
        )
        .unwrap();
        assert!(outcome.status.is_converged());
        assert_eq!(outcome.spec.target, vec![-1.5]);
        assert_abs_diff_eq!(sol.unwrap().initial_velocity()[0], -2.0, epsilon = 1e-10);
        assert!(matches!(
            solve_branch(
                &k,
                &field,
                &[0.5],
                &[0.5],
                None,
                &[0],
                &EnumerationConfig::default()
            ),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn budget_below_minimum_rejected() {
        let k = unit2();
        let field = ConstantField::new(vec![1.2, 0.0], 1.0);
        let err = enumerate_solutions(
            &k,
            &field,
            &[0.3, 0.3],
            &[0.6, 0.6],
            Some(2),
            &EnumerationConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err, Error::BudgetTooSmall { p: 2, min_p: 3 });
    }

    proptest! {
        #[test]
        fn budget_is_least_strict_integer(
            horizon in 0.1f64..5.0,
            m_bar in 0.0f64..10.0,
            edges in proptest::collection::vec(0.2f64..4.0, 1..4),
        ) {
            let p = min_impact_budget(horizon, m_bar, &edges);
            let r = edges.iter().map(|c| horizon * m_bar / c).fold(0.0, f64::max) + 1.0;
            prop_assert!((p as f64) > r);
            prop_assert!(((p - 1) as f64) <= r);
        }

        #[test]
        fn parity_flip_still_folds_to_b(
            b0 in 0.05f64..0.95, b1 in 0.05f64..0.95, p in 1u64..7,
        ) {
            let k = BoxDomain::anchored(vec![1.0, 2.0]).unwrap();
            let b = [b0, 2.0 * b1];
            for q in [p, p + 1] {
                for spec in branch_targets(&k, &[0.5, 1.0], &b, q).unwrap() {
                    let back = k.fold(&spec.target);
                    prop_assert!((back[0] - b[0]).abs() < 1e-9 && (back[1] - b[1]).abs() < 1e-9);
                    for i in 0..2 {
                        prop_assert!((spec.target[i] - 0.5 * (1 + i) as f64).abs() >= (q as f64 - 1.0) * k.edge(i) - 1e-12);
                    }
                }
            }
        }
    }
}
