//! Multiple billiard trajectories in a box under a bounded force.
//!
//! The impact problem `ẍ = f(t,x)` in `K = [α₁,β₁]×…×[αₙ,βₙ]` with elastic
//! reflections is unfolded by the triangle-wave fold `ψ` into a smooth
//! boundary-value problem on `ℝⁿ`. Each choice of reflected target cell gives
//! one branch; solving the branch with a regularized fixed-point iteration and
//! folding back yields one billiard trajectory with a prescribed number of
//! impacts.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below fix the scalar.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod billiard;
pub mod bvp;
pub mod domain;
pub mod error;
pub mod forces;
pub mod multiplicity;
pub mod oracle;
pub mod scalar;

pub use billiard::{
    fold_trajectory, impact_count_formula, locate_crossings, verify_solution, BilliardSolution,
    ImpactEvent, Segment, VerificationReport,
};
pub use bvp::{
    apply_operator, continuation_solve, green, green_dt, integrated_residual,
    quadrature_error_estimate, solve_regularized, ContinuationOutcome, LevelReport,
    RegularizedSolve, SolverConfig, TimeGrid, UnfoldedTrajectory,
};
pub use domain::{normalize, BoxDomain, Normalized, Orientation, Point};
pub use error::{Error, Result};
pub use forces::{
    audit_bound, eta, extend_f_star, g_star, table_force, AffineField, BoundAudit, ConstantField,
    ForceField, PotentialTable, Shifted, TableField, ZeroField,
};
pub use multiplicity::{
    branch_targets, enumerate_solutions, min_impact_budget, min_p, solve_branch, BranchOutcome,
    BranchSpec, BranchStatus, EnumerationConfig, MultiplicityCertificate,
};
pub use oracle::{crosscheck, simulate, CrosscheckReport, OracleConfig, ShootResult};
pub use scalar::Real;

pub type BoxDomainF64 = BoxDomain<f64>;
pub type BoxDomainF32 = BoxDomain<f32>;
pub type PointF64 = Point<f64>;
pub type PointF32 = Point<f32>;
pub type TimeGridF64 = TimeGrid<f64>;
pub type TimeGridF32 = TimeGrid<f32>;
pub type UnfoldedTrajectoryF64 = UnfoldedTrajectory<f64>;
pub type UnfoldedTrajectoryF32 = UnfoldedTrajectory<f32>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type SolverConfigF32 = SolverConfig<f32>;
pub type BilliardSolutionF64 = BilliardSolution<f64>;
pub type BilliardSolutionF32 = BilliardSolution<f32>;
pub type ImpactEventF64 = ImpactEvent<f64>;
pub type ImpactEventF32 = ImpactEvent<f32>;
pub type MultiplicityCertificateF64 = MultiplicityCertificate<f64>;
pub type MultiplicityCertificateF32 = MultiplicityCertificate<f32>;
