use serde::Serialize;
use thiserror::Error;

/// Errors raised by the solver pipeline.
///
/// Numeric payloads are reported as `f64` regardless of the scalar type used
/// for the computation.
#[derive(Debug, Clone, Error, PartialEq, Serialize)]
pub enum Error {
    #[error("invalid box on axis {axis}: lower {lower} must be strictly below upper {upper}")]
    InvalidBox { axis: usize, lower: f64, upper: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("axis index {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("point {which} is not strictly interior to the box (axis {axis}, value {value})")]
    NotInterior {
        which: &'static str,
        axis: usize,
        value: f64,
    },

    #[error("value {value} lies on a grid line of axis {axis}")]
    GridLine { axis: usize, value: f64 },

    #[error("ramp argument {value} outside [0, {edge}] on axis {axis}")]
    RampDomain { axis: usize, value: f64, edge: f64 },

    #[error("force bound violated by {excess} at t = {t}")]
    BoundViolation { excess: f64, t: f64, x: Vec<f64> },

    #[error("fixed-point iteration did not converge at m = {level}: {iterations} iterations, residual {residual}; try smaller damping or a finer m schedule")]
    NotConverged {
        level: u64,
        iterations: usize,
        residual: f64,
    },

    #[error("monotonicity lost on axis {axis} near t = {time}")]
    MonotonicityLost { axis: usize, time: f64 },

    #[error("monotonicity hypothesis violated on axis {axis}: |target - start| = {gap} must exceed T * m_bar = {required}")]
    HypothesisViolated {
        axis: usize,
        gap: f64,
        required: f64,
    },

    #[error("endpoint of the unfolded trajectory lies on a grid line of axis {axis}")]
    EndpointOnGridLine { axis: usize },

    #[error("integrated-equation residual {residual} exceeds tolerance {tolerance}")]
    LimitResidual { residual: f64, tolerance: f64 },

    #[error("impact budget p = {p} is below the admissible minimum {min_p}")]
    BudgetTooSmall { p: u64, min_p: u64 },

    #[error("simulation stuck at the boundary near t = {time} ({events} events in one step)")]
    StuckAtBoundary { time: f64, events: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
