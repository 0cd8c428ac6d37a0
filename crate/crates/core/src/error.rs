use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("quaternion has zero magnitude")]
    ZeroMagnitude,
    #[error("augmented quaternion is not invertible: quaternion part has zero magnitude")]
    NotInvertible,
    #[error("quaternion is not unit (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("quaternion is not a vector quaternion (scalar part {scalar})")]
    NotVector { scalar: f64 },
    #[error("conjugated augmented vector quaternion left the subspace (scalar part {scalar})")]
    AvqClosureViolation { scalar: f64 },
    #[error("unit dual quaternion constraint violated (residual {residual})")]
    ConstraintViolated { residual: f64 },
    #[error("rotation vector norm {norm} outside [0, 2π)")]
    OutOfRange { norm: f64 },
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("non-finite state at step {step}")]
    StepDiverged { step: usize },
    #[error("invalid gains: every entry must be positive")]
    InvalidGains,
    #[error("invalid Lyapunov weights: alpha and beta must be positive")]
    InvalidWeights,
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("initial point is infeasible: {0}")]
    InfeasibleInit(String),
    #[error("objective became non-finite")]
    NonFiniteObjective,
    #[error("malformed problem: {0}")]
    InvalidProblem(String),
}

/// Error while reading one of the line-oriented text formats.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}
