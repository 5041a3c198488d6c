use alloc::string::String;
use core::fmt;

use crate::hilbert::Point;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands live in spaces of different dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// A point must have at least one coordinate.
    EmptyPoint,
    /// A coordinate or parameter is NaN or infinite.
    NonFinite,
    /// A convex set failed its construction invariant.
    InvalidSet(&'static str),
    /// A matrix is not square.
    NotSquare { rows: usize, cols: usize },
    /// Symmetry violated beyond the relative tolerance at `(row, col)`.
    NotSymmetric { row: usize, col: usize },
    /// Smallest eigenvalue is not positive.
    NotStronglyPositive { min_eigenvalue: f64 },
    /// A scalar parameter lies outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// An index lies outside `[min, max]`.
    IndexOutOfRange { name: &'static str, index: usize, min: usize, max: usize },
    /// A schedule emitted a value outside `[0, 1]`.
    ScheduleOutOfRange { sequence: &'static str, index: usize, value: f64 },
    /// A family weight fell outside its admissible interval.
    WeightOutOfRange { n: usize, i: usize, value: f64 },
    /// The K-family declares no limit weights.
    MissingLimitWeights,
    /// `n_max` exhausted before the W-mapping increments fell below tolerance.
    LimitNotReached { best: Point, n: usize, last_increment: f64 },
    /// The parameter bundle does not satisfy the convergence conditions.
    ConditionsViolated(String),
    /// Viscosity weight violates `0 < gamma < gamma_bar / alpha`.
    Inadmissible { gamma: f64, bound: f64 },
    /// Bisection bracket without sign change.
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    /// Iterates left the divergence guard.
    Diverged { iteration: usize, norm: f64 },
    /// Inner iteration ran out of budget.
    NotConverged { iterations: usize, last_step: f64 },
    /// Relative error against a zero reference.
    ZeroReference,
    /// The sample set for a residual is empty.
    EmptySamples,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::EmptyPoint => write!(f, "a point needs at least one coordinate"),
            Error::NonFinite => write!(f, "non-finite value"),
            Error::InvalidSet(why) => write!(f, "invalid convex set: {why}"),
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::NotSymmetric { row, col } => {
                write!(f, "matrix is not symmetric at ({row}, {col})")
            }
            Error::NotStronglyPositive { min_eigenvalue } => write!(
                f,
                "not strongly positive: smallest eigenvalue is {min_eigenvalue}"
            ),
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::IndexOutOfRange { name, index, min, max } => {
                write!(f, "{name} = {index} outside [{min}, {max}]")
            }
            Error::ScheduleOutOfRange { sequence, index, value } => write!(
                f,
                "sequence {sequence} emits {value} at n = {index}, outside [0, 1]"
            ),
            Error::WeightOutOfRange { n, i, value } => {
                write!(f, "family weight ({n}, {i}) = {value} is out of range")
            }
            Error::MissingLimitWeights => write!(f, "family declares no limit weights"),
            Error::LimitNotReached { n, last_increment, .. } => write!(
                f,
                "W-mapping limit not reached after n = {n} (last increment {last_increment:e})"
            ),
            Error::ConditionsViolated(what) => write!(f, "conditions violated: {what}"),
            Error::Inadmissible { gamma, bound } => write!(
                f,
                "viscosity weight {gamma} must satisfy 0 < gamma < {bound}"
            ),
            Error::NoSignChange { lo, hi, g_lo, g_hi } => write!(
                f,
                "no sign change of map(x) - x on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}"
            ),
            Error::Diverged { iteration, norm } => {
                write!(f, "iterates diverged at n = {iteration} (norm {norm:e})")
            }
            Error::NotConverged { iterations, last_step } => write!(
                f,
                "no convergence after {iterations} iterations (last step {last_step:e})"
            ),
            Error::ZeroReference => write!(f, "relative error undefined for a zero reference"),
            Error::EmptySamples => write!(f, "sample set is empty"),
        }
    }
}

impl core::error::Error for Error {}
