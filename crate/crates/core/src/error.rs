use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// The point is at or below the support lower bound.
    Domain {
        x: f64,
        lower_bound: f64,
    },
    /// The monotonicity condition of the generator fails at `x`.
    ConditionViolated {
        x: f64,
    },
    /// Construction-time guard scan found a point where the generator decreases
    /// or the generator does not diverge.
    GuardFailed {
        x: f64,
    },
    InvalidProbability(f64),
    /// Requested probability lies inside the atom at the support edge.
    BelowDeficit {
        v: f64,
        deficit: f64,
    },
    /// Operation refuses distributions with positive lower-mass deficit.
    Defective {
        deficit: f64,
    },
    MalformedTieMap(String),
    Arity {
        expected: usize,
        got: usize,
    },
    EmptyData,
    /// Starting point of a fit is out of bounds or gives an invalid model.
    InvalidInit(String),
    /// Standard errors are unavailable because the information matrix is singular.
    MissingStandardErrors,
    /// Bracket expansion for a quantile never reached the target.
    NoBracket {
        v: f64,
    },
    InvalidScenario(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                reason,
            } => write!(f, "invalid parameter {name} = {value}: {reason}"),
            Error::Domain { x, lower_bound } => {
                write!(f, "x = {x} is outside the support (x > {lower_bound})")
            }
            Error::ConditionViolated { x } => {
                write!(f, "generator monotonicity condition fails at x = {x}")
            }
            Error::GuardFailed { x } => write!(
                f,
                "generator is not a valid non-decreasing divergent function (fails near x = {x})"
            ),
            Error::InvalidProbability(v) => write!(f, "probability {v} is not in (0, 1)"),
            Error::BelowDeficit { v, deficit } => write!(
                f,
                "probability {v} does not exceed the lower-mass deficit {deficit}"
            ),
            Error::Defective { deficit } => write!(
                f,
                "distribution is defective (lower-mass deficit {deficit}); enable allow_defective to proceed"
            ),
            Error::MalformedTieMap(msg) => write!(f, "malformed tie map: {msg}"),
            Error::Arity { expected, got } => {
                write!(f, "expected {expected} parameters, got {got}")
            }
            Error::EmptyData => f.write_str("data set is empty"),
            Error::InvalidInit(msg) => write!(f, "invalid starting point: {msg}"),
            Error::MissingStandardErrors => f.write_str(
                "standard errors are unavailable (observed information is singular)",
            ),
            Error::NoBracket { v } => write!(f, "could not bracket the quantile for v = {v}"),
            Error::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
