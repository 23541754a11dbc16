use core::fmt;

/// Errors raised by the laboratory's operations.
///
/// Every variant carries enough context to be printed as a one-line
/// diagnostic by the command-line runner.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// The singularity strength is not below the space dimension.
    RhoNotBelowDimension { rho: f64, dimension: usize },
    /// The support radius exceeds the computational radius.
    SupportOutsideDomain { support: f64, radius: f64 },
    /// A function value is NaN or infinite where a finite value is required.
    NonFinite { what: &'static str },
    /// Data required to be nonnegative has a negative entry.
    NegativeValue {
        what: &'static str,
        index: usize,
        value: f64,
    },
    /// Two objects that must share a grid do not.
    GridMismatch,
    /// A hypothesis of an estimate or criterion is violated.
    HypothesisViolated(&'static str),
    /// A nonlinearity or weight does not have a property the operation needs.
    Unsupported(&'static str),
    /// A criterion that an operation relies on fails, so it does not apply.
    Inapplicable(&'static str),
    /// No admissible existence time was found on the supplied grid.
    NoAdmissibleTime,
    /// A solve trace is in a state the operation cannot accept.
    TraceStatus(&'static str),
    /// A configuration string could not be parsed.
    Parse(alloc::string::String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => {
                write!(f, "invalid parameter {name} = {value}: expected {expected}")
            }
            Error::RhoNotBelowDimension { rho, dimension } => write!(
                f,
                "rho = {rho} must satisfy 0 < rho < N = {dimension} (data would not be in L^r)"
            ),
            Error::SupportOutsideDomain { support, radius } => {
                write!(f, "support radius {support} exceeds domain radius {radius}")
            }
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::NegativeValue { what, index, value } => {
                write!(
                    f,
                    "{what} must be nonnegative, found {value} at node {index}"
                )
            }
            Error::GridMismatch => write!(f, "functions live on different grids"),
            Error::HypothesisViolated(msg) => write!(f, "hypothesis violated: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::Inapplicable(msg) => write!(f, "inapplicable: {msg}"),
            Error::NoAdmissibleTime => {
                write!(
                    f,
                    "supersolution margin never drops below 1 on the time grid"
                )
            }
            Error::TraceStatus(msg) => write!(f, "trace rejected: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected: "a finite value > 0",
        })
    }
}
