use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Grid construction failed.
    InvalidGrid(&'static str),
    /// A grid function sample is NaN or infinite.
    NonFinite { index: usize },
    /// Two grid functions (or a function and a config) live on different grids.
    GridMismatch,
    /// A convolution needed data beyond the end of the grid.
    Truncation { x: f64, reach: f64, lo: f64, hi: f64 },
    /// A parameter violates its admissible range.
    InvalidParam {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// The time stepper produced a non-finite value.
    Instability { step: usize, t: f64 },
    /// Initial data violate `u0 >= 0` and `u1 + u0/2 >= 0`.
    SignCondition { index: usize, x: f64 },
    /// Comparison data are not ordered.
    Ordering { index: usize, x: f64 },
    /// Snapshot lists do not match in length or times.
    SnapshotMismatch,
    /// Regression needs more samples than were available.
    Fit(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::NonFinite { index } => write!(f, "non-finite grid value at index {index}"),
            Error::GridMismatch => f.write_str("grid functions live on different grids"),
            Error::Truncation { x, reach, lo, hi } => write!(
                f,
                "grid truncation: evaluating at x = {x} needs data on [{}, {}] but the grid covers [{lo}, {hi}]",
                x - reach,
                x + reach
            ),
            Error::InvalidParam { name, value, expected } => {
                write!(f, "parameter {name} = {value} violates {expected}")
            }
            Error::Instability { step, t } => {
                write!(f, "non-finite value produced at step {step} (t = {t})")
            }
            Error::SignCondition { index, x } => write!(
                f,
                "initial data violate u0 >= 0, u1 + u0/2 >= 0 at index {index} (x = {x})"
            ),
            Error::Ordering { index, x } => {
                write!(f, "comparison data are not ordered at index {index} (x = {x})")
            }
            Error::SnapshotMismatch => f.write_str("snapshot lists do not match"),
            Error::Fit(why) => write!(f, "fit error: {why}"),
        }
    }
}

impl core::error::Error for Error {}
