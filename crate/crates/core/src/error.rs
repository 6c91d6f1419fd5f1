use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    MalformedRecord { line: u64, reason: String },
    #[error("timestamp at index {index} is not after its predecessor")]
    NonMonotoneTime { index: usize },
    #[error("need at least {required} points, got {found}")]
    TooFewPoints { required: usize, found: usize },
    #[error("invalid trim range [{start}, {end}] for {len} points")]
    InvalidTrimRange { start: usize, end: usize, len: usize },
    #[error("requested {requested} waypoints but only {available} points are available")]
    TooManyWaypoints { requested: usize, available: usize },
    #[error("at least 2 waypoints are required, got {0}")]
    TooFewWaypoints(usize),
    #[error("knot at index {index} is not strictly greater than its predecessor")]
    NonMonotoneKnots { index: usize },
    #[error("{x} lies outside the spline domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("index {index} out of range for {len} waypoints")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("timestamp {t} lies outside the trajectory domain [{lo}, {hi}]")]
    TimestampOutsideDomain { t: f64, lo: f64, hi: f64 },
    #[error("error series is empty")]
    EmptySeries,
    #[error("point sequence is empty")]
    EmptySequence,
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: unknown command `{name}`")]
    UnknownCommand { line: usize, name: String },
    #[error("line {line}: `{name}` takes {expected} arguments, got {found}")]
    Arity { line: usize, name: String, expected: usize, found: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("stopwatch stopped without being started")]
    StopWithoutStart,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable identifier used as a machine-parseable prefix in diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedRecord { .. } => "malformed_record",
            Error::NonMonotoneTime { .. } => "non_monotone_time",
            Error::TooFewPoints { .. } => "too_few_points",
            Error::InvalidTrimRange { .. } => "invalid_trim_range",
            Error::TooManyWaypoints { .. } => "too_many_waypoints",
            Error::TooFewWaypoints(_) => "too_few_waypoints",
            Error::NonMonotoneKnots { .. } => "non_monotone_knots",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::NonPositiveStep(_) => "non_positive_step",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::TimestampOutsideDomain { .. } => "timestamp_outside_domain",
            Error::EmptySeries => "empty_series",
            Error::EmptySequence => "empty_sequence",
            Error::Syntax { .. } => "syntax_error",
            Error::UnknownCommand { .. } => "unknown_command",
            Error::Arity { .. } => "arity_error",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::StopWithoutStart => "stop_without_start",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
