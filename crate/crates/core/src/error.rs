use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("correlation {phi} is infeasible for margins ({a}, {b}): allowed [{lo}, {hi}]")]
    InfeasibleCorrelation {
        phi: f64,
        a: f64,
        b: f64,
        lo: f64,
        hi: f64,
    },
    #[error("degenerate rate {0}: correlation is undefined when a rate is 0 or 1")]
    DegenerateRate(f64),
    #[error("predicted combination response rate is zero")]
    NoResponders,
    #[error("degenerate margin: {0}")]
    DegenerateMargin(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("empty sample")]
    EmptySample,
    #[error("no feasible solution: {0}")]
    NoFeasibleSolution(String),
    #[error("multiple feasible solutions: {0:?}")]
    NonUnique(Vec<f64>),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },
    #[error("invariant violation at row {row}: {msg}")]
    InvariantViolation { row: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable category.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse { .. } | Error::Io(_) => "parse",
            Error::InvariantViolation { .. }
            | Error::InvalidInput(_)
            | Error::EmptySample
            | Error::GridMismatch(_)
            | Error::OutOfRange(_) => "invariant",
            Error::InfeasibleCorrelation { .. }
            | Error::DegenerateRate(_)
            | Error::NoResponders
            | Error::DegenerateMargin(_)
            | Error::NoFeasibleSolution(_)
            | Error::NonUnique(_) => "infeasible-model",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
