use thiserror::Error;

/// Errors raised by the spectral toolkit, the solver and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("negative-order operator applied to a field with nonzero mean ({mean:e})")]
    NegativeOrderOnNonzeroMean { mean: f64 },
    #[error("homogeneous norm requested for a field with nonzero mean")]
    MeanModeNotZero,
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("dyadic index {j} outside [{j_min}, {j_max}]")]
    JOutOfRange { j: i32, j_min: i32, j_max: i32 },
    #[error("invalid norm request: {0}")]
    InvalidNorm(String),
    #[error("no admissible interpolation exponent (theta = {theta})")]
    NoAdmissibleTheta { theta: f64 },
    #[error("zero field")]
    ZeroField,
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("quadrature did not converge: relative change {rel_change:e} at t = {t}")]
    QuadratureNotConverged { t: f64, rel_change: f64 },
    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("time {t} is not after previous record {prev}")]
    NonMonotoneTime { prev: f64, t: f64 },
    #[error("sigma {sigma} too large for box length {box_len}")]
    SigmaTooLarge { sigma: f64, box_len: f64 },
    #[error("only {found} samples in fit window (need {needed})")]
    InsufficientSamples { found: usize, needed: usize },
    #[error("non-positive value {value} in series {series} at t = {t}")]
    NonPositiveValue { series: String, t: f64, value: f64 },
    #[error("unknown series {0}")]
    UnknownSeries(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("malformed report: {0}")]
    MalformedReport(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
