use thiserror::Error;

/// Errors reported by graph construction, analysis and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph spec: {0}")]
    InvalidGraph(String),

    #[error("graph has {n} links; at most {max} are supported")]
    TooManyLinks { n: usize, max: usize },

    #[error("schedule space exceeds {limit} schedules; exhaustive enumeration refused")]
    ScheduleSpaceTooLarge { limit: usize },

    #[error("expected {expected} per-link values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fugacity of link {link} must be positive and finite, got {value}")]
    InvalidFugacity { link: usize, value: f64 },

    #[error("arrival rate of link {link} must lie in [0, 1], got {value}")]
    InvalidArrivalRate { link: usize, value: f64 },

    #[error("schedule {0:#x} is not an independent set of the graph")]
    InfeasibleSchedule(u32),

    #[error("distributions have different supports ({0} vs {1} atoms)")]
    SupportMismatch(usize, usize),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trace holds no completed windows")]
    EmptyTrace,

    #[error("arrival vector lies outside the capacity region (max-min slack {slack:.3e})")]
    OutsideCapacityRegion { slack: f64 },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
