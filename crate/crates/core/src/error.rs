use thiserror::Error;

/// Errors raised by the geometry, algebra and graph routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: expected one of [{}], found {found}", expected.join(", "))]
    Parse {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function `{name}` at byte {offset} takes {expected} argument(s), got {got}")]
    Arity {
        name: String,
        offset: usize,
        expected: usize,
        got: usize,
    },
    #[error("domain error in `{what}` at byte {offset}")]
    Domain { what: String, offset: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("point outside chart: {0}")]
    Chart(String),
    #[error("immersion is not of full rank at the requested point")]
    RankDeficient,
    #[error("Omega-angle must be positive, got cos(theta) = {0}")]
    NonPositiveAngle(f64),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("singular operator: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
