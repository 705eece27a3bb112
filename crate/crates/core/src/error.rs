use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid book state: {0}")]
    InvalidState(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("inadmissible control: {0}")]
    InvalidControl(String),
    #[error("inadmissible hidden order flags: {0}")]
    InvalidHidden(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("state outside the grid: {0}")]
    OffGrid(String),
    #[error("decision tree too large: estimated {estimated} leaves, cap {cap}")]
    CapExceeded { estimated: u128, cap: u128 },
    #[error("weights are not normalized: sum = {0}")]
    UnnormalizedWeights(f64),
    #[error("denominator {value} below floor {floor}")]
    BelowFloor { value: f64, floor: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error("malformed policy file: {0}")]
    PolicyFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
