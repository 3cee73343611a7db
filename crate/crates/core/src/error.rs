use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("non-finite sample at x = {x}")]
    NonFiniteSample { x: f64 },
    #[error("step {step:?} at {at:?} leaves the truncated domain")]
    StepOutOfDomain { step: Vec<f64>, at: Vec<f64> },
    #[error("degenerate difference step {0:?}")]
    DegenerateStep(Vec<f64>),
    #[error("domain too small: {0}")]
    DomainTooSmall(String),
    #[error("derivative samples are required but none are stored")]
    MissingDerivative,
    #[error("partial derivative {0} is required but not stored")]
    MissingPartial(&'static str),
    #[error("multi-indices overlap: eta = {eta:?}, zeta = {zeta:?}")]
    BadIndex { eta: [u8; 2], zeta: [u8; 2] },
    #[error("envelope direction mismatch: expected {expected}, got {got}")]
    EnvelopeDirectionMismatch {
        expected: &'static str,
        got: &'static str,
    },
    #[error("envelope grids are not compatible")]
    EnvelopeGridMismatch,
    #[error("precondition gap: {0}")]
    PreconditionGap(String),
    #[error("head majorant vanishes at 4π: the function is identically zero")]
    ZeroDerivativeScale,
    #[error("bad exponent: alpha = {0} must be positive")]
    BadExponent(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("T-transform integrand does not cancel near s = 0 at t = {t}")]
    SingularAtOrigin { t: f64 },
    #[error("convergence diagnosis needs at least {needed} states, got {got}")]
    InsufficientStates { needed: usize, got: usize },
    #[error("bad family parameters: {0}")]
    BadParams(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Configuration problems map to exit code 2, everything else is a numerical failure (3).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::BadParams(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
