use thiserror::Error;

/// Everything that can go wrong while validating, analysing or simulating a
/// tandem polling network.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rate `{name}` must be strictly positive and finite, got {value}")]
    NonPositiveRate { name: &'static str, value: f64 },

    #[error("station {station} is unstable: total load {rho:.4} >= 1")]
    UnstableSystem { station: usize, rho: f64 },

    #[error("queue with arrival rate {lambda} and service rate {mu} never empties on average")]
    UnstableQueue { lambda: f64, mu: f64 },

    #[error("scenario index must be in 1..=4, got {0}")]
    InvalidScenario(u8),

    #[error("class index must be 1 or 2, got {0}")]
    InvalidClass(u8),

    #[error("argument outside the support of the distribution: {0}")]
    InvalidSupport(String),

    #[error("series did not converge: {0}")]
    SeriesOverflow(String),

    #[error("quadrature failed to reach tolerance {tol:e} (estimated error {err:e})")]
    QuadratureFailure { tol: f64, err: f64 },

    #[error("linear system is singular at row {0}")]
    SingularSystem(usize),

    #[error("truncated lattice leaks {mass:e} probability through its boundary (allowed {tol:e})")]
    TruncationTooTight { mass: f64, tol: f64 },

    #[error("residual probability {residual:e} still above threshold {eps:e} after {depth} repeating blocks")]
    ThresholdUnreached {
        residual: f64,
        eps: f64,
        depth: usize,
    },

    #[error("tagged customer still in the system after {0} events")]
    NonTermination(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
