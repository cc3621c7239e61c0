use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Xi(a) too ill-conditioned to invert.
    #[error("degenerate generator: Xi(a) condition estimate {cond:.3e}")]
    DegenerateGenerator { cond: f64 },

    /// Hankel matrix of the signal too ill-conditioned to solve.
    #[error("degenerate signal: Hankel condition estimate {cond:.3e}")]
    DegenerateSignal { cond: f64 },

    #[error("degenerate spectrum: eigenvalue gap {gap:.3e} below threshold")]
    DegenerateSpectrum { gap: f64 },

    #[error("singular linear system (condition estimate {cond:.3e})")]
    SingularSystem { cond: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric domain error at t = {t}: {msg}")]
    Domain { t: f64, msg: String },

    #[error("state diverged (|x| > {threshold:e}) after last finite time t = {last_t}")]
    BlowUp { last_t: f64, threshold: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconclusive oracle: {0}")]
    InconclusiveOracle(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Attach a simulation time to a plant domain error raised without one.
    pub(crate) fn at_time(self, t: f64) -> Self {
        match self {
            Error::Domain { msg, .. } => Error::Domain { t, msg },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
