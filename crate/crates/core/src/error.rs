use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid model parameters, state descriptions or arguments.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed or produced an invalid result.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Krylov propagation did not reach the requested residual.
    #[error(
        "krylov propagation did not converge: residual {residual:.3e} > tol {tol:.3e} \
         after {substeps} substeps with subspace dimension {dim}"
    )]
    KrylovNonConvergence {
        residual: f64,
        tol: f64,
        substeps: usize,
        dim: usize,
    },

    /// The target energy lies outside the attainable thermal range.
    #[error("no inverse temperature reproduces energy {target} (spectrum range [{min}, {max}])")]
    ThermalUnsolvable { target: f64, min: f64, max: f64 },

    /// Dimension of the Hilbert space exceeds the configured limit.
    #[error("dimension guard: L = {l} exceeds the {what} limit of {max}")]
    TooLarge { l: usize, max: usize, what: &'static str },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Data(_) | Error::TooLarge { .. } => 2,
            Error::Numeric(_)
            | Error::KrylovNonConvergence { .. }
            | Error::ThermalUnsolvable { .. } => 3,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
