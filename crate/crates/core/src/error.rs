use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize a zero vector")]
    Normalization,

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("empty request: {0}")]
    EmptyRequest(String),

    #[error("truncation too small: tail mass {tail_mass:.3e} exceeds {limit:.1e}")]
    Truncation { tail_mass: f64, limit: f64 },

    #[error("moment diverges: {0}")]
    Moment(String),

    #[error("singular profile: {0}")]
    Singularity(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("pointer support outside [-1/2, 1/2): |phi({x})| = {value:.3e}")]
    Support { x: f64, value: f64 },

    #[error("out of range: {0}")]
    Range(String),

    #[error("no real solution: {0}")]
    Infeasible(String),

    #[error("root finder did not converge (residual {residual:.3e})")]
    Convergence { residual: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Process exit code used by the CLI: 2 for precondition-type failures,
    /// 3 for truncation and convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Truncation { .. } | Error::Convergence { .. } => 3,
            _ => 2,
        }
    }
}
