use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A gradient or Hessian of a norm was requested at the origin.
    #[error("{0} is undefined at the origin")]
    Origin(&'static str),

    #[error("grid resolution {resolution} too coarse: {reason}")]
    GridTooCoarse { resolution: usize, reason: String },

    #[error("local eikonal update failed at node {node}")]
    EikonalUpdate { node: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("Rayleigh descent stalled after {iterations} iterations (gradient {gradient:.3e})")]
    DescentStall {
        iterations: usize,
        gradient: f64,
        history: Vec<f64>,
    },

    #[error("singular Jacobian: {0}")]
    SingularJacobian(String),

    #[error("not enough nodes in fit band: {found} < {required}")]
    InsufficientBand { found: usize, required: usize },

    #[error("empty evaluation set for {0}")]
    EmptySet(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
