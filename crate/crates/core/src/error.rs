use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("kernel is singular at t = {t}; evaluate at t > 0")]
    KernelDomain { t: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("jump transform undefined at z = {re} + {im}i (real part must stay below {rate})")]
    JumpDomain { re: f64, im: f64, rate: f64 },

    #[error("{0} is not supported for this kernel")]
    UnsupportedKernel(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("resolvent recursion diverged at node {node}")]
    ResolventDivergence { node: usize },

    #[error("first-kind resolvent residual {residual:.3e} exceeds {tolerance:.1e}")]
    Deconvolution { residual: f64, tolerance: f64 },

    #[error("Riccati solution blew up at node {node} (t = {t})")]
    Blowup { node: usize, t: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
