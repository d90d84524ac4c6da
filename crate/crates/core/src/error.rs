use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node id {id} is out of range for a network of {n_nodes} nodes")]
    InvalidNode { id: usize, n_nodes: usize },
    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(usize),
    #[error("edge distance must be finite and positive, got {0}")]
    InvalidDistance(f64),
    #[error("edge covariate {cov} is outside 1..={n_covariates}")]
    InvalidCovariate { cov: usize, n_covariates: usize },
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: usize, to: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix entry ({row}, {col}) is negative")]
    NegativeEntry { row: usize, col: usize },
    #[error("matrix diagonal entry {0} is nonzero")]
    NonzeroDiagonal(usize),
    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),
    #[error("conflicting symmetric entries at ({row}, {col})")]
    AsymmetricConflict { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("missing or malformed coefficients: {0}")]
    MissingCoefficients(String),
    #[error("insufficient data for order: {rows} usable rows for {params} parameters")]
    InsufficientData { rows: usize, params: usize },
    #[error("operation requires a static network")]
    TimeVaryingNetwork,
    #[error("eigenvalue iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("singular matrix: {0}")]
    Singular(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("own lag of node {node} at time {time} is missing")]
    MissingOwnLag { node: usize, time: usize },
    #[error("no observed values to score against")]
    AllMissing,
    #[error("standard deviation of node {0} is zero or undefined")]
    ZeroVariance(usize),
    #[error("series too short: {0}")]
    SeriesTooShort(String),
    #[error("no candidate model could be fitted")]
    NoCandidateFits,
}

pub type Result<T> = core::result::Result<T, Error>;

/// Non-fatal conditions reported alongside a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The sufficient stationarity condition fails; the process may diverge.
    NonStationary { max_margin: f64 },
    /// The design is rank deficient; listed columns (zero-based) are aliased
    /// and the minimum-norm solution was returned.
    RankDeficient { aliased: alloc::vec::Vec<usize> },
    /// The innovation covariance was singular and `1e-10·I` was added
    /// before taking its log-determinant.
    RidgeStabilized,
}

impl core::fmt::Display for Warning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Warning::NonStationary { max_margin } => {
                write!(f, "stationarity condition fails (max margin {max_margin}); series may diverge")
            }
            Warning::RankDeficient { aliased } => {
                write!(f, "design matrix is rank deficient; aliased columns {aliased:?}")
            }
            Warning::RidgeStabilized => f.write_str("innovation covariance singular; ridge 1e-10 added"),
        }
    }
}
