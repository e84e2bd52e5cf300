use thiserror::Error;

/// Errors raised by the geometry, solver and I/O layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square or has inconsistent rows: {0}")]
    NotSquare(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not normal (commutator norm {residual:e})")]
    NotNormal { residual: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is not skew-Hermitian (residual {residual:e})")]
    NotSkewHermitian { residual: f64 },
    #[error("matrix is not an orthogonal projection (residual {residual:e})")]
    NotProjection { residual: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid Schatten exponent p = {0}; p must be an even integer >= 2")]
    InvalidP(u32),
    #[error("spectrum of u^-1 v touches -1; the connecting geodesic is not unique")]
    AntipodalSpectrum,
    #[error("invalid ball: {0}")]
    InvalidBall(String),
    #[error("points violate the required radius: {0}")]
    RadiusViolation(String),
    #[error("d_inf = {distance} is not below the length parameter {length_parameter}")]
    LengthParameterExceeded { distance: f64, length_parameter: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("eigenvalue spread reaches pi at t = {0:?}")]
    SpreadViolation(Vec<f64>),
    #[error("point is not in the subspace (residual {residual:e})")]
    NotInSubspace { residual: f64 },
    #[error("start point is infeasible: {0}")]
    InfeasibleStart(String),
    #[error("solver stalled after {iterations} iterations with last move {last_move:e}")]
    StallWithoutCertificate { iterations: usize, last_move: f64 },
    #[error("representation is not a homomorphism (residual {residual:e})")]
    NotHomomorphism { residual: f64 },
    #[error("circumradius bound {bound} is not below the admissible limit {limit}")]
    RadiusTooLarge { bound: f64, limit: f64 },
    #[error("fixed point residual {residual:e} exceeds tolerance {tol:e}")]
    FixedPointResidual { residual: f64, tol: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
