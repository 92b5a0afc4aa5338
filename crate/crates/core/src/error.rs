use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("Jacobi iteration did not converge (off-diagonal norm {off_norm:.3e})")]
    EigenNoConvergence { off_norm: f64 },

    #[error("matrix is singular or nearly so (min eigenvalue {min_eig:.3e})")]
    NearSingular { min_eig: f64 },

    #[error("{what} is singular (|det| = {det_abs:.3e})")]
    Singular { what: &'static str, det_abs: f64 },

    #[error("size {size} exceeds the supported limit {limit} for {what}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("block map must be square (r = {r}, w = {w})")]
    NotSquare { r: usize, w: usize },

    #[error("rank {found} not supported here (need {expected})")]
    WrongRank {
        expected: &'static str,
        found: usize,
    },

    #[error("block map is not normalized (residual {residual:.3e} > {tol:.1e})")]
    NotNormalized { residual: f64, tol: f64 },

    #[error("block map violates Hermitian block symmetry (drift {drift:.3e})")]
    BlockAsymmetry { drift: f64 },

    #[error("off-diagonal trace tr(B_12) = {0:.3e} is not zero")]
    OffDiagonalTrace(f64),

    #[error("map is not strictly positive (certificate min eigenvalue {min_eig:.3e})")]
    NotStrictlyPositive { min_eig: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("negative argument {0}")]
    NegativeArgument(f64),

    #[error("curvature tensor violates Hermitian symmetry (drift {drift:.3e})")]
    CurvatureAsymmetry { drift: f64 },

    #[error("form degree overflow: bidegree ({p}, {q}) on dimension {n}")]
    DegreeOverflow { p: usize, q: usize, n: usize },

    #[error("bidegree mismatch: {0}")]
    Bidegree(String),

    #[error("invalid multi-index: {0}")]
    InvalidMultiIndex(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid fiber subset: {0}")]
    InvalidSubset(String),

    #[error("parameter {name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },

    #[error("scaling did not converge in {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
}
