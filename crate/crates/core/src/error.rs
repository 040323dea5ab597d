use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:e} exceeds {allowed:e})")]
    NonHermitianInput { defect: f64, allowed: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix side {0} is not a perfect square")]
    NotPerfectSquareSide(usize),

    #[error("state is not normalized (trace {0})")]
    NotNormalized(f64),

    #[error("matrix is not a subnormalized state: {0}")]
    NotAState(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("bad dimensions: {0}")]
    BadDimensions(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("rejection sampler exhausted its budget of {0} proposals")]
    RejectionBudgetExceeded(u64),

    #[error("map is not completely positive (min eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("Kraus operators violate the sub-tracial Gram condition (max eigenvalue {max:e} > {bound:e})")]
    GramConditionViolated { max: f64, bound: f64 },

    #[error("bad subset: {0}")]
    BadSubset(String),

    #[error("eigenvalues are not on the simplex: {0}")]
    NotOnSimplex(String),

    #[error("invalid matrix data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
