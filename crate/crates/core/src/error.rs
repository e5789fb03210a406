use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate factor label `{0}`")]
    LabelCollision(String),
    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("matrix is not unitary (residual {0:.3e})")]
    NonUnitary(f64),
    #[error("not a density matrix: {0}")]
    InvalidState(String),
    #[error("map is not completely positive and trace preserving: {0}")]
    NotCptp(String),
    #[error("unknown site `{0}`")]
    UnknownSite(String),
    #[error("site mismatch: {0}")]
    SiteMismatch(String),
    #[error("weights must be strictly positive, found {0}")]
    NonPositiveWeight(f64),
    #[error("trial mismatch: {0}")]
    TrialMismatch(String),
    #[error("{0} is too large")]
    TooLarge(String),
    #[error("sequence has no element for n = {0}")]
    MissingElement(usize),
    #[error("input is not permutation symmetric (residual {0:.3e})")]
    NotSymmetric(f64),
    #[error("constraint set is empty at the requested dimensions: {0}")]
    EmptyConstraintSet(String),
    #[error("every hypothesis assigns zero probability to the data")]
    InconsistentData,
    #[error("unknown suite case `{0}`")]
    UnknownCase(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid process matrix: {0}")]
    InvalidProcess(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
