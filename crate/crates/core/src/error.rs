use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate coordinate name `{0}`")]
    DuplicateCoordinate(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("formal coordinate `{0}` has degree 0; formal generators must have nonzero degree")]
    ZeroDegreeFormal(String),
    #[error("formal index {index} out of range for a chart with {len} formal coordinates")]
    UnknownIndex { index: usize, len: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("structure constants are not antisymmetric: {0}")]
    NotAntisymmetric(String),
    #[error("requested order {requested} exceeds truncation {truncation}")]
    BeyondTruncation { requested: usize, truncation: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Stable machine-readable code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DuplicateCoordinate(_) => "E_DUP_COORD",
            Error::UnknownCoordinate(_) | Error::UnknownIndex { .. } => "E_UNKNOWN_COORD",
            Error::ZeroDegreeFormal(_) => "E_ZERO_DEGREE_FORMAL",
            Error::DegreeMismatch(_) => "E_DEGREE_MISMATCH",
            Error::ChartMismatch => "E_CHART_MISMATCH",
            Error::ArityMismatch { .. } => "E_ARITY",
            Error::NotInvertible(_) => "E_NOT_INVERTIBLE",
            Error::NotAntisymmetric(_) => "E_NOT_ANTISYMMETRIC",
            Error::BeyondTruncation { .. } => "E_TRUNCATION",
            Error::Precondition(_) => "E_PRECONDITION",
        }
    }
}
