use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown family tag `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters for {family}: {reason}")]
    InvalidParams {
        family: &'static str,
        reason: String,
    },
    #[error("{0} is not a supported prime (expected one of 2, 3, 5, 7, 11, 13)")]
    UnsupportedPrime(u64),
    #[error("quotient of size {requested} exceeds the in-memory limit of {limit} cosets")]
    IndexTooLarge { requested: u128, limit: u128 },
    #[error("generator index {index} out of range for a chain of length {len}")]
    GeneratorOutOfRange { index: usize, len: usize },
    #[error("invalid permutation action: {0}")]
    InvalidAction(String),
    #[error("Cayley ball of radius {radius} exceeds the frontier guard of {limit} elements")]
    BallTooLarge { radius: usize, limit: usize },
    #[error("right-angled certificate failed: {0}")]
    NotRightAngled(String),
    #[error("rewiring radius must be even and at least 2, got {0}")]
    InvalidRadius(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("action is not transitive: reached {reached} of {total} vertices")]
    NotTransitive { reached: usize, total: usize },
    #[error("labeling does not match the rewiring: {0}")]
    LabelingMismatch(String),
    #[error("correction element for edge ({vertex}, {generator}) does not fix its vertex")]
    CorrectionNotStabilizing { vertex: usize, generator: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
