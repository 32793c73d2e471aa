use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("grid resolution {num}/{den} is outside (0, 1]")]
    InvalidDelta { num: u64, den: u64 },
    #[error("vector has length {got}, grid expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector contains NaN or infinite coordinates")]
    NonFinite,
    #[error("vector norm {0} exceeds 1 + 2^-20")]
    NormTooLarge(f64),
    #[error("zero vector cannot be placed on the unit sphere")]
    ZeroVector,
    #[error("magnitude sum {sum} exceeds grid budget {budget}")]
    BudgetExceeded { sum: u64, budget: u64 },
    #[error("thresholds must satisfy 0 <= beta < alpha <= 1 (got alpha={alpha}, beta={beta})")]
    InvalidThresholds { alpha: f64, beta: f64 },
    #[error("epsilon {0} is outside (0, 1]")]
    InvalidEpsilon(f64),
    #[error("composition index is out of range for this grid")]
    IndexOutOfRange,
    #[error("malformed code word: {0}")]
    MalformedCode(String),
    #[error("code words were produced under different grids")]
    GridMismatch,
    #[error("grid resolution is too coarse to separate alpha={alpha} from beta={beta}")]
    SpecIncompatible { alpha: f64, beta: f64 },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported container version {0}")]
    VersionUnsupported(u8),
    #[error("file is truncated")]
    TruncatedFile,
    #[error("checksum mismatch")]
    ChecksumMismatch,
    #[error("angle between inputs is too close to 0 or pi")]
    DegenerateAngle,
    #[error("angle {theta} is below the required gap {gap}")]
    GapViolated { theta: f64, gap: f64 },
    #[error("angle {theta} exceeds {limit}; no witness reaches alpha")]
    AngleTooWide { theta: f64, limit: f64 },
    #[error("candidate budget exhausted before the sphere was covered")]
    BudgetTooSmall,
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },
    #[error("every vector in the set is zero")]
    AllZero,
    #[error("need at least two vectors to sample pairs")]
    SetTooSmall,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(offset: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
