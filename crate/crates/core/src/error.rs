use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported variable count {0} (expected 1..=7)")]
    VariableCount(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("truth table has bits beyond 2^{0} points")]
    TruthTableOverflow(usize),
    #[error("order {r} out of range for {n} variables")]
    OrderOutOfRange { n: usize, r: usize },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u32, u32),
    #[error("unsupported field size {0}")]
    UnsupportedField(u32),
    #[error("closure exceeds cap of {0} elements")]
    ClosureCap(usize),
    #[error("invalid class index {0}")]
    BadClass(usize),
    #[error("invariant pair (deg {0}, nl3 {1}) matches no class")]
    UnknownClass(u32, u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input hash mismatch: {0}")]
    InputHash(String),
    #[error("bad file format: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
