use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field order {0} is not a prime power not exceeding 256")]
    InvalidOrder(usize),
    #[error("extension degree {0} must be at least 2")]
    InvalidDegree(usize),
    #[error("modulus is not a monic irreducible polynomial of the requested degree")]
    NotIrreducible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("key generation failed after {0} attempts")]
    GenerationFailed(usize),
    #[error("symbol {0:?} is not in the alphabet")]
    SymbolOutOfAlphabet(char),
    #[error("encryption failed after {0} trials")]
    EncryptionFailed(usize),
    #[error("no alphabet-valid decryption candidate")]
    NoValidCandidate,
    #[error("ambiguous decryption: {} candidates", .0.len())]
    AmbiguousDecryption(Vec<String>),
    #[error("search space of {0} points exceeds the enumeration limit")]
    TooLarge(u128),
    #[error("signing failed after {0} trials")]
    SigningFailed(usize),
    #[error("signcryption failed after {0} trials")]
    SigncryptionFailed(usize),
    #[error("gcd(q^theta + 1, q^n - 1) = gcd({h}, {order}) = {gcd}, expected 1")]
    BadTheta { h: u128, order: u128, gcd: u128 },
    #[error("affine solution space of dimension {0} exceeds the enumeration guard")]
    SolutionSpaceTooLarge(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
